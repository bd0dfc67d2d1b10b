#include "bethe/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bethe/edge_terms.hpp"
#include "bethe/free_energy.hpp"
#include "bethe/sym_matrix.hpp"

namespace bethe {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> axpy(const std::vector<double>& base, double scale,
                         const std::vector<double>& dir) {
    std::vector<double> out(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) out[k] = base[k] + scale * dir[k];
    return out;
}

SymMatrix identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

// Random SPD matrix Q D Q^T: Gram-Schmidt orthonormalization of a random
// matrix, positive diagonal in [0.5, 2].
SymMatrix random_spd(int n, SplitMix64& rng) {
    std::vector<std::vector<double>> basis(n, std::vector<double>(n));
    for (auto& row : basis)
        for (double& v : row) v = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            const double proj = dot(basis[i], basis[j]);
            for (int k = 0; k < n; ++k) basis[i][k] -= proj * basis[j][k];
        }
        double len = norm2(basis[i]);
        if (len < 1e-12) {
            basis[i].assign(n, 0.0);
            basis[i][i] = 1.0;
            len = 1.0;
        }
        for (double& v : basis[i]) v /= len;
    }
    std::vector<double> diag(n);
    for (double& v : diag) v = rng.uniform(0.5, 2.0);
    SymMatrix m(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double v = 0.0;
            for (int k = 0; k < n; ++k) v += basis[k][r] * diag[k] * basis[k][c];
            m.at(r, c) = v;
        }
    return m;
}

std::vector<double> mat_t_vec(const SymMatrix& m, const std::vector<double>& v) {
    std::vector<double> out(m.n, 0.0);
    for (int r = 0; r < m.n; ++r)
        for (int c = 0; c < m.n; ++c) out[c] += m.at(r, c) * v[r];
    return out;
}

std::vector<double> mat_vec(const SymMatrix& m, const std::vector<double>& v) {
    std::vector<double> out(m.n, 0.0);
    for (int r = 0; r < m.n; ++r) {
        double s = 0.0;
        for (int c = 0; c < m.n; ++c) s += m.at(r, c) * v[c];
        out[r] = s;
    }
    return out;
}

// Combined rank-two inverse-Hessian update with gamma = s.y:
//   B += ((gamma + y.By)/gamma^2) s s^T - (1/gamma) (By s^T + s (By)^T)
void bfgs_update(SymMatrix& b, const std::vector<double>& s, const std::vector<double>& y,
                 double gamma) {
    const std::vector<double> by = mat_vec(b, y);
    const double y_by = dot(y, by);
    const double c1 = (gamma + y_by) / (gamma * gamma);
    const double c2 = 1.0 / gamma;
    for (int r = 0; r < b.n; ++r)
        for (int c = 0; c < b.n; ++c)
            b.at(r, c) += c1 * s[r] * s[c] - c2 * (by[r] * s[c] + s[r] * by[c]);
}

} // namespace

void OptimizerConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(0.0 < tau1 && tau1 < tau2 && tau2 < 1.0))
        throw std::invalid_argument("need 0 < tau1 < tau2 < 1");
    if (!(0.0 < projection_shrink && projection_shrink < 1.0))
        throw std::invalid_argument("projection_shrink must lie in (0, 1)");
    if (!(expansion > 1.0)) throw std::invalid_argument("expansion must exceed 1");
    if (max_iterations < 1 || max_line_search_steps < 1)
        throw std::invalid_argument("iteration limits must be >= 1");
    if (!(cluster_tol > 0.0)) throw std::invalid_argument("cluster_tol must be positive");
}

namespace detail {

// Line-search core operating on precomputed tail values, so the optimizer's
// cached F and gradient are not recomputed on every iteration.
WolfeResult wolfe_search_impl(const Model& model, const std::vector<double>& q_tail,
                              const std::vector<double>& q_head, double f0,
                              const std::vector<double>& grad_tail, const OptimizerConfig& config,
                              SplitMix64& rng) {
    std::vector<double> direction(q_tail.size());
    for (std::size_t k = 0; k < q_tail.size(); ++k) direction[k] = q_head[k] - q_tail[k];

    const double slope0 = dot(direction, grad_tail);
    if (!(slope0 < 0.0)) throw std::invalid_argument("not a descent direction");

    WolfeResult result;
    bool w1 = false, w2 = false;
    double probe_f = 0.0;
    std::vector<double> probe_grad;
    auto probe = [&](double rho) {
        const std::vector<double> q = axpy(q_tail, rho, direction);
        probe_f = bethe_free_energy(model, q);
        probe_grad.clear();
        ++result.evaluations;
        w1 = probe_f <= f0 + config.tau1 * rho * slope0;
        w2 = false;
        if (w1) {
            probe_grad = bethe_gradient(model, q);
            w2 = dot(direction, probe_grad) >= config.tau2 * slope0;
        }
    };
    auto accept = [&](double rho, WolfeStatus status) {
        result.rho = rho;
        result.status = status;
        result.f_at_rho = probe_f;
        result.grad_at_rho = std::move(probe_grad);
        return result;
    };

    double rho = std::min(0.999, std::max(0.05, rng.uniform()));
    int steps = 0;
    probe(rho);
    while (w1 && !w2 && rho < 1.0 && steps < config.max_line_search_steps) {
        rho = std::min(1.0, rho * config.expansion);
        probe(rho);
        ++steps;
    }
    if (w1 && w2) return accept(rho, WolfeStatus::both);
    // The feasible segment can end before the curvature condition is met.
    if (w1) return accept(rho, WolfeStatus::sufficient_decrease_only);

    // Contraction phase: shrink toward a step satisfying both conditions.
    double lo = 0.0, hi = rho, best_w1 = -1.0;
    while (steps < config.max_line_search_steps) {
        rho = lo + (hi - lo) * (0.05 + 0.9 * rng.uniform());
        probe(rho);
        ++steps;
        if (!w1) {
            hi = rho;
        } else if (!w2) {
            lo = rho;
            best_w1 = rho;
        } else {
            return accept(rho, WolfeStatus::both);
        }
    }
    if (best_w1 > 0.0) {
        // grad/f belong to the last probe, not necessarily best_w1
        result.rho = best_w1;
        result.status = WolfeStatus::sufficient_decrease_only;
    }
    return result;
}

} // namespace detail

WolfeResult wolfe_line_search(const Model& model, const std::vector<double>& q_tail,
                              const std::vector<double>& q_head, const OptimizerConfig& config,
                              SplitMix64& rng) {
    config.validate();
    return detail::wolfe_search_impl(model, q_tail, q_head, bethe_free_energy(model, q_tail),
                                     bethe_gradient(model, q_tail), config, rng);
}

MinimizationResult bethe_min(const Model& model, const std::vector<double>& q0,
                             const OptimizerConfig& config, std::uint64_t seed) {
    config.validate();
    if (static_cast<int>(q0.size()) != model.node_count)
        throw std::invalid_argument("q0 length must equal node count");

    const int n = model.node_count;
    SplitMix64 rng(seed);

    MinimizationResult result;
    std::vector<double> q = clamp_to_box(q0);
    std::vector<double> grad = bethe_gradient(model, q);
    double f = bethe_free_energy(model, q);
    SymMatrix inv_hessian = config.random_spd_init ? random_spd(n, rng) : identity(n);

    if (config.record_trace) result.trace.push_back({0, f, norm2(grad), 0.0});

    // Shrinking Armijo step along -grad; used when the quasi-Newton direction
    // or its line search fails.
    auto gradient_fallback = [&](std::vector<double>& q_out, double& step_out) -> bool {
        ++result.line_search_failures;
        double rho_box = 1.0 / std::max(1.0, norm2(grad));
        for (int i = 0; i < n; ++i) {
            const double d_i = -grad[i];
            if (d_i > 0.0)
                rho_box = std::min(rho_box, (1.0 - kEpsBox - q[i]) / d_i);
            else if (d_i < 0.0)
                rho_box = std::min(rho_box, (q[i] - kEpsBox) / -d_i);
        }
        if (!(rho_box > 0.0)) return false;
        const double g2 = dot(grad, grad);
        double rho = rho_box;
        for (int tries = 0; tries < config.max_line_search_steps; ++tries) {
            std::vector<double> trial = clamp_to_box(axpy(q, -rho, grad));
            if (bethe_free_energy(model, trial) <= f - config.tau1 * rho * g2) {
                q_out = std::move(trial);
                step_out = rho;
                return true;
            }
            rho *= 0.5;
        }
        return false;
    };

    int iter = 0;
    for (; iter < config.max_iterations; ++iter) {
        const double grad_norm = norm2(grad);
        if (grad_norm <= config.epsilon) {
            result.converged = true;
            break;
        }

        std::vector<double> direction = mat_t_vec(inv_hessian, grad);
        for (double& v : direction) v = -v;
        if (!(dot(direction, grad) < 0.0)) {
            // Lost positive definiteness of B; restart from a gradient step.
            inv_hessian = identity(n);
            direction = grad;
            for (double& v : direction) v = -v;
        }

        // Largest feasible step toward q + direction.
        double rho_max = 1.0;
        std::vector<double> q_head = axpy(q, rho_max, direction);
        int shrink_count = 0;
        while (!inside_box(q_head) && shrink_count < 400) {
            rho_max *= config.projection_shrink;
            q_head = axpy(q, rho_max, direction);
            ++shrink_count;
        }

        double step = 0.0;
        bool moved = false;
        bool have_new_values = false;
        double f_new = 0.0;
        std::vector<double> q_new, grad_new;
        if (shrink_count < 400) {
            WolfeResult ls;
            try {
                ls = detail::wolfe_search_impl(model, q, q_head, f, grad, config, rng);
            } catch (const std::invalid_argument&) {
                ls.status = WolfeStatus::failed; // slope degenerated to zero
            }
            if (ls.status != WolfeStatus::failed) {
                q_new.resize(n);
                bool clamp_moved = false;
                for (int i = 0; i < n; ++i) {
                    const double raw = q[i] + ls.rho * (q_head[i] - q[i]);
                    q_new[i] = clamp_unit(raw);
                    clamp_moved = clamp_moved || q_new[i] != raw;
                }
                step = ls.rho * rho_max;
                moved = true;
                // probe values match q_new only if the clamp was a no-op
                if (!clamp_moved && !ls.grad_at_rho.empty()) {
                    f_new = ls.f_at_rho;
                    grad_new = std::move(ls.grad_at_rho);
                    have_new_values = true;
                }
                if (ls.status == WolfeStatus::sufficient_decrease_only)
                    ++result.line_search_failures;
            }
        }
        if (!moved) {
            if (!gradient_fallback(q_new, step)) {
                // No descent possible at working precision; stop here.
                break;
            }
            moved = true;
        }
        if (!have_new_values) {
            f_new = bethe_free_energy(model, q_new);
            grad_new = bethe_gradient(model, q_new);
        }

        std::vector<double> s(n), y(n);
        for (int i = 0; i < n; ++i) {
            s[i] = q_new[i] - q[i];
            y[i] = grad_new[i] - grad[i];
        }
        const double gamma = dot(s, y);
        if (gamma > 1e-12 * norm2(s) * norm2(y))
            bfgs_update(inv_hessian, s, y, gamma);
        else
            ++result.bfgs_skips;

        q = std::move(q_new);
        grad = std::move(grad_new);
        f = f_new;
        if (config.record_trace) result.trace.push_back({iter + 1, f, norm2(grad), step});
    }

    result.q_star = std::move(q);
    result.f_value = f;
    result.grad_norm = norm2(grad);
    result.iterations = iter;
    return result;
}

MultiRestartResult multi_restart_minimize(const Model& model, int restarts, std::uint64_t seed,
                                          const OptimizerConfig& config) {
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    config.validate();

    MultiRestartResult out;
    out.runs.resize(restarts);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (!omp_in_parallel())
#endif
    for (int r = 0; r < restarts; ++r) {
        const std::uint64_t run_seed = derive_seed(seed, {static_cast<std::uint64_t>(r)});
        SplitMix64 start_rng(derive_seed(run_seed, {1}));
        std::vector<double> q0(model.node_count);
        for (double& v : q0) v = start_rng.uniform(1e-3, 1.0 - 1e-3);
        out.runs[r] = bethe_min(model, q0, config, derive_seed(run_seed, {2}));
    }

    out.cluster_of.assign(restarts, -1);
    for (int r = 0; r < restarts; ++r) {
        if (!out.runs[r].converged) continue;
        ++out.converged_count;
        const std::vector<double>& q = out.runs[r].q_star;
        int assigned = -1;
        for (std::size_t c = 0; c < out.cluster_reps.size(); ++c) {
            double dist = 0.0;
            for (int i = 0; i < model.node_count; ++i)
                dist = std::max(dist, std::fabs(q[i] - out.cluster_reps[c][i]));
            if (dist <= config.cluster_tol) {
                assigned = static_cast<int>(c);
                break;
            }
        }
        if (assigned < 0) {
            assigned = static_cast<int>(out.cluster_reps.size());
            out.cluster_reps.push_back(q);
        }
        out.cluster_of[r] = assigned;
    }
    out.distinct_minima = static_cast<int>(out.cluster_reps.size());

    for (int r = 0; r < restarts; ++r) {
        if (out.best_run < 0) {
            out.best_run = r;
            continue;
        }
        const MinimizationResult& cur = out.runs[r];
        const MinimizationResult& best = out.runs[out.best_run];
        if (cur.converged != best.converged) {
            if (cur.converged) out.best_run = r;
        } else if (cur.f_value < best.f_value) {
            out.best_run = r;
        }
    }
    return out;
}

void write_trace_csv(const MinimizationResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "iteration,f,grad_norm,step\n";
    char line[160];
    for (const TracePoint& p : result.trace) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g\n", p.iteration, p.f, p.grad_norm,
                      p.step);
        out << line;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace bethe
