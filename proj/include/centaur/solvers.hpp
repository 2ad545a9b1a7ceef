#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "centaur/rng.hpp"
#include "centaur/tabular_model.hpp"

namespace centaur {

enum class DiscountKind { Exponential, Hyperbolic, Undiscounted };

/// Optimality criterion: exponential lambda^t, hyperbolic 1/(1+t*gamma), or an
/// undiscounted finite horizon.
struct DiscountSpec {
    DiscountKind kind = DiscountKind::Exponential;
    double lambda = 0.95;   // exponential factor, in (0,1)
    double gamma = 1.0;     // hyperbolic rate, > 0
    std::size_t horizon = 1;  // undiscounted horizon

    static DiscountSpec exponential(double lambda) {
        return {DiscountKind::Exponential, lambda, 0.0, 0};
    }
    static DiscountSpec hyperbolic(double gamma) {
        return {DiscountKind::Hyperbolic, 0.0, gamma, 0};
    }
    static DiscountSpec undiscounted(std::size_t horizon) {
        return {DiscountKind::Undiscounted, 0.0, 0.0, horizon};
    }
};

struct QTable {
    Matrix values;  // values[s][a]
    DiscountSpec discount;

    std::size_t n_states() const { return values.size(); }
    std::size_t n_actions() const { return values.empty() ? 0 : values[0].size(); }

    double state_value(std::size_t s) const {
        return *std::max_element(values[s].begin(), values[s].end());
    }
};

/// Deterministic per-state action choice.
struct Policy {
    std::vector<std::size_t> action;

    std::size_t operator()(std::size_t s) const { return action[s]; }
};

/// Per-state argmax with ties broken toward the lowest action index.
inline Policy greedy_policy(const QTable& q) {
    Policy pi;
    pi.action.resize(q.n_states());
    for (std::size_t s = 0; s < q.n_states(); ++s) {
        std::size_t best = 0;
        for (std::size_t a = 1; a < q.values[s].size(); ++a)
            if (q.values[s][a] > q.values[s][best]) best = a;
        pi.action[s] = best;
    }
    return pi;
}

namespace detail {

inline std::vector<double> row_max(const Matrix& q) {
    std::vector<double> v(q.size());
    for (std::size_t s = 0; s < q.size(); ++s)
        v[s] = *std::max_element(q[s].begin(), q[s].end());
    return v;
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t row = n; row-- > 0;) {
        double acc = b[row];
        for (std::size_t c = row + 1; c < n; ++c) acc -= a[row][c] * x[c];
        x[row] = acc / a[row][row];
    }
    return x;
}

// Exact exponentially discounted Q via policy iteration with linear-solve
// policy evaluation. Convergence is independent of lambda, which matters for
// the lambda -> 1 end of hyperbolic mixtures where value iteration stalls.
inline Matrix exact_q_lambda(const TabularModel& model, double lambda,
                             std::size_t max_iterations = 1000) {
    const std::size_t S = model.n_states, A = model.n_actions;
    std::vector<std::size_t> pi(S, 0);
    Matrix q(S, std::vector<double>(A, 0.0));
    Matrix prev;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        Matrix a_mat(S, std::vector<double>(S, 0.0));
        std::vector<double> rhs(S);
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t s2 = 0; s2 < S; ++s2)
                a_mat[s][s2] = (s == s2 ? 1.0 : 0.0) - lambda * model.transition[pi[s]][s][s2];
            rhs[s] = model.reward[s][pi[s]];
        }
        std::vector<double> v = solve_linear(std::move(a_mat), std::move(rhs));
        bool stable = true;
        double drift = 0.0, scale = 1.0;
        for (std::size_t s = 0; s < S; ++s) {
            std::size_t best = 0;
            for (std::size_t a = 0; a < A; ++a) {
                double acc = model.reward[s][a];
                const auto& row = model.transition[a][s];
                for (std::size_t s2 = 0; s2 < S; ++s2)
                    if (row[s2] != 0.0) acc += lambda * row[s2] * v[s2];
                q[s][a] = acc;
                scale = std::max(scale, std::abs(acc));
                if (!prev.empty()) drift = std::max(drift, std::abs(acc - prev[s][a]));
                if (q[s][a] > q[s][best]) best = a;
            }
            // Hysteretic switch: the incumbent stays unless beaten by a clear
            // margin, otherwise evaluation jitter cycles near-tied policies.
            if (best != pi[s] &&
                q[s][best] > q[s][pi[s]] + 1e-6 * (1.0 + std::abs(q[s][pi[s]]))) {
                pi[s] = best;
                stable = false;
            }
        }
        if (stable) return q;
        if (!prev.empty() && drift <= 1e-9 * scale) return q;  // value-converged tie cycling
        prev = q;
    }
    throw NonconvergenceAfterMaxIterations("policy iteration did not stabilize");
}

}  // namespace detail

/// Exponentially discounted value iteration on a fully observable model.
/// Iterates until the sup-norm Bellman residual drops below tol.
inline QTable value_iteration(const TabularModel& model, double lambda, double tol = 1e-9,
                              std::size_t max_sweeps = 1000000) {
    if (!model.fully_observable())
        throw InvalidModel("value_iteration expects a fully observable model");
    if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidModel("lambda must lie in (0,1)");
    if (!(tol > 0.0)) throw InvalidModel("tol must be positive");

    const std::size_t S = model.n_states, A = model.n_actions;
    QTable q;
    q.discount = DiscountSpec::exponential(lambda);
    q.values.assign(S, std::vector<double>(A, 0.0));
    std::vector<double> v(S, 0.0), v_next(S, 0.0);

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double residual = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < A; ++a) {
                double acc = model.reward[s][a];
                const auto& row = model.transition[a][s];
                for (std::size_t s2 = 0; s2 < S; ++s2)
                    if (row[s2] != 0.0) acc += lambda * row[s2] * v[s2];
                q.values[s][a] = acc;
                best = std::max(best, acc);
            }
            v_next[s] = best;
            residual = std::max(residual, std::abs(best - v[s]));
        }
        v.swap(v_next);
        if (residual <= tol) return q;
    }
    throw NonconvergenceAfterMaxIterations("value iteration did not converge in " +
                                           std::to_string(max_sweeps) + " sweeps");
}

/// Undiscounted finite-horizon Q via backward induction. The returned table is
/// the root-level Q with the full horizon remaining.
inline QTable backward_induction(const TabularModel& model, std::size_t horizon) {
    if (!model.fully_observable())
        throw InvalidModel("backward_induction expects a fully observable model");
    if (horizon == 0) throw InvalidModel("horizon must be at least 1");

    const std::size_t S = model.n_states, A = model.n_actions;
    QTable q;
    q.discount = DiscountSpec::undiscounted(horizon);
    q.values.assign(S, std::vector<double>(A, 0.0));
    std::vector<double> v(S, 0.0);
    for (std::size_t t = 0; t < horizon; ++t) {
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t a = 0; a < A; ++a) {
                double acc = model.reward[s][a];
                const auto& row = model.transition[a][s];
                for (std::size_t s2 = 0; s2 < S; ++s2)
                    if (row[s2] != 0.0) acc += row[s2] * v[s2];
                q.values[s][a] = acc;
            }
        }
        v = detail::row_max(q.values);
    }
    return q;
}

/// Hyperbolic weight density w(gamma, lambda) = (1/gamma) lambda^(1/gamma - 1),
/// the exact density for which integrating lambda^t reproduces 1/(1 + t*gamma).
inline double hyperbolic_weight_density(double gamma, double lambda) {
    return (1.0 / gamma) * std::pow(lambda, 1.0 / gamma - 1.0);
}

/// Default lambda grid for a hyperbolic mixture. Midpoints are placed uniformly
/// in u and mapped through lambda = u^gamma, which absorbs the lambda^(1/gamma-1)
/// singularity at 0 so the induced quadrature weights sum to 1 exactly.
inline std::vector<double> hyperbolic_lambda_grid(double gamma, std::size_t grid_size) {
    std::vector<double> grid(grid_size);
    for (std::size_t k = 0; k < grid_size; ++k)
        grid[k] = std::pow((k + 0.5) / static_cast<double>(grid_size), gamma);
    return grid;
}

/// Quadrature weights for an ordered lambda grid: each grid point receives the
/// exact mass of the density over its cell, w_k = F(hi_k) - F(lo_k) with
/// F(lambda) = lambda^(1/gamma). Cell boundaries sit midway between neighbours
/// in u = lambda^(1/gamma) space and extend to 0 and 1 at the ends, so the
/// weights always telescope to exactly 1.
inline std::vector<double> hyperbolic_weights(double gamma, const std::vector<double>& lambda_grid) {
    if (!(gamma > 0.0)) throw InvalidModel("gamma must be positive");
    const std::size_t n = lambda_grid.size();
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        double lam = lambda_grid[k];
        if (!(lam > 0.0 && lam < 1.0)) throw InvalidModel("lambda grid must lie strictly in (0,1)");
        if (k > 0 && lam <= lambda_grid[k - 1]) throw InvalidModel("lambda grid must be increasing");
        double u = std::pow(lam, 1.0 / gamma);
        double u_lo = k == 0 ? 0.0 : 0.5 * (u + std::pow(lambda_grid[k - 1], 1.0 / gamma));
        double u_hi = k + 1 == n ? 1.0 : 0.5 * (u + std::pow(lambda_grid[k + 1], 1.0 / gamma));
        w[k] = u_hi - u_lo;
    }
    return w;
}

/// Hyperbolic Q as the closed-form mixture of exponential Q-functions:
/// Q_gamma(s,a) = sum_k w_k Q*_{lambda_k}(s,a). The per-lambda solves are
/// independent; they run concurrently and combine in grid order.
inline QTable hyperbolic_q(const TabularModel& model, double gamma, std::size_t grid_size = 101,
                           bool parallel = true) {
    if (!model.fully_observable())
        throw InvalidModel("hyperbolic_q expects a fully observable model");
    std::vector<double> grid = hyperbolic_lambda_grid(gamma, grid_size);
    std::vector<double> weights = hyperbolic_weights(gamma, grid);

    std::vector<Matrix> per_lambda(grid_size);
    auto solve_one = [&](std::size_t k) { per_lambda[k] = detail::exact_q_lambda(model, grid[k]); };
    std::size_t workers = parallel ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : 1;
    if (workers > 1) {
        std::vector<std::future<void>> jobs;
        for (std::size_t w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t k = w; k < grid_size; k += workers) solve_one(k);
            }));
        }
        for (auto& j : jobs) j.get();
    } else {
        for (std::size_t k = 0; k < grid_size; ++k) solve_one(k);
    }

    QTable q;
    q.discount = DiscountSpec::hyperbolic(gamma);
    q.values.assign(model.n_states, std::vector<double>(model.n_actions, 0.0));
    for (std::size_t k = 0; k < grid_size; ++k)
        for (std::size_t s = 0; s < model.n_states; ++s)
            for (std::size_t a = 0; a < model.n_actions; ++a)
                q.values[s][a] += weights[k] * per_lambda[k][s][a];
    return q;
}

/// Seeded Monte Carlo rollouts of a fixed policy; returns the undiscounted
/// return per seed. Deterministic given the seed list.
inline std::vector<double> evaluate_return(const TabularModel& model, const Policy& policy,
                                           std::size_t start, std::size_t horizon,
                                           const std::vector<std::uint64_t>& seeds) {
    if (horizon < 1) throw InvalidModel("horizon must be at least 1");
    std::vector<double> out;
    out.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        auto rng = derive_stream(seed, StreamPurpose::Rollout);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::size_t s = start;
        double total = 0.0;
        for (std::size_t t = 0; t < horizon && !model.is_terminal(s); ++t) {
            std::size_t a = policy(s);
            total += model.reward[s][a];
            const auto& row = model.transition[a][s];
            double u = unif(rng), acc = 0.0;
            std::size_t s_next = model.n_states - 1;
            for (std::size_t s2 = 0; s2 < model.n_states; ++s2) {
                acc += row[s2];
                if (u < acc) { s_next = s2; break; }
            }
            s = s_next;
        }
        out.push_back(total);
    }
    return out;
}

// --- JSON caching ------------------------------------------------------------

inline nlohmann::json discount_to_json(const DiscountSpec& d) {
    switch (d.kind) {
        case DiscountKind::Exponential: return {{"kind", "exponential"}, {"lambda", d.lambda}};
        case DiscountKind::Hyperbolic: return {{"kind", "hyperbolic"}, {"gamma", d.gamma}};
        case DiscountKind::Undiscounted: return {{"kind", "undiscounted"}, {"horizon", d.horizon}};
    }
    return {};
}

inline DiscountSpec discount_from_json(const nlohmann::json& j) {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "exponential") return DiscountSpec::exponential(j.at("lambda").get<double>());
    if (kind == "hyperbolic") return DiscountSpec::hyperbolic(j.at("gamma").get<double>());
    if (kind == "undiscounted") return DiscountSpec::undiscounted(j.at("horizon").get<std::size_t>());
    throw InvalidModel("unknown discount kind: " + kind);
}

inline nlohmann::json qtable_to_json(const QTable& q) {
    return {{"values", q.values}, {"discount", discount_to_json(q.discount)}};
}

inline QTable qtable_from_json(const nlohmann::json& j) {
    QTable q;
    q.values = j.at("values").get<Matrix>();
    q.discount = discount_from_json(j.at("discount"));
    return q;
}

inline nlohmann::json policy_to_json(const Policy& p) { return {{"action", p.action}}; }

inline Policy policy_from_json(const nlohmann::json& j) {
    Policy p;
    p.action = j.at("action").get<std::vector<std::size_t>>();
    return p;
}

}  // namespace centaur
