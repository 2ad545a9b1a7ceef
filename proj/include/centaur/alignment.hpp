#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "centaur/belief_ops.hpp"
#include "centaur/rng.hpp"
#include "centaur/tabular_model.hpp"

namespace centaur {

namespace detail {

inline void check_row_stochastic(const Matrix& m, const char* what) {
    if (m.empty()) throw NonStochasticMatrix(std::string(what) + ": empty matrix");
    for (const auto& row : m) {
        double sum = 0.0;
        for (double v : row) {
            if (v < 0.0) throw NonStochasticMatrix(std::string(what) + ": negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw NonStochasticMatrix(std::string(what) + ": row sum " + std::to_string(sum));
    }
}

// Minimal dense two-phase simplex for
//   min c^T y  s.t.  A y = b, y >= 0,  b >= 0,
// with Bland's rule. Only intended for the tiny LPs in this module.
class SimplexLP {
public:
    // Returns nullopt when infeasible; unbounded problems throw.
    static std::optional<double> solve(const Matrix& a, const std::vector<double>& b,
                                       const std::vector<double>& c) {
        const std::size_t rows = b.size(), cols = c.size();
        // Tableau columns: original variables, one artificial per row, rhs.
        Matrix t(rows, std::vector<double>(cols + rows + 1, 0.0));
        std::vector<std::size_t> basis(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < cols; ++j) t[r][j] = a[r][j];
            t[r][cols + r] = 1.0;
            t[r].back() = b[r];
            basis[r] = cols + r;
        }
        // Phase 1: minimize the sum of the artificials (reduced against the
        // all-artificial starting basis).
        std::vector<double> obj(cols + rows + 1, 0.0);
        for (std::size_t j = cols; j < cols + rows; ++j) obj[j] = 1.0;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < obj.size(); ++j) obj[j] -= t[r][j];
        run(t, obj, basis, cols + rows);
        if (-obj.back() > 1e-8) return std::nullopt;  // infeasible

        // Pivot leftover zero-level artificials out of the basis.
        for (std::size_t r = 0; r < rows; ++r) {
            if (basis[r] < cols) continue;
            for (std::size_t j = 0; j < cols; ++j) {
                if (std::abs(t[r][j]) > 1e-9) {
                    pivot(t, obj, basis, r, j);
                    break;
                }
            }
        }

        // Phase 2: the original objective, artificial columns excluded.
        std::vector<double> obj2(cols + rows + 1, 0.0);
        for (std::size_t j = 0; j < cols; ++j) obj2[j] = c[j];
        for (std::size_t r = 0; r < rows; ++r) {
            if (basis[r] >= cols) continue;
            double f = obj2[basis[r]];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < obj2.size(); ++j) obj2[j] -= f * t[r][j];
        }
        run(t, obj2, basis, cols);
        return -obj2.back();
    }

private:
    static void run(Matrix& t, std::vector<double>& obj, std::vector<std::size_t>& basis,
                    std::size_t usable_cols) {
        const std::size_t n_rows = basis.size();
        for (int guard = 0; guard < 20000; ++guard) {
            // Bland: the first column with a clearly negative reduced cost
            // enters. Columns whose pivot candidates are all numerically zero
            // are roundoff artifacts on this compact feasible set; skip them.
            std::size_t enter = SIZE_MAX, leave = SIZE_MAX;
            double best_ratio = 0.0;
            for (std::size_t j = 0; j < usable_cols && enter == SIZE_MAX; ++j) {
                if (obj[j] >= -1e-9) continue;
                std::size_t cand = SIZE_MAX;
                double cand_ratio = 0.0;
                for (std::size_t r = 0; r < n_rows; ++r) {
                    if (t[r][j] <= 1e-11) continue;
                    double ratio = t[r].back() / t[r][j];
                    if (cand == SIZE_MAX || ratio < cand_ratio - 1e-12 ||
                        (std::abs(ratio - cand_ratio) <= 1e-12 && basis[r] < basis[cand])) {
                        cand = r;
                        cand_ratio = ratio;
                    }
                }
                if (cand != SIZE_MAX) {
                    enter = j;
                    leave = cand;
                    best_ratio = cand_ratio;
                }
            }
            if (enter == SIZE_MAX) return;
            (void)best_ratio;
            pivot(t, obj, basis, leave, enter);
        }
        throw NonconvergenceAfterMaxIterations("simplex exceeded pivot budget");
    }

    static void pivot(Matrix& t, std::vector<double>& obj, std::vector<std::size_t>& basis,
                      std::size_t row, std::size_t col) {
        double p = t[row][col];
        for (double& v : t[row]) v /= p;
        for (std::size_t r = 0; r < t.size(); ++r) {
            if (r == row) continue;
            double f = t[r][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < t[r].size(); ++j) t[r][j] -= f * t[row][j];
        }
        double f = obj[col];
        if (f != 0.0)
            for (std::size_t j = 0; j < obj.size(); ++j) obj[j] -= f * t[row][j];
        basis[row] = col;
    }
};

// min sum_j |(M x)_j| over the sign-orthant x = tau * u, sum u = 1, u >= 0,
// written as an LP with epigraph variables t_j >= |(M x)_j|.
// M is n_obs x n_states (the transpose of the observation matrix).
inline std::optional<double> orthant_min_l1(const Matrix& m_t, const std::vector<int>& tau) {
    const std::size_t n_obs = m_t.size(), n = tau.size();
    const std::size_t n_vars = n + 3 * n_obs;  // u, t, two slack blocks
    Matrix a;
    std::vector<double> b;
    // sum u = 1
    {
        std::vector<double> row(n_vars, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = 1.0;
        a.push_back(row);
        b.push_back(1.0);
    }
    // t_j - (M x)_j - s1_j = 0 ;  t_j + (M x)_j - s2_j = 0
    for (std::size_t j = 0; j < n_obs; ++j) {
        std::vector<double> r1(n_vars, 0.0), r2(n_vars, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double coeff = m_t[j][i] * tau[i];
            r1[i] = -coeff;
            r2[i] = coeff;
        }
        r1[n + j] = 1.0;
        r2[n + j] = 1.0;
        r1[n + n_obs + j] = -1.0;
        r2[n + 2 * n_obs + j] = -1.0;
        a.push_back(r1);
        b.push_back(0.0);
        a.push_back(r2);
        b.push_back(0.0);
    }
    std::vector<double> c(n_vars, 0.0);
    for (std::size_t j = 0; j < n_obs; ++j) c[n + j] = 1.0;
    return SimplexLP::solve(a, b, c);
}

}  // namespace detail

/// Worst-case overlap between any two rows' next-state distributions
/// (Boyen-Koller): min over state pairs of sum_s' min(T(s'|s1), T(s'|s2)).
inline double minimal_mixing_rate(const Matrix& transition) {
    detail::check_row_stochastic(transition, "minimal_mixing_rate");
    const std::size_t n = transition.size();
    double alpha = 1.0;
    for (std::size_t s1 = 0; s1 < n; ++s1)
        for (std::size_t s2 = s1 + 1; s2 < n; ++s2) {
            double overlap = 0.0;
            for (std::size_t s = 0; s < transition[s1].size(); ++s)
                overlap += std::min(transition[s1][s], transition[s2][s]);
            alpha = std::min(alpha, overlap);
        }
    return n <= 1 ? 1.0 : alpha;
}

struct ValueOfObservation {
    double value = 0.0;
    bool exact = true;  // false: multi-restart local search, an upper bound only
};

inline constexpr std::size_t kExactValueOfObservationLimit = 12;

/// Value of observation of an HMM observation matrix O (rows O(.|s)):
/// inf over ||x||_1 = 1 of ||O^T x||_1. Exact method: one small LP per sign
/// orthant of x (the objective is piecewise linear on each orthant slice of
/// the l1 sphere), minimum over the 2^n patterns. Falls back to a multi-start
/// local search above the dimension cap, reported as an upper bound.
inline ValueOfObservation value_of_observation(const Matrix& observation,
                                               bool allow_fallback = true,
                                               std::uint64_t fallback_seed = 0) {
    detail::check_row_stochastic(observation, "value_of_observation");
    const std::size_t n = observation.size();
    const std::size_t n_obs = observation[0].size();

    // M = O^T maps state-indexed vectors to observation-indexed vectors.
    Matrix m_t(n_obs, std::vector<double>(n, 0.0));
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t o = 0; o < n_obs; ++o) m_t[o][s] = observation[s][o];

    if (n <= kExactValueOfObservationLimit && n_obs <= kExactValueOfObservationLimit) {
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> tau(n, 1);
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            for (std::size_t i = 0; i < n; ++i) tau[i] = (mask >> i) & 1 ? -1 : 1;
            auto v = detail::orthant_min_l1(m_t, tau);
            if (v) best = std::min(best, *v);
        }
        return {std::max(0.0, best), true};
    }
    if (!allow_fallback)
        throw DimensionTooLargeForExact("value_of_observation exact method capped at dimension " +
                                        std::to_string(kExactValueOfObservationLimit));

    // Fallback: projected multi-restart local search on the l1 sphere.
    auto rng = derive_stream(fallback_seed, StreamPurpose::InstanceGeneration);
    auto objective = [&](const std::vector<double>& x) {
        double total = 0.0;
        for (std::size_t o = 0; o < n_obs; ++o) {
            double acc = 0.0;
            for (std::size_t s = 0; s < n; ++s) acc += m_t[o][s] * x[s];
            total += std::abs(acc);
        }
        return total;
    };
    auto normalize = [&](std::vector<double>& x) {
        double l1 = 0.0;
        for (double v : x) l1 += std::abs(v);
        if (l1 == 0.0) x[0] = 1.0;
        else
            for (double& v : x) v /= l1;
    };
    std::normal_distribution<double> gauss(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 24; ++restart) {
        std::vector<double> x(n);
        for (double& v : x) v = gauss(rng);
        normalize(x);
        double cur = objective(x);
        double step = 0.5;
        while (step > 1e-7) {
            bool improved = false;
            for (std::size_t i = 0; i < n; ++i) {
                for (double dir : {step, -step}) {
                    std::vector<double> y = x;
                    y[i] += dir;
                    normalize(y);
                    double v = objective(y);
                    if (v < cur - 1e-14) {
                        cur = v;
                        x = std::move(y);
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        best = std::min(best, cur);
    }
    return {best, false};
}

/// Rank of a deterministic (one-hot rows) transition matrix over the
/// rationals, i.e. the number of distinct target columns, plus the
/// permutation test rank == n.
inline std::pair<std::size_t, bool> deterministic_rank_check(const Matrix& transition) {
    detail::check_row_stochastic(transition, "deterministic_rank_check");
    std::set<std::size_t> targets;
    for (const auto& row : transition) {
        std::size_t hits = 0, target = 0;
        for (std::size_t s = 0; s < row.size(); ++s) {
            if (row[s] == 1.0) { target = s; ++hits; }
            else if (row[s] != 0.0)
                throw NotDeterministic("row is not one-hot");
        }
        if (hits != 1) throw NotDeterministic("row is not one-hot");
        targets.insert(target);
    }
    return {targets.size(), targets.size() == transition.size()};
}

// Belief pushforward through a row-stochastic transition: b'(s') = sum_s b(s) T(s'|s).
inline BeliefState propagate_through(const Matrix& transition, const BeliefState& b) {
    BeliefState out;
    out.probs.assign(transition[0].size(), 0.0);
    for (std::size_t s = 0; s < b.size(); ++s) {
        if (b.probs[s] == 0.0) continue;
        for (std::size_t s2 = 0; s2 < transition[s].size(); ++s2)
            out.probs[s2] += b.probs[s] * transition[s][s2];
    }
    return out;
}

struct ContractionCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Boyen-Koller contraction: KL(Tb1 || Tb2) <= (1 - alpha(T)) KL(b1 || b2).
inline ContractionCheck bk_contraction_check(const Matrix& transition, const BeliefState& b1,
                                             const BeliefState& b2, double tol = 1e-9) {
    ContractionCheck out;
    out.lhs = kl_divergence(propagate_through(transition, b1), propagate_through(transition, b2));
    double alpha = minimal_mixing_rate(transition);
    double kl = kl_divergence(b1, b2);
    out.rhs = (1.0 - alpha) * kl;
    out.holds = out.lhs <= out.rhs + tol;
    return out;
}

/// Hidden Markov model induced by fixing the centaur policy in a POMDP, with
/// the true (machine) and approximate (human) observation models attached.
struct InducedHMM {
    Matrix transition;          // T(s'|s) under the fixed policy, row-stochastic
    Matrix observation_true;    // O_m(o|s)
    Matrix observation_approx;  // O_h(o|s)
    double epsilon_O = 0.0;     // max_s KL(O_m(.|s) || O_h(.|s))
    bool policy_dependent_observation = false;
};

inline double max_row_kl(const Matrix& p, const Matrix& q) {
    double worst = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        BeliefState a{p[s]}, b{q[s]};
        worst = std::max(worst, kl_divergence(a, b));
    }
    return worst;
}

/// Fixes a per-state centaur action in a POMDP: T^pi(s'|s) = T(s'|s, pi(s)).
/// The observation at a destination state uses the action that leads there
/// under the policy evaluated at the destination; instances where that matters
/// (a non-constant policy with action-dependent O) are flagged.
inline InducedHMM induce_hmm(const TabularModel& pomdp, const std::vector<std::size_t>& policy,
                             const Matrix* observation_approx = nullptr) {
    if (pomdp.fully_observable()) throw InvalidModel("induce_hmm needs a partially observable model");
    if (policy.size() != pomdp.n_states) throw InvalidModel("policy size mismatch");
    InducedHMM hmm;
    hmm.transition.assign(pomdp.n_states, std::vector<double>(pomdp.n_states, 0.0));
    hmm.observation_true.assign(pomdp.n_states, std::vector<double>(pomdp.n_observations, 0.0));
    bool constant_policy = true;
    for (std::size_t s = 0; s < pomdp.n_states; ++s) {
        if (policy[s] >= pomdp.n_actions) throw InvalidModel("policy action out of range");
        if (policy[s] != policy[0]) constant_policy = false;
        hmm.transition[s] = pomdp.transition[policy[s]][s];
    }
    bool action_dependent_obs = false;
    for (std::size_t s = 0; s < pomdp.n_states; ++s) {
        hmm.observation_true[s] = pomdp.observation[policy[s]][s];
        for (std::size_t a = 1; a < pomdp.n_actions && !action_dependent_obs; ++a)
            if (pomdp.observation[a][s] != pomdp.observation[0][s]) action_dependent_obs = true;
    }
    hmm.policy_dependent_observation = !constant_policy && action_dependent_obs;
    hmm.observation_approx = observation_approx ? *observation_approx : hmm.observation_true;
    hmm.epsilon_O = max_row_kl(hmm.observation_true, hmm.observation_approx);
    return hmm;
}

inline InducedHMM induce_hmm(const TabularModel& pomdp, std::size_t constant_action,
                             const Matrix* observation_approx = nullptr) {
    return induce_hmm(pomdp, std::vector<std::size_t>(pomdp.n_states, constant_action),
                      observation_approx);
}

/// One belief-alignment bound evaluation.
struct BoundReport {
    double lhs = 0.0;        // exact expected post-update KL under O_m
    double rhs = 0.0;        // bound value
    double alpha = 0.0;      // minimal mixing rate of the induced transition
    double gamma_obs = 0.0;  // value of observation of O_m
    double mu = 0.0;
    double epsilon_O = 0.0;
    double kl_before = 0.0;
    bool gamma_exact = true;
    bool holds = false;
    std::optional<double> monte_carlo_lhs;  // sampled cross-check when requested
};

/// Mixes a belief with the uniform distribution just enough to guarantee
/// b(s) >= mu everywhere.
inline BeliefState floor_belief(const BeliefState& b, double mu) {
    const std::size_t n = b.size();
    double delta = mu * static_cast<double>(n);
    if (delta >= 1.0) throw InvalidModel("mu too large for the state space");
    BeliefState out = b;
    for (double& p : out.probs) p = (1.0 - delta) * p + mu;
    return out;
}

/// Numerical check of the one-step belief-alignment bound:
///   E_o[KL(b'_m || b'_h)] <= (1 - alpha) KL(b_m || b_h)
///                            + 3 gamma sqrt(eps_O)
///                            - (gamma KL(b_m || b_h) / (sqrt(2) log(1/mu)))^2.
/// The expectation over observations is computed exactly; n_samples > 0 adds a
/// Monte Carlo cross-check of the same expectation.
inline BoundReport theorem_6_4_check(const InducedHMM& hmm, const BeliefState& b_m,
                                     const BeliefState& b_h, double mu,
                                     std::size_t n_samples = 0, std::uint64_t seed = 0,
                                     double tol = 1e-7) {
    for (double p : b_m.probs)
        if (p < mu - 1e-12) throw BeliefFloorViolated("b_m entry below mu");
    for (double p : b_h.probs)
        if (p < mu - 1e-12) throw BeliefFloorViolated("b_h entry below mu");

    BoundReport report;
    report.mu = mu;
    report.epsilon_O = hmm.epsilon_O;
    report.kl_before = kl_divergence(b_m, b_h);
    report.alpha = minimal_mixing_rate(hmm.transition);
    auto gamma = value_of_observation(hmm.observation_true);
    report.gamma_obs = gamma.value;
    report.gamma_exact = gamma.exact;

    BeliefState tm = propagate_through(hmm.transition, b_m);
    BeliefState th = propagate_through(hmm.transition, b_h);
    const std::size_t n_obs = hmm.observation_true[0].size();

    auto condition = [&](const BeliefState& b, const Matrix& obs, std::size_t o) {
        BeliefState out;
        out.probs.assign(b.size(), 0.0);
        double norm = 0.0;
        for (std::size_t s = 0; s < b.size(); ++s) {
            out.probs[s] = b.probs[s] * obs[s][o];
            norm += out.probs[s];
        }
        if (norm <= 0.0) throw ZeroLikelihoodObservation("conditioning wiped the belief out");
        for (double& p : out.probs) p /= norm;
        return out;
    };

    std::vector<double> obs_prob(n_obs, 0.0);
    double lhs = 0.0;
    for (std::size_t o = 0; o < n_obs; ++o) {
        for (std::size_t s = 0; s < tm.size(); ++s) obs_prob[o] += tm.probs[s] * hmm.observation_true[s][o];
        if (obs_prob[o] <= 0.0) continue;
        double kl = kl_divergence(condition(tm, hmm.observation_true, o),
                                  condition(th, hmm.observation_approx, o));
        lhs += obs_prob[o] * kl;
    }
    report.lhs = lhs;

    double log_term = std::sqrt(2.0) * std::log(1.0 / mu);
    double penalty = report.gamma_obs * report.kl_before / log_term;
    report.rhs = (1.0 - report.alpha) * report.kl_before +
                 3.0 * report.gamma_obs * std::sqrt(hmm.epsilon_O) - penalty * penalty;
    report.holds = report.lhs <= report.rhs + tol;

    if (n_samples > 0) {
        auto rng = derive_stream(seed, StreamPurpose::InstanceGeneration, 1);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double acc = 0.0;
        for (std::size_t i = 0; i < n_samples; ++i) {
            double u = unif(rng), cum = 0.0;
            std::size_t o = n_obs - 1;
            for (std::size_t j = 0; j < n_obs; ++j) {
                cum += obs_prob[j];
                if (u < cum) { o = j; break; }
            }
            acc += kl_divergence(condition(tm, hmm.observation_true, o),
                                 condition(th, hmm.observation_approx, o));
        }
        report.monte_carlo_lhs = acc / static_cast<double>(n_samples);
    }
    return report;
}

struct AlignmentInstance {
    InducedHMM hmm;
    BeliefState b_m, b_h;
};

/// A random HMM meeting the preconditions of the one-step alignment bound:
/// transitions keep propagated beliefs above mu, the human's observation model
/// stays within eps_max per-state KL of the true one, both beliefs are floored
/// at mu, and the true observation model is informative enough for the
/// correction terms, gamma(O_m) >= sqrt(eps_O) / 3. (With a near-uninformative
/// O_m the 3*gamma*sqrt(eps_O) budget shrinks below the divergence that
/// conditioning with two different models injects and the bound has no room
/// left; the equal-beliefs corner pins exactly this threshold.)
inline AlignmentInstance random_alignment_instance(std::mt19937_64& rng, std::size_t max_states,
                                                   std::size_t max_obs, double eps_max,
                                                   double mu) {
    auto stochastic_row = [&](std::size_t n, double min_entry) {
        std::uniform_real_distribution<double> unif(min_entry, 1.0);
        std::vector<double> row(n);
        double sum = 0.0;
        for (double& v : row) { v = unif(rng); sum += v; }
        for (double& v : row) v /= sum;
        return row;
    };
    auto stochastic = [&](std::size_t rows, std::size_t cols, double min_entry) {
        Matrix m(rows);
        for (auto& row : m) row = stochastic_row(cols, min_entry);
        return m;
    };
    std::uniform_int_distribution<std::size_t> pick_states(2, max_states), pick_obs(2, max_obs);
    for (int attempt = 0; attempt < 256; ++attempt) {
        std::size_t n = pick_states(rng), m = pick_obs(rng);

        AlignmentInstance inst;
        inst.hmm.transition = stochastic(n, n, 0.05);
        // Sharpened rows keep the value of observation away from zero.
        inst.hmm.observation_true.assign(n, std::vector<double>(m, 0.0));
        std::uniform_real_distribution<double> sharp(0.55, 0.95);
        std::uniform_int_distribution<std::size_t> pick_col(0, m - 1);
        for (std::size_t s = 0; s < n; ++s) {
            double peak = sharp(rng);
            std::size_t col = pick_col(rng);
            auto soft = stochastic_row(m, 0.05);
            for (std::size_t o = 0; o < m; ++o)
                inst.hmm.observation_true[s][o] = (o == col ? peak : 0.0) + (1.0 - peak) * soft[o];
        }

        // Shrink a random mixture toward O_m until the per-state KL budget holds.
        Matrix other = stochastic(n, m, 0.02);
        std::uniform_real_distribution<double> pick_delta(0.0, 0.6);
        double delta = pick_delta(rng);
        inst.hmm.observation_approx = inst.hmm.observation_true;
        for (int tries = 0; tries < 64; ++tries) {
            Matrix mix(n, std::vector<double>(m));
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t o = 0; o < m; ++o)
                    mix[s][o] =
                        (1.0 - delta) * inst.hmm.observation_true[s][o] + delta * other[s][o];
            if (max_row_kl(inst.hmm.observation_true, mix) <= eps_max) {
                inst.hmm.observation_approx = std::move(mix);
                break;
            }
            delta *= 0.7;
        }
        inst.hmm.epsilon_O = max_row_kl(inst.hmm.observation_true, inst.hmm.observation_approx);

        double gamma = value_of_observation(inst.hmm.observation_true).value;
        if (gamma < std::sqrt(inst.hmm.epsilon_O) / 3.0) continue;

        inst.b_m = floor_belief(BeliefState{stochastic_row(n, 0.0)}, mu);
        inst.b_h = floor_belief(BeliefState{stochastic_row(n, 0.0)}, mu);
        return inst;
    }
    throw InvalidModel("could not generate an informative alignment instance");
}

/// RockSample-style static HMM over rock qualities: 2^n_rocks hidden states,
/// identity transitions (moving never changes rock quality), and a binary
/// good/bad measurement of rock 0 whose correctness decays exponentially with
/// the measurement distance: p = (1 + 2^(-distance/efficiency)) / 2.
inline InducedHMM build_rocksample_hmm(std::size_t n_rocks, double sensor_efficiency_m,
                                       double sensor_efficiency_h, double distance) {
    if (n_rocks == 0 || n_rocks > 4) throw TooManyRocks("n_rocks must lie in [1,4]");
    auto correctness = [&](double efficiency) {
        if (distance <= 0.0) return 1.0;
        if (efficiency <= 0.0) return 0.5;
        return 0.5 * (1.0 + std::pow(2.0, -distance / efficiency));
    };
    const std::size_t S = std::size_t{1} << n_rocks;
    InducedHMM hmm;
    hmm.transition.assign(S, std::vector<double>(S, 0.0));
    for (std::size_t s = 0; s < S; ++s) hmm.transition[s][s] = 1.0;
    auto fill = [&](Matrix& obs, double p) {
        obs.assign(S, std::vector<double>(2, 0.0));
        for (std::size_t s = 0; s < S; ++s) {
            bool good = s & 1;  // rock 0 quality
            obs[s][0] = good ? p : 1.0 - p;  // observation 0 = "good"
            obs[s][1] = good ? 1.0 - p : p;
        }
    };
    fill(hmm.observation_true, correctness(sensor_efficiency_m));
    fill(hmm.observation_approx, correctness(sensor_efficiency_h));
    hmm.epsilon_O = max_row_kl(hmm.observation_true, hmm.observation_approx);
    return hmm;
}

}  // namespace centaur
