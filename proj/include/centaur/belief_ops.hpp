#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "centaur/tabular_model.hpp"

namespace centaur {

// KL(b1 || b2) = +infinity whenever b1 puts mass where b2 has none. Infinity is
// a value here, not an error; it propagates through comparisons.
inline constexpr double kInfiniteKL = std::numeric_limits<double>::infinity();

inline void check_action(const TabularModel& model, std::size_t a) {
    if (a >= model.n_actions)
        throw InvalidModel("action index " + std::to_string(a) + " out of range");
}

/// Propagates a belief through the transition model: (b')(s) = sum_s' b(s') T(s|s',a).
inline BeliefState belief_propagate(const TabularModel& model, const BeliefState& b, std::size_t a) {
    check_action(model, a);
    BeliefState out;
    out.probs.assign(model.n_states, 0.0);
    const Matrix& t = model.transition[a];
    for (std::size_t s_prev = 0; s_prev < model.n_states; ++s_prev) {
        double p = b.probs[s_prev];
        if (p == 0.0) continue;
        const auto& row = t[s_prev];
        for (std::size_t s = 0; s < model.n_states; ++s) out.probs[s] += p * row[s];
    }
    renormalize_belief(out);
    return out;
}

/// Conditions a belief on an observation: result(s) proportional to b(s) O(o|s,a).
inline BeliefState belief_condition(const TabularModel& model, const BeliefState& b, std::size_t a,
                                    std::size_t o) {
    check_action(model, a);
    if (model.fully_observable())
        throw InvalidModel("belief_condition on a fully observable model");
    if (o >= model.n_observations) throw InvalidModel("observation index out of range");
    BeliefState out;
    out.probs.assign(model.n_states, 0.0);
    double norm = 0.0;
    for (std::size_t s = 0; s < model.n_states; ++s) {
        double v = b.probs[s] * model.observation[a][s][o];
        out.probs[s] = v;
        norm += v;
    }
    if (norm <= 0.0)
        throw ZeroLikelihoodObservation("observation " + std::to_string(o) +
                                        " has zero likelihood under the belief");
    for (double& p : out.probs) p /= norm;
    return out;
}

/// One filtering step: condition(propagate(b, a), a, o).
inline BeliefState belief_update(const TabularModel& model, const BeliefState& b, std::size_t a,
                                 std::size_t o) {
    return belief_condition(model, belief_propagate(model, b, a), a, o);
}

/// KL divergence in nats, with 0 log 0 = 0.
inline double kl_divergence(const BeliefState& b1, const BeliefState& b2) {
    double kl = 0.0;
    for (std::size_t s = 0; s < b1.size(); ++s) {
        double p = b1.probs[s];
        if (p == 0.0) continue;
        double q = b2.probs[s];
        if (q == 0.0) return kInfiniteKL;
        kl += p * std::log(p / q);
    }
    // Tiny negative values arise from rounding when b1 ~ b2.
    return kl < 0.0 && kl > -1e-12 ? 0.0 : kl;
}

}  // namespace centaur
