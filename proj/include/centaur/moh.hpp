#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "centaur/belief_ops.hpp"
#include "centaur/stm.hpp"

namespace centaur {

/// The human's reply to a proposed machine action: allow it (noop) or name a
/// replacement action.
struct HumanResponse {
    bool overrides = false;
    std::size_t action = 0;  // meaningful only when overrides

    static HumanResponse noop() { return {false, 0}; }
    static HumanResponse override_with(std::size_t a) { return {true, a}; }

    friend bool operator==(const HumanResponse& x, const HumanResponse& y) {
        return x.overrides == y.overrides && (!x.overrides || x.action == y.action);
    }
    friend bool operator!=(const HumanResponse& x, const HumanResponse& y) { return !(x == y); }
};

/// Internal state of the machine-optimistic human: belief in their own model,
/// the last observed machine action, and the cached override indicator for it.
struct MoHState {
    BeliefState belief;
    std::optional<std::size_t> last_machine_action;
    std::optional<bool> z;

    static MoHState at_state(std::size_t s, std::size_t n_states) {
        return {BeliefState::point_mass(s, n_states), std::nullopt, std::nullopt};
    }
};

namespace detail {

inline double belief_q(const QTable& q, const BeliefState& b, std::size_t a) {
    double acc = 0.0;
    for (std::size_t s = 0; s < b.size(); ++s)
        if (b.probs[s] != 0.0) acc += b.probs[s] * q.values[s][a];
    return acc;
}

// Greedy action at a belief, ties toward the lowest index.
inline std::size_t belief_greedy(const QTable& q, const BeliefState& b) {
    std::size_t best = 0;
    double best_v = belief_q(q, b, 0);
    for (std::size_t a = 1; a < q.n_actions(); ++a) {
        double v = belief_q(q, b, a);
        if (v > best_v) { best_v = v; best = a; }
    }
    return best;
}

}  // namespace detail

/// The override test of the machine-optimistic human: override exactly when
/// V(b) - Q(b, a_m) strictly exceeds the cost of effort.
inline bool override_indicator(const SubjectiveTaskModel& stm, const BeliefState& belief,
                               std::size_t a_m) {
    const QTable& q = stm.q();
    std::size_t best = detail::belief_greedy(q, belief);
    double gap = detail::belief_q(q, belief, best) - detail::belief_q(q, belief, a_m);
    return gap > stm.override_cost;
}

/// The machine-optimistic human's response to a proposed action. When
/// overriding, the replacement is always the subjectively greedy action.
inline HumanResponse moh_respond(const SubjectiveTaskModel& stm, const MoHState& state,
                                 std::size_t a_m) {
    const QTable& q = stm.q();
    std::size_t best = detail::belief_greedy(q, state.belief);
    double gap = detail::belief_q(q, state.belief, best) - detail::belief_q(q, state.belief, a_m);
    if (gap > stm.override_cost) return HumanResponse::override_with(best);
    return HumanResponse::noop();
}

/// Advances the human's internal state after the centaur action executed and
/// an observation arrived. The human filters with their own model; fully
/// observable models collapse to a point mass on the observed state.
inline MoHState moh_belief_step(const SubjectiveTaskModel& stm, const MoHState& state,
                                std::size_t a_c, std::size_t o) {
    MoHState next;
    if (stm.model.fully_observable()) {
        if (o >= stm.model.n_states) throw InvalidModel("observed state index out of range");
        next.belief = BeliefState::point_mass(o, stm.model.n_states);
    } else {
        next.belief = belief_update(stm.model, state.belief, a_c, o);
    }
    return next;
}

/// Canonical byte-comparable table of (override?, override action) over the
/// probe set. Two STMs with equal signatures induce the same override policy
/// on those states, which is the finest structure overrides can identify.
using BehaviouralSignature = std::string;

inline BehaviouralSignature behavioural_signature(const SubjectiveTaskModel& stm,
                                                  const std::vector<std::size_t>& probe_states) {
    if (!stm.model.fully_observable())
        throw InvalidModel("behavioural_signature expects a fully observable model");
    const QTable& q = stm.q();
    BehaviouralSignature sig;
    sig.reserve(probe_states.size() * stm.model.n_actions);
    for (std::size_t s : probe_states) {
        BeliefState b = BeliefState::point_mass(s, stm.model.n_states);
        for (std::size_t a_m = 0; a_m < stm.model.n_actions; ++a_m) {
            std::size_t best = detail::belief_greedy(q, b);
            double gap = q.values[s][best] - q.values[s][a_m];
            sig.push_back(gap > stm.override_cost ? static_cast<char>(best + 1)
                                                  : static_cast<char>(0));
        }
    }
    return sig;
}

inline std::vector<std::size_t> non_terminal_states(const TabularModel& model) {
    std::vector<std::size_t> states;
    for (std::size_t s = 0; s < model.n_states; ++s)
        if (!model.is_terminal(s)) states.push_back(s);
    return states;
}

inline BehaviouralSignature behavioural_signature(const SubjectiveTaskModel& stm) {
    return behavioural_signature(stm, non_terminal_states(stm.model));
}

/// Precomputed responses for every (state, machine action) pair of a solved,
/// fully observable STM. Entry -1 encodes noop, otherwise the override action.
/// This is the lookup the planner's generative simulations run on.
struct ResponseTable {
    std::vector<std::vector<std::int16_t>> response;  // [state][a_m]

    HumanResponse operator()(std::size_t s, std::size_t a_m) const {
        std::int16_t r = response[s][a_m];
        return r < 0 ? HumanResponse::noop() : HumanResponse::override_with(static_cast<std::size_t>(r));
    }
};

inline ResponseTable make_response_table(const SubjectiveTaskModel& stm) {
    const QTable& q = stm.q();
    const std::size_t S = stm.model.n_states, A = stm.model.n_actions;
    ResponseTable table;
    table.response.assign(S, std::vector<std::int16_t>(A, -1));
    for (std::size_t s = 0; s < S; ++s) {
        if (stm.model.is_terminal(s)) continue;
        std::size_t best = 0;
        for (std::size_t a = 1; a < A; ++a)
            if (q.values[s][a] > q.values[s][best]) best = a;
        for (std::size_t a_m = 0; a_m < A; ++a_m) {
            double gap = q.values[s][best] - q.values[s][a_m];
            if (gap > stm.override_cost) table.response[s][a_m] = static_cast<std::int16_t>(best);
        }
    }
    return table;
}

}  // namespace centaur
