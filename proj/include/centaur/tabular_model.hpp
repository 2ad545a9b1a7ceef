#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "centaur/errors.hpp"

namespace centaur {

using Matrix = std::vector<std::vector<double>>;          // [row][col]
using ActionMatrix = std::vector<Matrix>;                 // [action][row][col]

inline constexpr double kRowSumTolerance = 1e-9;

/// Finite POMDP/MDP with dense per-action tables. n_observations == 0 marks a
/// fully observable model; the observation tables are then absent and beliefs
/// degenerate to point masses.
struct TabularModel {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::size_t n_observations = 0;
    ActionMatrix transition;       // transition[a][s][s'] = T(s'|s,a)
    ActionMatrix observation;      // observation[a][s'][o] = O(o|s',a); empty when fully observable
    Matrix reward;                 // reward[s][a] = R(s,a), task-reward units
    std::set<std::size_t> terminal;

    bool fully_observable() const { return n_observations == 0; }
    bool is_terminal(std::size_t s) const { return terminal.count(s) > 0; }
};

inline void check_stochastic_rows(const Matrix& m, std::size_t n_cols, const std::string& what) {
    for (std::size_t r = 0; r < m.size(); ++r) {
        if (m[r].size() != n_cols)
            throw InvalidModel(what + ": row " + std::to_string(r) + " has wrong width");
        double sum = 0.0;
        for (double v : m[r]) {
            if (v < 0.0) throw InvalidModel(what + ": negative entry in row " + std::to_string(r));
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw InvalidModel(what + ": row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
}

inline void validate_model(const TabularModel& m) {
    if (m.n_states == 0 || m.n_actions == 0) throw InvalidModel("empty state or action space");
    if (m.transition.size() != m.n_actions) throw InvalidModel("transition: wrong action count");
    for (std::size_t a = 0; a < m.n_actions; ++a) {
        if (m.transition[a].size() != m.n_states) throw InvalidModel("transition: wrong state count");
        check_stochastic_rows(m.transition[a], m.n_states, "transition[a=" + std::to_string(a) + "]");
    }
    if (!m.fully_observable()) {
        if (m.observation.size() != m.n_actions) throw InvalidModel("observation: wrong action count");
        for (std::size_t a = 0; a < m.n_actions; ++a) {
            if (m.observation[a].size() != m.n_states)
                throw InvalidModel("observation: wrong state count");
            check_stochastic_rows(m.observation[a], m.n_observations,
                                  "observation[a=" + std::to_string(a) + "]");
        }
    }
    if (m.reward.size() != m.n_states) throw InvalidModel("reward: wrong state count");
    for (const auto& row : m.reward)
        if (row.size() != m.n_actions) throw InvalidModel("reward: wrong action count");
    for (std::size_t s : m.terminal) {
        if (s >= m.n_states) throw InvalidModel("terminal state out of range");
        for (std::size_t a = 0; a < m.n_actions; ++a) {
            if (std::abs(m.transition[a][s][s] - 1.0) > kRowSumTolerance)
                throw InvalidModel("terminal state " + std::to_string(s) + " does not self-loop");
            if (m.reward[s][a] != 0.0)
                throw InvalidModel("terminal state " + std::to_string(s) + " has nonzero reward");
        }
    }
}

/// Probability vector over states.
struct BeliefState {
    std::vector<double> probs;

    static BeliefState point_mass(std::size_t s, std::size_t n_states) {
        BeliefState b;
        b.probs.assign(n_states, 0.0);
        b.probs[s] = 1.0;
        return b;
    }

    std::size_t size() const { return probs.size(); }
    double operator[](std::size_t s) const { return probs[s]; }
};

inline bool belief_valid(const BeliefState& b, double tol = kRowSumTolerance) {
    double sum = 0.0;
    for (double p : b.probs) {
        if (p < 0.0) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
}

// Renormalizes in place; asserts the pre-normalization drift stays small.
inline void renormalize_belief(BeliefState& b, double drift_tol = 1e-6) {
    double sum = 0.0;
    for (double p : b.probs) sum += p;
    if (std::abs(sum - 1.0) > drift_tol)
        throw InvalidModel("belief drifted beyond tolerance: sum = " + std::to_string(sum));
    for (double& p : b.probs) p /= sum;
}

// --- JSON serialization -----------------------------------------------------
// Schema: {"n_states", "n_actions", "n_observations", "transition":[[[...]]],
//          "observation":..., "reward":[[...]], "terminal":[...]}
// Nesting order is action -> state -> next-state (or observation).

inline nlohmann::json model_to_json(const TabularModel& m) {
    nlohmann::json j;
    j["n_states"] = m.n_states;
    j["n_actions"] = m.n_actions;
    j["n_observations"] = m.n_observations;
    j["transition"] = m.transition;
    if (!m.fully_observable())
        j["observation"] = m.observation;
    j["reward"] = m.reward;
    j["terminal"] = std::vector<std::size_t>(m.terminal.begin(), m.terminal.end());
    return j;
}

inline TabularModel model_from_json(const nlohmann::json& j) {
    TabularModel m;
    m.n_states = j.at("n_states").get<std::size_t>();
    m.n_actions = j.at("n_actions").get<std::size_t>();
    m.n_observations = j.value("n_observations", std::size_t{0});
    m.transition = j.at("transition").get<ActionMatrix>();
    if (m.n_observations > 0) m.observation = j.at("observation").get<ActionMatrix>();
    m.reward = j.at("reward").get<Matrix>();
    for (auto s : j.value("terminal", std::vector<std::size_t>{})) m.terminal.insert(s);
    validate_model(m);
    return m;
}

}  // namespace centaur
