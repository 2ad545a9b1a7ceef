#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "centaur/moh.hpp"
#include "centaur/stm.hpp"

namespace centaur {

/// Override decisions per (state, proposed machine action): -1 for noop,
/// otherwise the override action.
struct OverrideTable {
    std::vector<std::vector<std::int16_t>> response;  // [state][a_m]
};

namespace detail {

// Finite-horizon optimal state values by plain recursion with memoization.
// Deliberately separate from the solver module so the two paths can be
// cross-checked against each other.
class FiniteHorizonValues {
public:
    FiniteHorizonValues(const TabularModel& model, std::size_t horizon)
        : model_(model), memo_(horizon + 1, std::vector<double>(model.n_states)),
          done_(horizon + 1, std::vector<bool>(model.n_states, false)) {}

    double value(std::size_t s, std::size_t t) {
        if (t == 0 || model_.is_terminal(s)) return 0.0;
        if (done_[t][s]) return memo_[t][s];
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < model_.n_actions; ++a) best = std::max(best, q(s, a, t));
        done_[t][s] = true;
        memo_[t][s] = best;
        return best;
    }

    double q(std::size_t s, std::size_t a, std::size_t t) {
        double acc = model_.reward[s][a];
        const auto& row = model_.transition[a][s];
        for (std::size_t s2 = 0; s2 < model_.n_states; ++s2)
            if (row[s2] != 0.0) acc += row[s2] * value(s2, t - 1);
        return acc;
    }

private:
    const TabularModel& model_;
    std::vector<std::vector<double>> memo_;
    std::vector<std::vector<bool>> done_;
};

}  // namespace detail

/// Exact finite-horizon expectimax over the human's best-response model, with
/// the machine term replaced by the human's own optimal policy: from the next
/// round on the machine proposes subjectively optimal actions, so the
/// continuation after any executed action is the plain optimal value.
///
/// For each (state, a_m) the human weighs noop (execute a_m, no effort cost)
/// against every override b (execute b, pay c_h). Ties go to noop. Limited to
/// small models; this is a validation oracle, not a production solver.
///
/// An explicit machine_policy replaces the human-optimal machine term: future
/// rounds then propose machine_policy(s') and the future human re-decides.
inline OverrideTable brm_oracle_solve(const SubjectiveTaskModel& stm_h, std::size_t horizon,
                                      std::optional<Policy> machine_policy = std::nullopt) {
    const TabularModel& model = stm_h.model;
    if (horizon > 10) throw ModelTooLarge("oracle horizon capped at 10");
    if (model.n_states * model.n_actions > 50)
        throw ModelTooLarge("oracle limited to 50 augmented states");
    if (horizon == 0) throw InvalidModel("horizon must be at least 1");

    const std::size_t S = model.n_states, A = model.n_actions;
    const double c_h = stm_h.override_cost;
    detail::FiniteHorizonValues values(model, horizon);

    // respond_value(s, a_m, t): the human's expectimax value of facing proposal
    // a_m at state s with t steps remaining.
    std::function<double(std::size_t, std::size_t, std::size_t)> respond_value;
    auto continuation = [&](std::size_t s_next, std::size_t t_next) -> double {
        if (t_next == 0 || model.is_terminal(s_next)) return 0.0;
        if (machine_policy) return respond_value(s_next, (*machine_policy)(s_next), t_next);
        return values.value(s_next, t_next);  // machine term = human-optimal play
    };
    auto executed_value = [&](std::size_t s, std::size_t a_c, std::size_t t) -> double {
        double acc = model.reward[s][a_c];
        const auto& row = model.transition[a_c][s];
        for (std::size_t s2 = 0; s2 < S; ++s2)
            if (row[s2] != 0.0) acc += row[s2] * continuation(s2, t - 1);
        return acc;
    };
    respond_value = [&](std::size_t s, std::size_t a_m, std::size_t t) -> double {
        double best = executed_value(s, a_m, t);  // noop
        for (std::size_t b = 0; b < A; ++b) best = std::max(best, executed_value(s, b, t) - c_h);
        return best;
    };

    OverrideTable table;
    table.response.assign(S, std::vector<std::int16_t>(A, -1));
    for (std::size_t s = 0; s < S; ++s) {
        if (model.is_terminal(s)) continue;
        for (std::size_t a_m = 0; a_m < A; ++a_m) {
            double noop_value = executed_value(s, a_m, horizon);
            double best_override = -std::numeric_limits<double>::infinity();
            std::size_t best_action = 0;
            for (std::size_t b = 0; b < A; ++b) {
                double v = executed_value(s, b, horizon) - c_h;
                if (v > best_override) { best_override = v; best_action = b; }
            }
            if (best_override > noop_value)
                table.response[s][a_m] = static_cast<std::int16_t>(best_action);
        }
    }
    return table;
}

}  // namespace centaur
