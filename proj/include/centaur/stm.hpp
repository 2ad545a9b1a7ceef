#pragma once

#include <limits>
#include <optional>

#include "centaur/solvers.hpp"
#include "centaur/tabular_model.hpp"

namespace centaur {

struct SolvedTables {
    QTable q;
    Policy policy;
};

/// An agent's subjective task model: a POMDP surrogate, an optimality
/// criterion, and the cost the agent pays per override. Solve once, share
/// freely; the solved tables are never mutated afterwards.
struct SubjectiveTaskModel {
    TabularModel model;
    DiscountSpec criterion;
    double override_cost = 0.0;  // c_h, reward units; +inf means "never overrides"
    std::optional<SolvedTables> solved;

    bool is_solved() const { return solved.has_value(); }

    const QTable& q() const {
        if (!solved) throw UnsolvedSTM("subjective task model has not been solved");
        return solved->q;
    }
    const Policy& policy() const {
        if (!solved) throw UnsolvedSTM("subjective task model has not been solved");
        return solved->policy;
    }
};

/// Solves a fully observable STM according to its criterion and caches the
/// Q-table and greedy policy.
inline SubjectiveTaskModel solve_stm(SubjectiveTaskModel stm, std::size_t hyperbolic_grid = 101,
                                     double vi_tol = 1e-9, bool parallel = true) {
    QTable q;
    switch (stm.criterion.kind) {
        case DiscountKind::Exponential:
            q = value_iteration(stm.model, stm.criterion.lambda, vi_tol);
            break;
        case DiscountKind::Hyperbolic:
            q = hyperbolic_q(stm.model, stm.criterion.gamma, hyperbolic_grid, parallel);
            break;
        case DiscountKind::Undiscounted:
            q = backward_induction(stm.model, stm.criterion.horizon);
            break;
    }
    Policy pi = greedy_policy(q);
    stm.solved = SolvedTables{std::move(q), std::move(pi)};
    return stm;
}

/// Builds an STM around a pre-solved Q-table (e.g. loaded from a cache).
inline SubjectiveTaskModel stm_with_q(TabularModel model, QTable q, double override_cost) {
    SubjectiveTaskModel stm;
    stm.model = std::move(model);
    stm.criterion = q.discount;
    stm.override_cost = override_cost;
    Policy pi = greedy_policy(q);
    stm.solved = SolvedTables{std::move(q), std::move(pi)};
    return stm;
}

inline double never_override_cost() { return std::numeric_limits<double>::infinity(); }

}  // namespace centaur
