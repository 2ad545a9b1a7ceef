#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "centaur/errors.hpp"

namespace centaur {

/// Dirichlet transition-observation counts indexed by (s, a, s', o). Counts
/// only grow: each update increments exactly one cell by 1.
class DirichletCounts {
public:
    DirichletCounts(std::size_t n_states, std::size_t n_actions, std::size_t n_next,
                    std::size_t n_obs, double prior = 1.0)
        : n_states_(n_states), n_actions_(n_actions), n_next_(n_next), n_obs_(n_obs),
          counts_(n_states * n_actions * n_next * n_obs, prior) {}

    double at(std::size_t s, std::size_t a, std::size_t s_next, std::size_t o) const {
        return counts_[index(s, a, s_next, o)];
    }

    double& at(std::size_t s, std::size_t a, std::size_t s_next, std::size_t o) {
        return counts_[index(s, a, s_next, o)];
    }

    double row_total(std::size_t s, std::size_t a) const {
        double total = 0.0;
        for (std::size_t s_next = 0; s_next < n_next_; ++s_next)
            for (std::size_t o = 0; o < n_obs_; ++o) total += at(s, a, s_next, o);
        return total;
    }

    double total() const {
        double t = 0.0;
        for (double c : counts_) t += c;
        return t;
    }

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }
    std::size_t n_next() const { return n_next_; }
    std::size_t n_obs() const { return n_obs_; }

private:
    std::size_t index(std::size_t s, std::size_t a, std::size_t s_next, std::size_t o) const {
        if (s >= n_states_ || a >= n_actions_ || s_next >= n_next_ || o >= n_obs_)
            throw InvalidModel("DirichletCounts index out of range");
        return ((s * n_actions_ + a) * n_next_ + s_next) * n_obs_ + o;
    }

    std::size_t n_states_, n_actions_, n_next_, n_obs_;
    std::vector<double> counts_;
};

/// Predictive probability of (s', o) under the counts at (s, a), plus the
/// posterior counts with that cell incremented by one.
inline std::pair<double, DirichletCounts> ba_count_update(const DirichletCounts& counts,
                                                          std::size_t s, std::size_t a,
                                                          std::size_t s_next, std::size_t o) {
    double row = counts.row_total(s, a);
    if (row <= 0.0)
        throw AllZeroCounts("no mass in counts row (s=" + std::to_string(s) +
                            ", a=" + std::to_string(a) + ")");
    double prob = counts.at(s, a, s_next, o) / row;
    DirichletCounts updated = counts;
    updated.at(s, a, s_next, o) += 1.0;
    return {prob, std::move(updated)};
}

}  // namespace centaur
