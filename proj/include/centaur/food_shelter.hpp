#pragma once

#include <utility>
#include <vector>

#include "centaur/tabular_model.hpp"

namespace centaur {

/// Food Shelter parameters. State factors into (agent cell, shelter status,
/// food cell); food occupies one of the non-shelter cells.
struct FoodShelterConfig {
    int width = 3, height = 3;
    int shelter_x = 0, shelter_y = 0;
    int first_food_x = 1, first_food_y = 1;
    double collapse_prob = 0.1;
    double food_reward = 1.0;
    double collapse_cost = 0.1;  // charged per step the shelter stays collapsed
    double step_cost = 0.0;
    double base_noise = 0.1;

    int n_cells() const { return width * height; }
    int cell(int x, int y) const { return y * width + x; }
    int shelter_cell() const { return cell(shelter_x, shelter_y); }
};

/// Action order: 4 straight moves, 4 diagonals, then stay. Diagonals are the
/// moves the human's inflated noise model penalizes twice.
inline constexpr int kFoodShelterActions = 9;
inline bool is_diagonal_action(std::size_t a) { return a >= 4 && a < 8; }
inline std::pair<int, int> shelter_action_delta(std::size_t a) {
    static constexpr int dx[9] = {0, 0, -1, 1, -1, 1, -1, 1, 0};
    static constexpr int dy[9] = {-1, 1, 0, 0, -1, -1, 1, 1, 0};
    return {dx[a], dy[a]};
}

/// State indexing helpers for the (agent, shelter, food) factorization.
struct FoodShelterIndex {
    FoodShelterConfig cfg;
    std::vector<int> food_cells;   // non-shelter cells, ascending
    std::vector<int> food_slot;    // cell -> slot, -1 for the shelter cell

    explicit FoodShelterIndex(const FoodShelterConfig& c) : cfg(c) {
        food_slot.assign(cfg.n_cells(), -1);
        for (int cell = 0; cell < cfg.n_cells(); ++cell) {
            if (cell == cfg.shelter_cell()) continue;
            food_slot[cell] = static_cast<int>(food_cells.size());
            food_cells.push_back(cell);
        }
    }

    std::size_t n_states() const { return cfg.n_cells() * 2 * food_cells.size(); }

    std::size_t encode(int agent_cell, bool shelter_ok, int food_cell) const {
        int slot = food_slot[food_cell];
        return (static_cast<std::size_t>(agent_cell) * 2 + (shelter_ok ? 1 : 0)) * food_cells.size() +
               slot;
    }
    void decode(std::size_t s, int& agent_cell, bool& shelter_ok, int& food_cell) const {
        food_cell = food_cells[s % food_cells.size()];
        s /= food_cells.size();
        shelter_ok = (s % 2) == 1;
        agent_cell = static_cast<int>(s / 2);
    }

    std::size_t start_state() const {
        return encode(cfg.shelter_cell(), true, cfg.cell(cfg.first_food_x, cfg.first_food_y));
    }
};

namespace detail {

// Failure slips land on a uniformly random 4-adjacent cell. Keeping diagonals
// out of the slip support is what makes an inflated-noise human rate diagonal
// moves as pure waste rather than a discounted shortcut.
inline std::vector<int> cell_neighbours(const FoodShelterConfig& cfg, int cell) {
    int x = cell % cfg.width, y = cell / cfg.width;
    std::vector<int> out;
    const int dx[4] = {0, 0, -1, 1};
    const int dy[4] = {-1, 1, 0, 0};
    for (int k = 0; k < 4; ++k) {
        int nx = x + dx[k], ny = y + dy[k];
        if (nx >= 0 && nx < cfg.width && ny >= 0 && ny < cfg.height)
            out.push_back(cfg.cell(nx, ny));
    }
    return out;
}

// Builds the per-action transition tables for given per-action failure
// probabilities. A failed action slips to a uniformly random neighbour cell;
// moving off the grid succeeds as staying put.
inline ActionMatrix shelter_transitions(const FoodShelterIndex& index,
                                        const std::vector<double>& fail_prob) {
    const FoodShelterConfig& cfg = index.cfg;
    const std::size_t S = index.n_states();
    const std::size_t n_food = index.food_cells.size();
    ActionMatrix transition(kFoodShelterActions, Matrix(S, std::vector<double>(S, 0.0)));

    for (std::size_t s = 0; s < S; ++s) {
        int agent, food;
        bool shelter_ok;
        index.decode(s, agent, shelter_ok, food);
        int x = agent % cfg.width, y = agent / cfg.width;
        auto neighbours = cell_neighbours(cfg, agent);

        for (std::size_t a = 0; a < kFoodShelterActions; ++a) {
            auto [dx, dy] = shelter_action_delta(a);
            int tx = x + dx, ty = y + dy;
            int target = (tx >= 0 && tx < cfg.width && ty >= 0 && ty < cfg.height)
                             ? cfg.cell(tx, ty)
                             : agent;
            double p_fail = fail_prob[a];

            // Landing distribution over cells.
            std::vector<std::pair<int, double>> landing;
            landing.emplace_back(target, 1.0 - p_fail);
            for (int nb : neighbours)
                landing.emplace_back(nb, p_fail / static_cast<double>(neighbours.size()));

            auto& row = transition[a][s];
            for (auto [cell, q] : landing) {
                if (q == 0.0) continue;
                bool next_shelter_ok = cell == cfg.shelter_cell() ? true : shelter_ok;
                bool consumed = cell == food;
                if (consumed) {
                    // Food relocates uniformly over the non-shelter cells.
                    for (std::size_t slot = 0; slot < n_food; ++slot) {
                        int new_food = index.food_cells[slot];
                        double qq = q / static_cast<double>(n_food);
                        if (cell != cfg.shelter_cell() && shelter_ok) {
                            row[index.encode(cell, true, new_food)] += qq * (1.0 - cfg.collapse_prob);
                            row[index.encode(cell, false, new_food)] += qq * cfg.collapse_prob;
                        } else {
                            row[index.encode(cell, next_shelter_ok, new_food)] += qq;
                        }
                    }
                } else {
                    if (cell != cfg.shelter_cell() && shelter_ok) {
                        row[index.encode(cell, true, food)] += q * (1.0 - cfg.collapse_prob);
                        row[index.encode(cell, false, food)] += q * cfg.collapse_prob;
                    } else {
                        row[index.encode(cell, next_shelter_ok, food)] += q;
                    }
                }
            }
        }
    }
    return transition;
}

}  // namespace detail

/// Builds the true and the human's Food Shelter models. They share every table
/// except the transitions: the human inflates the failure probability of
/// straight moves by epsilon and of diagonal moves by 2*epsilon.
inline std::pair<TabularModel, TabularModel> build_food_shelter(const FoodShelterConfig& cfg,
                                                                double epsilon) {
    if (cfg.base_noise + 2.0 * epsilon > 1.0 + 1e-12)
        throw NoiseOutOfRange("base_noise + 2*epsilon must not exceed 1");
    if (epsilon < 0.0) throw NoiseOutOfRange("epsilon must be non-negative");

    FoodShelterIndex index(cfg);
    const std::size_t S = index.n_states();

    std::vector<double> true_fail(kFoodShelterActions, cfg.base_noise);
    std::vector<double> human_fail(kFoodShelterActions);
    for (std::size_t a = 0; a < kFoodShelterActions; ++a)
        human_fail[a] = cfg.base_noise + (is_diagonal_action(a) ? 2.0 : 1.0) * epsilon;

    TabularModel truth;
    truth.n_states = S;
    truth.n_actions = kFoodShelterActions;
    truth.transition = detail::shelter_transitions(index, true_fail);

    // Rewards are the expectation over the true dynamics: +food_reward on
    // consumption (the agent lands on the food cell), -collapse_cost whenever
    // the post-step shelter is collapsed.
    truth.reward.assign(S, std::vector<double>(kFoodShelterActions, 0.0));
    for (std::size_t s = 0; s < S; ++s) {
        int agent, food;
        bool shelter_ok;
        index.decode(s, agent, shelter_ok, food);
        for (std::size_t a = 0; a < kFoodShelterActions; ++a) {
            double r = -cfg.step_cost;
            const auto& row = truth.transition[a][s];
            for (std::size_t s2 = 0; s2 < S; ++s2) {
                if (row[s2] == 0.0) continue;
                int agent2, food2;
                bool ok2;
                index.decode(s2, agent2, ok2, food2);
                if (agent2 == food) r += row[s2] * cfg.food_reward;
                if (!ok2) r -= row[s2] * cfg.collapse_cost;
            }
            truth.reward[s][a] = r;
        }
    }

    TabularModel human = truth;
    human.transition = detail::shelter_transitions(index, human_fail);
    return {truth, human};
}

}  // namespace centaur
