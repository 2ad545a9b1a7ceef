#pragma once

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "centaur/tabular_model.hpp"

namespace centaur {

enum class CellType { Empty, Wall, Vegan, Doughnut, Noodle, Shelter, Start };

inline CellType cell_from_char(char c) {
    switch (c) {
        case '.': return CellType::Empty;
        case '#': return CellType::Wall;
        case 'V': return CellType::Vegan;
        case 'D': return CellType::Doughnut;
        case 'N': return CellType::Noodle;
        case 'H': return CellType::Shelter;
        case 'S': return CellType::Start;
        default: throw InvalidLayout(std::string("unknown cell character '") + c + "'");
    }
}

struct GridPos {
    int x = 0, y = 0;
    friend bool operator==(const GridPos& a, const GridPos& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(const GridPos& a, const GridPos& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
};

/// Grid description for the Food Truck world: walls, a start cell, and
/// restaurant cells. Each restaurant expands into an entry/exit/terminal chain
/// when the MDP is built.
struct FoodTruckLayout {
    int width = 0, height = 0;
    std::vector<std::vector<CellType>> cells;  // [y][x]
    double step_cost = 0.1;
    double vegan_entry = -10.0, vegan_exit = 20.0;
    double doughnut_entry = 10.0, doughnut_exit = -10.0;
    double noodle_entry = -10.0, noodle_exit = 5.0;

    CellType at(GridPos p) const { return cells[p.y][p.x]; }
    bool in_bounds(GridPos p) const { return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height; }
};

inline FoodTruckLayout layout_from_json(const nlohmann::json& j) {
    FoodTruckLayout layout;
    auto rows = j.at("rows").get<std::vector<std::string>>();
    if (rows.empty()) throw InvalidLayout("layout has no rows");
    layout.height = static_cast<int>(rows.size());
    layout.width = static_cast<int>(rows[0].size());
    layout.cells.resize(layout.height);
    for (int y = 0; y < layout.height; ++y) {
        if (static_cast<int>(rows[y].size()) != layout.width)
            throw InvalidLayout("ragged layout rows");
        for (char c : rows[y]) layout.cells[y].push_back(cell_from_char(c));
    }
    if (j.contains("step_cost")) layout.step_cost = j.at("step_cost").get<double>();
    if (j.contains("rewards")) {
        const auto& r = j.at("rewards");
        layout.vegan_entry = r.value("vegan_entry", layout.vegan_entry);
        layout.vegan_exit = r.value("vegan_exit", layout.vegan_exit);
        layout.doughnut_entry = r.value("doughnut_entry", layout.doughnut_entry);
        layout.doughnut_exit = r.value("doughnut_exit", layout.doughnut_exit);
        layout.noodle_entry = r.value("noodle_entry", layout.noodle_entry);
        layout.noodle_exit = r.value("noodle_exit", layout.noodle_exit);
    }
    return layout;
}

inline FoodTruckLayout layout_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidLayout("cannot open layout file: " + path);
    nlohmann::json j;
    in >> j;
    return layout_from_json(j);
}

/// Movement actions, also the tie-break order: up, down, left, right.
inline constexpr int kFoodTruckActions = 4;
inline GridPos grid_step(GridPos p, std::size_t action) {
    switch (action) {
        case 0: return {p.x, p.y - 1};
        case 1: return {p.x, p.y + 1};
        case 2: return {p.x - 1, p.y};
        case 3: return {p.x + 1, p.y};
        default: throw InvalidModel("bad grid action");
    }
}

/// Food Truck MDP plus the bookkeeping needed by planners and tests: state
/// indices for cells and restaurant chains, start state, and per-state BFS
/// distances to the vegan restaurant.
struct FoodTruckEnv {
    FoodTruckLayout layout;
    TabularModel model;
    std::size_t start_state = 0;
    std::size_t terminal_state = 0;
    std::map<GridPos, std::size_t> cell_state;        // walkable cells only
    std::vector<GridPos> state_cell;                  // inverse for grid states
    struct Restaurant {
        CellType type;
        GridPos pos;
        std::size_t entry_state, exit_state;
    };
    std::vector<Restaurant> restaurants;
    std::vector<int> vegan_distance;  // steps from a grid state to enter the vegan cell; -1 off-grid

    bool is_grid_state(std::size_t s) const { return s < state_cell.size(); }

    const Restaurant* restaurant_at(GridPos p) const {
        for (const auto& r : restaurants)
            if (r.pos == p) return &r;
        return nullptr;
    }
};

inline FoodTruckEnv build_food_truck(const FoodTruckLayout& layout) {
    FoodTruckEnv env;
    env.layout = layout;

    std::optional<GridPos> start;
    std::vector<std::pair<CellType, GridPos>> restaurants;
    for (int y = 0; y < layout.height; ++y) {
        for (int x = 0; x < layout.width; ++x) {
            GridPos p{x, y};
            switch (layout.at(p)) {
                case CellType::Start:
                    if (start) throw InvalidLayout("multiple start cells");
                    start = p;
                    [[fallthrough]];
                case CellType::Empty: {
                    std::size_t idx = env.state_cell.size();
                    env.cell_state[p] = idx;
                    env.state_cell.push_back(p);
                    break;
                }
                case CellType::Vegan:
                case CellType::Doughnut:
                case CellType::Noodle:
                    restaurants.emplace_back(layout.at(p), p);
                    break;
                case CellType::Wall:
                    break;
                case CellType::Shelter:
                    throw InvalidLayout("shelter cells do not belong in a food-truck layout");
            }
        }
    }
    if (!start) throw InvalidLayout("no start cell");
    bool has_vegan = false;
    for (auto& [type, pos] : restaurants) has_vegan |= type == CellType::Vegan;
    if (!has_vegan) throw InvalidLayout("no vegan restaurant");

    const std::size_t n_grid = env.state_cell.size();
    std::size_t next_index = n_grid;
    for (auto& [type, pos] : restaurants) {
        FoodTruckEnv::Restaurant r{type, pos, next_index, next_index + 1};
        next_index += 2;
        env.restaurants.push_back(r);
    }
    env.terminal_state = next_index;
    const std::size_t S = next_index + 1;

    TabularModel& m = env.model;
    m.n_states = S;
    m.n_actions = kFoodTruckActions;
    m.transition.assign(kFoodTruckActions, Matrix(S, std::vector<double>(S, 0.0)));
    m.reward.assign(S, std::vector<double>(kFoodTruckActions, 0.0));
    m.terminal = {env.terminal_state};
    env.start_state = env.cell_state.at(*start);

    auto entry_bonus = [&](CellType t) {
        return t == CellType::Vegan      ? layout.vegan_entry
               : t == CellType::Doughnut ? layout.doughnut_entry
                                         : layout.noodle_entry;
    };
    auto exit_bonus = [&](CellType t) {
        return t == CellType::Vegan      ? layout.vegan_exit
               : t == CellType::Doughnut ? layout.doughnut_exit
                                         : layout.noodle_exit;
    };

    // Grid cells: deterministic moves costing the step cost; bumping a wall
    // stays in place. Stepping onto a restaurant cell lands in its entry state.
    for (std::size_t s = 0; s < n_grid; ++s) {
        GridPos p = env.state_cell[s];
        for (std::size_t a = 0; a < kFoodTruckActions; ++a) {
            GridPos q = grid_step(p, a);
            std::size_t dest = s;
            if (layout.in_bounds(q) && layout.at(q) != CellType::Wall) {
                if (const auto* r = env.restaurant_at(q))
                    dest = r->entry_state;
                else
                    dest = env.cell_state.at(q);
            }
            m.transition[a][s][dest] = 1.0;
            m.reward[s][a] = -layout.step_cost;
        }
    }
    // Restaurant chains advance regardless of the action taken and pay the
    // entry/exit bonuses while the agent occupies the chain: entering a
    // doughnut shop yields +10 - 0.1 one step in, then -10 - 0.1, then the
    // absorbing terminal.
    for (const auto& r : env.restaurants) {
        for (std::size_t a = 0; a < kFoodTruckActions; ++a) {
            m.transition[a][r.entry_state][r.exit_state] = 1.0;
            m.reward[r.entry_state][a] = -layout.step_cost + entry_bonus(r.type);
            m.transition[a][r.exit_state][env.terminal_state] = 1.0;
            m.reward[r.exit_state][a] = -layout.step_cost + exit_bonus(r.type);
        }
    }
    for (std::size_t a = 0; a < kFoodTruckActions; ++a)
        m.transition[a][env.terminal_state][env.terminal_state] = 1.0;

    validate_model(m);

    // BFS distances to the vegan entry, used by the planner heuristic. The
    // vegan restaurant must be reachable from the start.
    env.vegan_distance.assign(S, -1);
    GridPos vegan_pos{};
    for (const auto& r : env.restaurants)
        if (r.type == CellType::Vegan) vegan_pos = r.pos;
    std::deque<GridPos> queue;
    std::map<GridPos, int> dist;
    // Seed from cells adjacent to the vegan restaurant.
    for (std::size_t s = 0; s < n_grid; ++s) {
        GridPos p = env.state_cell[s];
        for (std::size_t a = 0; a < kFoodTruckActions; ++a) {
            if (grid_step(p, a) == vegan_pos && !dist.count(p)) {
                dist[p] = 1;
                queue.push_back(p);
            }
        }
    }
    while (!queue.empty()) {
        GridPos p = queue.front();
        queue.pop_front();
        for (std::size_t a = 0; a < kFoodTruckActions; ++a) {
            GridPos q = grid_step(p, a);
            if (!layout.in_bounds(q)) continue;
            if (env.cell_state.count(q) && !dist.count(q)) {
                dist[q] = dist[p] + 1;
                queue.push_back(q);
            }
        }
    }
    for (std::size_t s = 0; s < n_grid; ++s) {
        auto it = dist.find(env.state_cell[s]);
        if (it != dist.end()) env.vegan_distance[s] = it->second;
    }
    if (env.vegan_distance[env.start_state] < 0)
        throw InvalidLayout("vegan restaurant unreachable from start");
    // Every restaurant must touch the walkable component containing the start.
    for (const auto& r : env.restaurants) {
        bool reachable = false;
        for (std::size_t a = 0; a < kFoodTruckActions; ++a) {
            GridPos q = grid_step(r.pos, a);
            auto it = env.cell_state.find(q);
            if (it != env.cell_state.end() && env.vegan_distance[it->second] >= 0) reachable = true;
        }
        if (!reachable) throw InvalidLayout("unreachable restaurant");
    }
    return env;
}

/// Walkable-path distance from each grid cell to the nearest doughnut shop
/// (1 = directly adjacent). Unreachable cells keep a large distance.
inline std::map<GridPos, int> doughnut_distance_map(const FoodTruckEnv& env) {
    const auto& layout = env.layout;
    std::map<GridPos, int> dist;
    std::deque<GridPos> queue;
    for (const auto& cell : env.state_cell) {
        for (std::size_t a = 0; a < kFoodTruckActions; ++a) {
            GridPos q = grid_step(cell, a);
            if (layout.in_bounds(q) && layout.at(q) == CellType::Doughnut && !dist.count(cell)) {
                dist[cell] = 1;
                queue.push_back(cell);
            }
        }
    }
    while (!queue.empty()) {
        GridPos p = queue.front();
        queue.pop_front();
        for (std::size_t a = 0; a < kFoodTruckActions; ++a) {
            GridPos q = grid_step(p, a);
            if (env.cell_state.count(q) && !dist.count(q)) {
                dist[q] = dist[p] + 1;
                queue.push_back(q);
            }
        }
    }
    return dist;
}

/// Shortest action path from the start into a goal restaurant, refusing to
/// pass through cells within avoid_doughnut_radius walkable steps of a
/// doughnut shop (radius 0 = direct route). Deterministic: BFS expands actions
/// in the fixed action order.
inline std::vector<std::size_t> shortest_route(const FoodTruckEnv& env, CellType goal,
                                               int avoid_doughnut_radius = 0) {
    const auto& layout = env.layout;
    auto ddist = doughnut_distance_map(env);
    auto excluded = [&](GridPos p) {
        auto it = ddist.find(p);
        return it != ddist.end() && it->second <= avoid_doughnut_radius;
    };
    std::map<GridPos, std::pair<GridPos, std::size_t>> parent;
    std::deque<GridPos> queue;
    GridPos start = env.state_cell[env.start_state];
    queue.push_back(start);
    parent[start] = {start, 0};
    while (!queue.empty()) {
        GridPos p = queue.front();
        queue.pop_front();
        for (std::size_t a = 0; a < kFoodTruckActions; ++a) {
            GridPos q = grid_step(p, a);
            if (!layout.in_bounds(q) || layout.at(q) == CellType::Wall) continue;
            if (layout.at(q) == goal) {
                // Reconstruct: path to p, then the final entering action.
                std::vector<std::size_t> actions{a};
                GridPos cur = p;
                while (!(cur == start)) {
                    actions.push_back(parent[cur].second);
                    cur = parent[cur].first;
                }
                std::reverse(actions.begin(), actions.end());
                return actions;
            }
            if (!env.cell_state.count(q) || parent.count(q)) continue;
            if (excluded(q)) continue;
            parent[q] = {p, a};
            queue.push_back(q);
        }
    }
    throw InvalidLayout("no admissible route to the requested restaurant");
}

/// Rolls an action sequence from the start through the deterministic model and
/// returns the undiscounted return, running the episode to the terminal state.
inline double rollout_action_return(const FoodTruckEnv& env, const std::vector<std::size_t>& actions,
                                    std::size_t horizon = 64) {
    std::size_t s = env.start_state;
    double total = 0.0;
    std::size_t step = 0;
    auto advance = [&](std::size_t a) {
        total += env.model.reward[s][a];
        const auto& row = env.model.transition[a][s];
        for (std::size_t s2 = 0; s2 < env.model.n_states; ++s2)
            if (row[s2] == 1.0) { s = s2; break; }
        ++step;
    };
    for (std::size_t a : actions) {
        if (env.model.is_terminal(s) || step >= horizon) break;
        advance(a);
    }
    while (!env.model.is_terminal(s) && step < horizon) advance(0);
    return total;
}

}  // namespace centaur
