#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <array>
#include <vector>

#include <json.hpp>

#include "centaur/centaur_protocol.hpp"
#include "centaur/food_truck.hpp"
#include "centaur/particle_belief.hpp"
#include "centaur/rng.hpp"

namespace centaur {

/// Search hyperparameters; defaults follow the reward scales of the two
/// benchmark environments.
struct PlannerConfig {
    std::size_t iterations = 10000;
    double exploration_constant = 1.0;
    std::size_t max_depth = 30;
    std::string rollout_heuristic = "none";  // "vegan_distance" | "machine_q" | "none"
    double discount = 0.95;
};

inline nlohmann::json planner_config_to_json(const PlannerConfig& cfg) {
    return {{"iterations", cfg.iterations},
            {"c_uct", cfg.exploration_constant},
            {"max_depth", cfg.max_depth},
            {"heuristic", cfg.rollout_heuristic},
            {"discount", cfg.discount}};
}

inline PlannerConfig planner_config_from_json(const nlohmann::json& j) {
    PlannerConfig cfg;
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.exploration_constant = j.value("c_uct", cfg.exploration_constant);
    cfg.max_depth = j.value("max_depth", cfg.max_depth);
    cfg.rollout_heuristic = j.value("heuristic", cfg.rollout_heuristic);
    cfg.discount = j.value("discount", cfg.discount);
    if (cfg.iterations < 1 || cfg.max_depth < 1) throw InvalidSpec("bad planner config");
    return cfg;
}

/// Named leaf-evaluation tables, one value per state.
struct HeuristicSet {
    std::map<std::string, std::vector<double>> tables;
};

inline double rollout_heuristic_value(const std::string& name, std::size_t state,
                                      const HeuristicSet& set) {
    auto it = set.tables.find(name);
    if (it == set.tables.end()) throw UnknownHeuristic("no heuristic registered as '" + name + "'");
    return it->second.at(state);
}

/// Food Truck leaf values: the value of walking straight to the vegan
/// restaurant, discounted at `lambda` so the table is consistent with the
/// planner's in-search criterion (an undiscounted-return leaf makes stalling
/// look free under discounted backups). lambda = 1 reduces to the plain
/// negative step-distance times the step cost plus the vegan net value.
/// Restaurant-chain states evaluate to the chain's exact remaining reward,
/// obtained by rolling the deterministic chain.
inline std::vector<double> vegan_distance_table(const FoodTruckEnv& env, double lambda = 1.0) {
    const TabularModel& m = env.model;
    std::vector<double> table(m.n_states, 0.0);
    auto chain_value = [&](std::size_t chain_state) {
        std::size_t cur = chain_state;
        double total = 0.0, scale = 1.0;
        while (!m.is_terminal(cur)) {
            total += scale * m.reward[cur][0];
            scale *= lambda;
            const auto& row = m.transition[0][cur];
            for (std::size_t s2 = 0; s2 < m.n_states; ++s2)
                if (row[s2] == 1.0) { cur = s2; break; }
        }
        return total;
    };
    std::size_t vegan_entry_state = 0;
    for (const auto& r : env.restaurants)
        if (r.type == CellType::Vegan) vegan_entry_state = r.entry_state;
    for (std::size_t s = 0; s < m.n_states; ++s) {
        if (m.is_terminal(s)) continue;
        if (env.is_grid_state(s)) {
            double d = static_cast<double>(env.vegan_distance[s]);
            double walk = lambda == 1.0 ? -env.layout.step_cost * d
                                        : -env.layout.step_cost * (1.0 - std::pow(lambda, d)) /
                                              (1.0 - lambda);
            table[s] = walk + std::pow(lambda, d) * chain_value(vegan_entry_state);
        } else {
            table[s] = chain_value(s);
        }
    }
    return table;
}

/// Food Shelter leaf values: the machine's own optimal state values.
inline std::vector<double> machine_q_table(const QTable& machine_q) {
    std::vector<double> table(machine_q.n_states());
    for (std::size_t s = 0; s < table.size(); ++s) table[s] = machine_q.state_value(s);
    return table;
}

/// Root-sampling Monte Carlo tree search over the machine's best-response
/// model. Each simulation draws one STM particle at the root and keeps it
/// fixed: the particle's response table supplies the human's replies while the
/// machine's own subjective dynamics drive the environment. Nodes are keyed by
/// the action/outcome history below the root, so statistics at a node mix
/// exactly the particles that are consistent with reaching it.
class MonteCarloPlanner {
public:
    MonteCarloPlanner(const TabularModel& model_m, double c_m, PlannerConfig cfg,
                      std::optional<std::vector<double>> leaf_values)
        : n_states_(model_m.n_states), n_actions_(model_m.n_actions), reward_(model_m.reward),
          terminal_(model_m.terminal), c_m_(c_m), cfg_(std::move(cfg)),
          leaf_(std::move(leaf_values)) {
        if (n_actions_ > kMaxActions) throw InvalidModel("planner supports at most 16 actions");
        // Compressed transition rows: generative sampling touches only the
        // nonzero successors, and the planner owns everything it needs.
        sparse_rows_.resize(n_actions_);
        for (std::size_t a = 0; a < n_actions_; ++a) {
            sparse_rows_[a].resize(n_states_);
            for (std::size_t s = 0; s < n_states_; ++s) {
                const auto& row = model_m.transition[a][s];
                for (std::size_t s2 = 0; s2 < n_states_; ++s2)
                    if (row[s2] != 0.0) sparse_rows_[a][s].emplace_back(s2, row[s2]);
            }
        }
    }

    const PlannerConfig& config() const { return cfg_; }

    std::size_t plan(const ParticleBelief& belief, std::size_t root_state,
                     std::size_t steps_remaining, std::uint64_t seed) const {
        double total_weight = belief.total_weight();
        if (total_weight <= 0.0) throw DegenerateBelief("planner needs a usable particle belief");
        const std::size_t A = n_actions_;
        std::size_t depth = std::min<std::size_t>(cfg_.max_depth, steps_remaining);
        if (depth == 0 || terminal_.count(root_state)) return 0;

        // Root sampling by binary search over the cumulative weights.
        std::vector<double> cum(belief.particles.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < cum.size(); ++i) {
            acc += belief.particles[i].weight;
            cum[i] = acc;
        }

        std::vector<Node> arena;
        arena.reserve(cfg_.iterations + 1);
        arena.emplace_back(A);
        auto rng = derive_stream(seed, StreamPurpose::Planner);
        std::uniform_real_distribution<double> unif(0.0, acc);

        for (std::size_t it = 0; it < cfg_.iterations; ++it) {
            std::size_t k = std::lower_bound(cum.begin(), cum.end(), unif(rng)) - cum.begin();
            if (k >= cum.size()) k = cum.size() - 1;
            simulate(arena, 0, root_state, depth, belief.particles[k].response, rng);
        }

        std::size_t best = 0;
        for (std::size_t a = 1; a < A; ++a)
            if (arena[0].n[a] > arena[0].n[best]) best = a;
        return best;
    }

private:
    static constexpr std::size_t kMaxActions = 16;

    struct Node {
        explicit Node(std::size_t) { n.fill(0); q.fill(0.0); }
        std::array<int, kMaxActions> n;
        std::array<double, kMaxActions> q;
        int total = 0;
        // Children are few; a linear scan beats hashing at this size.
        std::vector<std::pair<std::uint64_t, int>> children;
    };

    std::uint64_t child_key(std::size_t a, std::int32_t resp, std::size_t s_next) const {
        return (static_cast<std::uint64_t>(a) * (n_actions_ + 2) +
                static_cast<std::uint64_t>(resp + 1)) *
                   n_states_ +
               s_next;
    }

    std::size_t select_action(const Node& node, std::size_t n_actions) const {
        for (std::size_t a = 0; a < n_actions; ++a)
            if (node.n[a] == 0) return a;
        double log_total = std::log(static_cast<double>(node.total));
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < n_actions; ++a) {
            double score = node.q[a] + cfg_.exploration_constant * std::sqrt(log_total / node.n[a]);
            if (score > best_score) { best_score = score; best = a; }
        }
        return best;
    }

    std::size_t sample_next(std::size_t state, std::size_t a_c, std::mt19937_64& rng) const {
        const auto& row = sparse_rows_[a_c][state];
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double u = unif(rng), acc = 0.0;
        for (const auto& [s2, p] : row) {
            acc += p;
            if (u < acc) return s2;
        }
        return row.back().first;
    }

    double leaf_value(std::size_t state, std::size_t depth, const ResponseTable& human,
                      std::mt19937_64& rng) const {
        if (terminal_.count(state)) return 0.0;
        if (leaf_) return (*leaf_)[state];
        // Random-proposal rollout against the sampled human.
        std::uniform_int_distribution<std::size_t> pick(0, n_actions_ - 1);
        double total = 0.0, scale = 1.0;
        std::size_t s = state;
        for (std::size_t d = 0; d < depth && !terminal_.count(s); ++d) {
            std::size_t a_m = pick(rng);
            HumanResponse resp = human(s, a_m);
            std::size_t a_c = centaur_action(a_m, resp);
            total += scale * (reward_[s][a_c] - (resp.overrides ? c_m_ : 0.0));
            scale *= cfg_.discount;
            s = sample_next(s, a_c, rng);
        }
        return total;
    }

    double simulate(std::vector<Node>& arena, int node_idx, std::size_t state, std::size_t depth,
                    const ResponseTable& human, std::mt19937_64& rng) const {
        if (depth == 0 || terminal_.count(state)) return 0.0;
        std::size_t a_m = select_action(arena[node_idx], n_actions_);
        HumanResponse resp = human(state, a_m);
        std::size_t a_c = centaur_action(a_m, resp);
        double reward = reward_[state][a_c] - (resp.overrides ? c_m_ : 0.0);
        std::size_t s_next = sample_next(state, a_c, rng);

        std::uint64_t key =
            child_key(a_m, resp.overrides ? static_cast<std::int32_t>(resp.action) : -1, s_next);
        double future;
        int child = -1;
        for (const auto& [k, idx] : arena[node_idx].children)
            if (k == key) { child = idx; break; }
        if (child >= 0) {
            future = simulate(arena, child, s_next, depth - 1, human, rng);
        } else {
            child = static_cast<int>(arena.size());
            arena.emplace_back(n_actions_);
            arena[node_idx].children.emplace_back(key, child);
            future = leaf_value(s_next, depth - 1, human, rng);
        }
        double ret = reward + cfg_.discount * future;
        Node& nd = arena[node_idx];
        nd.n[a_m] += 1;
        nd.total += 1;
        nd.q[a_m] += (ret - nd.q[a_m]) / nd.n[a_m];
        return ret;
    }

    std::size_t n_states_;
    std::size_t n_actions_;
    Matrix reward_;
    std::set<std::size_t> terminal_;
    double c_m_;
    PlannerConfig cfg_;
    std::optional<std::vector<double>> leaf_;
    std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> sparse_rows_;
};

/// The machine side of the protocol, backed by the root-sampling planner.
/// Centaur mode filters the particle belief after every observed round; ideal
/// mode runs a single true particle; naive mode plans against an
/// always-allowing stub and never consults the human model.
///
/// Multi-episode runs can enable a posterior-sampling exploration phase: each
/// of the first posterior_sampling_episodes episodes commits to one particle
/// drawn from the current posterior and plans against it, resampling whenever
/// filtering refutes the committed particle; later episodes plan against the
/// full posterior. A greedy full-posterior planner never probes actions that
/// only a minority of surviving particles would permit, so it can settle on a
/// detour forever; posterior-sampling episodes pay for that information once.
class PlannerMachine final : public MachineAgent {
public:
    PlannerMachine(MonteCarloPlanner planner, ParticleBelief belief, std::size_t horizon,
                   std::uint64_t seed, bool filter_enabled,
                   std::size_t posterior_sampling_episodes = 0)
        : planner_(std::move(planner)), prior_(belief), belief_(std::move(belief)),
          horizon_(horizon), seed_(seed), filter_(filter_enabled),
          ts_episodes_(filter_enabled ? posterior_sampling_episodes : 0) {}

    void begin_episode() override {
        ++episodes_seen_;
        if (sampling_active()) resample_commitment();
    }

    std::size_t propose(std::size_t state, std::size_t t) override {
        std::uint64_t step_seed =
            splitmix64(seed_ ^ splitmix64(0x706c616eULL + plan_calls_));
        ++plan_calls_;
        const ParticleBelief& planning_belief = sampling_active() ? committed_ : belief_;
        return planner_.plan(planning_belief, state, horizon_ - t, step_seed);
    }

    void observe(const StepRecord& rec) override {
        if (filter_) {
            try {
                filter_particles_in_place(belief_, rec.state, rec.a_m, rec.a_h);
            } catch (const AllParticlesEliminated&) {
                // Documented fallback: restart from the prior.
                belief_ = prior_;
            }
            if (sampling_active() && belief_.particles[committed_index_].weight == 0.0)
                resample_commitment();  // the committed hypothesis was refuted
        }
        if (on_posterior_) on_posterior_(belief_);
    }

    const ParticleBelief& belief() const { return belief_; }
    void set_posterior_callback(std::function<void(const ParticleBelief&)> cb) {
        on_posterior_ = std::move(cb);
    }

private:
    void resample_commitment() {
        std::uint64_t draw_seed = splitmix64(seed_ ^ splitmix64(0x7473ULL + resamples_));
        ++resamples_;
        auto rng = derive_stream(draw_seed, StreamPurpose::Planner, 0xe5);
        std::vector<double> weights(belief_.particles.size());
        for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = belief_.particles[i].weight;
        committed_index_ = sample_weighted(weights, belief_.total_weight(), rng);
        committed_.particles.clear();
        committed_.particles.push_back(belief_.particles[committed_index_]);
        committed_.particles[0].weight = 1.0;
    }

    bool sampling_active() const { return episodes_seen_ <= ts_episodes_; }

    MonteCarloPlanner planner_;
    ParticleBelief prior_;
    ParticleBelief belief_;
    std::size_t horizon_;
    std::uint64_t seed_;
    bool filter_;
    std::size_t ts_episodes_;
    std::size_t episodes_seen_ = 0;
    std::size_t committed_index_ = 0;
    ParticleBelief committed_;
    std::uint64_t plan_calls_ = 0;
    std::uint64_t resamples_ = 0;
    std::function<void(const ParticleBelief&)> on_posterior_;
};

/// A single particle whose human never overrides; planning against it is
/// planning as if alone (the naive arm).
inline ParticleBelief always_noop_belief(std::size_t n_states, std::size_t n_actions) {
    STMParticle p;
    p.params = {STMParams::Kind::Epsilon, 0.0, 0.0};
    p.weight = 1.0;
    QTable q;
    q.values.assign(n_states, std::vector<double>(n_actions, 0.0));
    p.q = std::make_shared<const QTable>(std::move(q));
    p.response.response.assign(n_states, std::vector<std::int16_t>(n_actions, -1));
    ParticleBelief belief;
    belief.particles.push_back(std::move(p));
    return belief;
}

}  // namespace centaur
