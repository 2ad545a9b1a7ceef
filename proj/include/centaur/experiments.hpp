#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "centaur/alignment.hpp"
#include "centaur/centaur_protocol.hpp"
#include "centaur/food_shelter.hpp"
#include "centaur/food_truck.hpp"
#include "centaur/planner.hpp"

namespace centaur {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { FoodTruck, FoodShelter, FoodShelterSwapped, FoodShelterBothCorrect, Alignment };
enum class ArmMode { Centaur, Naive, Ideal, Human };

inline std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::FoodTruck: return "foodtruck";
        case ExperimentKind::FoodShelter: return "foodshelter";
        case ExperimentKind::FoodShelterSwapped: return "foodshelter_swapped";
        case ExperimentKind::FoodShelterBothCorrect: return "foodshelter_bothcorrect";
        case ExperimentKind::Alignment: return "alignment";
    }
    return "?";
}

inline ExperimentKind experiment_from_string(const std::string& s) {
    if (s == "foodtruck") return ExperimentKind::FoodTruck;
    if (s == "foodshelter") return ExperimentKind::FoodShelter;
    if (s == "foodshelter_swapped") return ExperimentKind::FoodShelterSwapped;
    if (s == "foodshelter_bothcorrect") return ExperimentKind::FoodShelterBothCorrect;
    if (s == "alignment") return ExperimentKind::Alignment;
    throw InvalidSpec("unknown experiment: " + s);
}

inline std::string to_string(ArmMode mode) {
    switch (mode) {
        case ArmMode::Centaur: return "centaur";
        case ArmMode::Naive: return "naive";
        case ArmMode::Ideal: return "ideal";
        case ArmMode::Human: return "human";
    }
    return "?";
}

inline ArmMode mode_from_string(const std::string& s) {
    if (s == "centaur") return ArmMode::Centaur;
    if (s == "naive") return ArmMode::Naive;
    if (s == "ideal") return ArmMode::Ideal;
    if (s == "human") return ArmMode::Human;
    throw InvalidSpec("unknown mode: " + s);
}

/// One experiment arm: which benchmark, which machine mode, the true human,
/// seeds, environment and planner settings, output location.
struct ExperimentSpec {
    ExperimentKind experiment = ExperimentKind::FoodShelter;
    ArmMode mode = ArmMode::Centaur;
    std::vector<std::uint64_t> seeds;

    // True human parameters.
    double true_gamma = 7.5;      // food truck
    double true_epsilon = 0.45;   // food shelter
    double true_c_h = 0.05;

    double c_m = 0.2;
    double human_lambda = 0.78;  // food shelter humans' planning discount
    std::size_t horizon = 100;
    std::size_t episodes = 1;
    std::size_t hyperbolic_grid = 101;

    std::string layout_path;  // food truck; empty = shipped default
    FoodShelterConfig shelter;

    PlannerConfig planner;
    std::size_t ideal_iterations = 0;  // 0 = 2x planner.iterations
    bool episode_posterior_sampling = false;

    // Alignment suite settings.
    std::size_t instances = 200;
    std::uint64_t instance_seed = 0;

    std::string output_dir = "out";
    std::string cache_dir = "cache";
    std::size_t threads = 1;

    static ExperimentSpec defaults_for(ExperimentKind kind, ArmMode mode) {
        ExperimentSpec spec;
        spec.experiment = kind;
        spec.mode = mode;
        for (std::uint64_t s = 0; s < 19; ++s) spec.seeds.push_back(s);
        switch (kind) {
            case ExperimentKind::FoodTruck:
                spec.true_c_h = 0.21;
                spec.c_m = 0.2;
                spec.horizon = 30;
                spec.episodes = 20;
                spec.planner.iterations = 10000;
                spec.planner.rollout_heuristic = "vegan_distance";
                spec.planner.max_depth = 30;
                spec.episode_posterior_sampling = true;
                break;
            case ExperimentKind::FoodShelter:
            case ExperimentKind::FoodShelterSwapped:
            case ExperimentKind::FoodShelterBothCorrect:
                spec.true_c_h = 0.05;
                spec.c_m = 0.2;
                spec.shelter.width = 4;
                spec.shelter.height = 4;
                spec.horizon = 100;
                spec.episodes = 4;
                spec.planner.iterations = 2000;
                spec.planner.rollout_heuristic = "machine_q";
                spec.planner.max_depth = 20;
                if (kind == ExperimentKind::FoodShelterBothCorrect) {
                    spec.true_epsilon = 0.0;
                    spec.human_lambda = 0.95;
                }
                break;
            case ExperimentKind::Alignment:
                break;
        }
        return spec;
    }
};

inline void validate_spec(const ExperimentSpec& spec) {
    if (spec.seeds.empty()) throw InvalidSpec("seeds must be nonempty");
    if (spec.experiment == ExperimentKind::Alignment) {
        if (spec.instances == 0) throw InvalidSpec("alignment needs at least one instance");
        return;
    }
    if (spec.horizon == 0 || spec.episodes == 0) throw InvalidSpec("horizon/episodes must be positive");
    if (spec.true_c_h < 0.0 || spec.c_m < 0.0) throw InvalidSpec("override costs must be non-negative");
    if (spec.experiment != ExperimentKind::FoodTruck &&
        spec.shelter.base_noise + 2.0 * spec.true_epsilon > 1.0 + 1e-12)
        throw InvalidSpec("true epsilon out of the feasible range");
}

inline nlohmann::json spec_to_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    j["experiment"] = to_string(spec.experiment);
    j["mode"] = to_string(spec.mode);
    j["seeds"] = spec.seeds;
    j["true_gamma"] = spec.true_gamma;
    j["true_epsilon"] = spec.true_epsilon;
    j["true_c_h"] = spec.true_c_h;
    j["c_m"] = spec.c_m;
    j["human_lambda"] = spec.human_lambda;
    j["horizon"] = spec.horizon;
    j["episodes"] = spec.episodes;
    j["hyperbolic_grid"] = spec.hyperbolic_grid;
    j["layout_path"] = spec.layout_path;
    j["shelter"] = {{"width", spec.shelter.width},
                    {"height", spec.shelter.height},
                    {"shelter_x", spec.shelter.shelter_x},
                    {"shelter_y", spec.shelter.shelter_y},
                    {"first_food_x", spec.shelter.first_food_x},
                    {"first_food_y", spec.shelter.first_food_y},
                    {"collapse_prob", spec.shelter.collapse_prob},
                    {"food_reward", spec.shelter.food_reward},
                    {"collapse_cost", spec.shelter.collapse_cost},
                    {"step_cost", spec.shelter.step_cost},
                    {"base_noise", spec.shelter.base_noise}};
    j["planner"] = planner_config_to_json(spec.planner);
    j["ideal_iterations"] = spec.ideal_iterations;
    j["episode_posterior_sampling"] = spec.episode_posterior_sampling;
    j["instances"] = spec.instances;
    j["instance_seed"] = spec.instance_seed;
    j["output_dir"] = spec.output_dir;
    j["cache_dir"] = spec.cache_dir;
    j["threads"] = spec.threads;
    return j;
}

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
    ExperimentSpec spec;
    spec.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    spec.mode = mode_from_string(j.value("mode", "centaur"));
    spec.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    if (spec.seeds.empty())
        for (std::uint64_t s = 0; s < 19; ++s) spec.seeds.push_back(s);
    ExperimentSpec defaults = ExperimentSpec::defaults_for(spec.experiment, spec.mode);
    spec.true_gamma = j.value("true_gamma", defaults.true_gamma);
    spec.true_epsilon = j.value("true_epsilon", defaults.true_epsilon);
    spec.true_c_h = j.value("true_c_h", defaults.true_c_h);
    spec.c_m = j.value("c_m", defaults.c_m);
    spec.human_lambda = j.value("human_lambda", defaults.human_lambda);
    spec.horizon = j.value("horizon", defaults.horizon);
    spec.episodes = j.value("episodes", defaults.episodes);
    spec.hyperbolic_grid = j.value("hyperbolic_grid", defaults.hyperbolic_grid);
    spec.layout_path = j.value("layout_path", std::string{});
    spec.shelter = defaults.shelter;
    if (j.contains("shelter")) {
        const auto& s = j.at("shelter");
        spec.shelter.width = s.value("width", defaults.shelter.width);
        spec.shelter.height = s.value("height", defaults.shelter.height);
        spec.shelter.shelter_x = s.value("shelter_x", 0);
        spec.shelter.shelter_y = s.value("shelter_y", 0);
        spec.shelter.first_food_x = s.value("first_food_x", 1);
        spec.shelter.first_food_y = s.value("first_food_y", 1);
        spec.shelter.collapse_prob = s.value("collapse_prob", 0.1);
        spec.shelter.food_reward = s.value("food_reward", 1.0);
        spec.shelter.collapse_cost = s.value("collapse_cost", 0.1);
        spec.shelter.step_cost = s.value("step_cost", 0.0);
        spec.shelter.base_noise = s.value("base_noise", 0.1);
    }
    spec.planner = j.contains("planner") ? planner_config_from_json(j.at("planner"))
                                         : defaults.planner;
    spec.ideal_iterations = j.value("ideal_iterations", defaults.ideal_iterations);
    spec.episode_posterior_sampling =
        j.value("episode_posterior_sampling", defaults.episode_posterior_sampling);
    spec.instances = j.value("instances", defaults.instances);
    spec.instance_seed = j.value("instance_seed", defaults.instance_seed);
    spec.output_dir = j.value("output_dir", defaults.output_dir);
    spec.cache_dir = j.value("cache_dir", defaults.cache_dir);
    spec.threads = j.value("threads", std::size_t{1});
    validate_spec(spec);
    return spec;
}

inline std::string default_layout_path() {
    return std::string(CENTAUR_LAB_DATA_DIR) + "/food_truck_default.json";
}

// ---------------------------------------------------------------------------
// Particle grids and the solve cache
// ---------------------------------------------------------------------------

/// Food Truck prior: 200 gammas from the low region, 200 from the high region,
/// crossed with five effort costs spanning low/medium/high.
inline std::vector<STMParams> food_truck_grid() {
    std::vector<double> gammas;
    for (int i = 0; i < 200; ++i) gammas.push_back(0.02 + (0.5 - 0.02) * i / 199.0);
    for (int i = 0; i < 200; ++i) gammas.push_back(2.0 + (10.0 - 2.0) * i / 199.0);
    std::vector<double> costs{0.01, 0.11, 0.21, 0.31, 0.8};
    std::vector<STMParams> grid;
    grid.reserve(gammas.size() * costs.size());
    for (double g : gammas)
        for (double c : costs) grid.push_back({STMParams::Kind::Gamma, g, c});
    return grid;
}

/// Food Shelter prior: 12 epsilons on [0, 0.45] crossed with 100 effort costs
/// on [0, 0.5] (both grids include the true experimental values exactly).
inline std::vector<STMParams> food_shelter_grid() {
    std::vector<STMParams> grid;
    grid.reserve(1200);
    for (int i = 0; i < 12; ++i) {
        double eps = 0.45 * i / 11.0;
        for (int j = 0; j < 100; ++j) grid.push_back({STMParams::Kind::Epsilon, eps, 0.5 * j / 100.0});
    }
    return grid;
}

struct SolveCacheResult {
    std::map<double, std::shared_ptr<const QTable>> tables;  // model parameter -> solved Q
    bool cache_hit = false;
    std::size_t cached_particles = 0;
};

namespace detail {

inline std::string grid_cache_name(ExperimentKind kind, const ExperimentSpec& spec) {
    switch (kind) {
        case ExperimentKind::FoodTruck: return "foodtruck_particles.json";
        default:
            // All three shelter variants share the same candidate-human grid.
            return "foodshelter_particles.json";
    }
}

}  // namespace detail

/// Solves every distinct model parameter of the grid (in parallel) or loads
/// a previous solve from the cache file. Writes one JSON record per particle:
/// {"params": {"gamma"|"epsilon": x, "c_h": y}, "q_table": ...}.
inline SolveCacheResult solve_cache(const ExperimentSpec& spec,
                                    const std::vector<STMParams>& grid,
                                    const std::function<QTable(double)>& solve_value,
                                    std::ostream* log = nullptr) {
    namespace fs = std::filesystem;
    SolveCacheResult result;
    fs::create_directories(spec.cache_dir);
    fs::path path = fs::path(spec.cache_dir) / detail::grid_cache_name(spec.experiment, spec);

    std::vector<double> values;
    for (const auto& p : grid)
        if (values.empty() || values.back() != p.value) values.push_back(p.value);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    if (fs::exists(path)) {
        try {
            std::ifstream in(path);
            nlohmann::json j;
            in >> j;
            std::map<double, std::shared_ptr<const QTable>> tables;
            std::size_t records = 0;
            for (const auto& rec : j.at("particles")) {
                const auto& params = rec.at("params");
                double value = params.contains("gamma") ? params.at("gamma").get<double>()
                                                        : params.at("epsilon").get<double>();
                if (!tables.count(value))
                    tables[value] =
                        std::make_shared<const QTable>(qtable_from_json(rec.at("q_table")));
                ++records;
            }
            bool complete = true;
            for (double v : values)
                if (!tables.count(v)) complete = false;
            if (complete && records >= grid.size()) {
                result.tables = std::move(tables);
                result.cache_hit = true;
                result.cached_particles = records;
                if (log) *log << "cache hit: " << path.string() << " (" << records << " particles)\n";
                return result;
            }
            if (log) *log << "cache incomplete, re-solving: " << path.string() << "\n";
        } catch (const std::exception& e) {
            if (log) *log << "cache corrupted (" << e.what() << "), re-solving\n";
        }
    }

    // Parallel offline solve, deterministic combination by parameter order.
    std::vector<std::shared_ptr<const QTable>> solved(values.size());
    std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(
        spec.threads > 0 ? spec.threads : 1, std::thread::hardware_concurrency()));
    if (workers > 1) {
        std::vector<std::future<void>> jobs;
        for (std::size_t w = 0; w < workers; ++w)
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < values.size(); i += workers)
                    solved[i] = std::make_shared<const QTable>(solve_value(values[i]));
            }));
        for (auto& j : jobs) j.get();
    } else {
        for (std::size_t i = 0; i < values.size(); ++i)
            solved[i] = std::make_shared<const QTable>(solve_value(values[i]));
    }
    for (std::size_t i = 0; i < values.size(); ++i) result.tables[values[i]] = solved[i];

    nlohmann::json out;
    out["particles"] = nlohmann::json::array();
    for (const auto& p : grid) {
        nlohmann::json rec;
        rec["params"] = {{p.kind == STMParams::Kind::Gamma ? "gamma" : "epsilon", p.value},
                         {"c_h", p.c_h}};
        rec["q_table"] = qtable_to_json(*result.tables.at(p.value));
        out["particles"].push_back(std::move(rec));
    }
    std::ofstream file(path);
    file << out.dump() << '\n';
    result.cached_particles = grid.size();
    if (log) *log << "solved and cached " << grid.size() << " particles at " << path.string() << "\n";
    return result;
}

// ---------------------------------------------------------------------------
// Experiment context: models, machines, and the per-seed run loop
// ---------------------------------------------------------------------------

/// Everything a benchmark arm needs at run time. The providers are lazy so the
/// arms only touch what they are allowed to: the naive machine never asks for
/// the human model, the human arm never asks for a planner.
struct ExperimentContext {
    CentaurConfig cfg;  // true environment + both subjective models
    std::function<ParticleBelief()> particles;           // full prior (centaur)
    std::function<ParticleBelief()> true_particle;       // single true particle (ideal)
    std::function<MonteCarloPlanner(std::size_t iterations)> planner;
    std::function<Policy()> human_policy;
    STMParams::Kind param_kind = STMParams::Kind::Epsilon;
};

inline std::unique_ptr<MachineAgent> make_machine_agent(const ExperimentSpec& spec,
                                                        const ExperimentContext& ctx,
                                                        std::uint64_t seed,
                                                        PlannerMachine** planner_out = nullptr) {
    std::size_t ideal_iters =
        spec.ideal_iterations > 0 ? spec.ideal_iterations : spec.planner.iterations * 2;
    switch (spec.mode) {
        case ArmMode::Centaur: {
            std::size_t ts_episodes =
                spec.episode_posterior_sampling ? spec.episodes / 2 : 0;
            auto machine = std::make_unique<PlannerMachine>(ctx.planner(spec.planner.iterations),
                                                            ctx.particles(), spec.horizon, seed,
                                                            /*filter=*/true, ts_episodes);
            if (planner_out) *planner_out = machine.get();
            return machine;
        }
        case ArmMode::Ideal: {
            auto machine = std::make_unique<PlannerMachine>(ctx.planner(ideal_iters),
                                                            ctx.true_particle(), spec.horizon, seed,
                                                            /*filter=*/false);
            if (planner_out) *planner_out = machine.get();
            return machine;
        }
        case ArmMode::Naive: {
            auto machine = std::make_unique<PlannerMachine>(
                ctx.planner(spec.planner.iterations),
                always_noop_belief(ctx.cfg.otm.n_states, ctx.cfg.otm.n_actions), spec.horizon,
                seed, /*filter=*/false);
            if (planner_out) *planner_out = machine.get();
            return machine;
        }
        case ArmMode::Human:
            return std::make_unique<FixedPolicyMachine>(ctx.human_policy());
    }
    throw InvalidSpec("unhandled mode");
}

/// Builds the Food Truck context for a spec.
inline ExperimentContext make_food_truck_context(const ExperimentSpec& spec,
                                                 const FoodTruckEnv& env,
                                                 const SolveCacheResult& cache) {
    ExperimentContext ctx;
    ctx.param_kind = STMParams::Kind::Gamma;
    ctx.cfg.otm = env.model;
    SubjectiveTaskModel stm_m;
    stm_m.model = env.model;
    stm_m.criterion = DiscountSpec::exponential(spec.planner.discount);
    ctx.cfg.stm_m = solve_stm(stm_m);
    SubjectiveTaskModel stm_h;
    stm_h.model = env.model;
    stm_h.criterion = DiscountSpec::hyperbolic(spec.true_gamma);
    stm_h.override_cost = spec.true_c_h;
    ctx.cfg.stm_h = solve_stm(stm_h, spec.hyperbolic_grid);
    ctx.cfg.c_m = spec.c_m;
    ctx.cfg.horizon = spec.horizon;
    ctx.cfg.start_state = env.start_state;

    auto probe = non_terminal_states(env.model);
    auto terminal = env.model.terminal;
    auto tables = cache.tables;
    auto model = env.model;
    std::size_t grid_size = spec.hyperbolic_grid;
    ctx.particles = [tables, probe, terminal, model, grid_size]() {
        ParticleSolver solver = [&tables, &model, grid_size](const STMParams& p) {
            auto it = tables.find(p.value);
            if (it != tables.end()) return it->second;
            return std::shared_ptr<const QTable>(
                std::make_shared<const QTable>(hyperbolic_q(model, p.value, grid_size)));
        };
        return init_particles(food_truck_grid(), solver, probe, terminal);
    };
    QTable true_q = ctx.cfg.stm_h.q();
    double true_gamma = spec.true_gamma, true_c_h = spec.true_c_h;
    ctx.true_particle = [true_q, probe, terminal, true_gamma, true_c_h]() {
        ParticleBelief belief;
        belief.particles.push_back(detail::make_particle(
            {STMParams::Kind::Gamma, true_gamma, true_c_h},
            std::make_shared<const QTable>(true_q), probe, terminal));
        belief.particles[0].weight = 1.0;
        return belief;
    };
    PlannerConfig pc = spec.planner;
    double c_m = spec.c_m;
    auto leaf = vegan_distance_table(env, pc.discount);
    TabularModel machine_model = env.model;
    ctx.planner = [pc, c_m, leaf, machine_model](std::size_t iterations) {
        PlannerConfig cfg = pc;
        cfg.iterations = iterations;
        std::optional<std::vector<double>> table;
        if (cfg.rollout_heuristic != "none") table = leaf;
        return MonteCarloPlanner(machine_model, c_m, cfg, table);
    };
    Policy human_pi = ctx.cfg.stm_h.policy();
    ctx.human_policy = [human_pi]() { return human_pi; };
    return ctx;
}

/// Builds a Food Shelter context. `swapped` gives the machine the inflated
/// model and the human the true one; `both_correct` sets epsilon to zero.
inline ExperimentContext make_food_shelter_context(const ExperimentSpec& spec,
                                                   const SolveCacheResult& cache) {
    bool swapped = spec.experiment == ExperimentKind::FoodShelterSwapped;
    double eps = spec.true_epsilon;

    auto [truth, inflated] = build_food_shelter(spec.shelter, eps);
    FoodShelterIndex index(spec.shelter);

    ExperimentContext ctx;
    ctx.param_kind = STMParams::Kind::Epsilon;
    ctx.cfg.otm = truth;

    // Machine model: the truth normally, the inflated model when swapped.
    SubjectiveTaskModel stm_m;
    stm_m.model = swapped ? inflated : truth;
    stm_m.criterion = DiscountSpec::exponential(spec.planner.discount);
    ctx.cfg.stm_m = solve_stm(stm_m);

    // Human model: the inflated model normally, the truth when swapped.
    SubjectiveTaskModel stm_h;
    stm_h.model = swapped ? truth : inflated;
    stm_h.criterion = DiscountSpec::exponential(spec.human_lambda);
    stm_h.override_cost = spec.true_c_h;
    ctx.cfg.stm_h = solve_stm(stm_h);

    ctx.cfg.c_m = spec.c_m;
    ctx.cfg.horizon = spec.horizon;
    ctx.cfg.start_state = index.start_state();

    auto probe = non_terminal_states(truth);
    auto terminal = truth.terminal;
    auto tables = cache.tables;
    FoodShelterConfig shelter = spec.shelter;
    double human_lambda = spec.human_lambda;
    ctx.particles = [tables, probe, terminal, shelter, human_lambda]() {
        ParticleSolver solver = [&tables, &shelter, human_lambda](
                                    const STMParams& p) -> std::shared_ptr<const QTable> {
            if (shelter.base_noise + 2.0 * p.value > 1.0 + 1e-12) return nullptr;
            auto it = tables.find(p.value);
            if (it != tables.end()) return it->second;
            auto [t, h] = build_food_shelter(shelter, p.value);
            return std::make_shared<const QTable>(value_iteration(h, human_lambda));
        };
        return init_particles(food_shelter_grid(), solver, probe, terminal);
    };

    // The true human corresponds to the swapped/unswapped epsilon of stm_h.
    double true_value = swapped ? 0.0 : eps;
    QTable true_q = ctx.cfg.stm_h.q();
    double c_h = spec.true_c_h;
    ctx.true_particle = [true_q, probe, terminal, true_value, c_h]() {
        ParticleBelief belief;
        belief.particles.push_back(detail::make_particle({STMParams::Kind::Epsilon, true_value, c_h},
                                                         std::make_shared<const QTable>(true_q),
                                                         probe, terminal));
        belief.particles[0].weight = 1.0;
        return belief;
    };

    PlannerConfig pc = spec.planner;
    double c_m = spec.c_m;
    auto leaf = machine_q_table(ctx.cfg.stm_m.q());
    TabularModel machine_model = ctx.cfg.stm_m.model;
    ctx.planner = [pc, c_m, leaf, machine_model](std::size_t iterations) {
        PlannerConfig cfg = pc;
        cfg.iterations = iterations;
        std::optional<std::vector<double>> table;
        if (cfg.rollout_heuristic != "none") table = leaf;
        return MonteCarloPlanner(machine_model, c_m, cfg, table);
    };
    Policy human_pi = ctx.cfg.stm_h.policy();
    ctx.human_policy = [human_pi]() { return human_pi; };
    return ctx;
}

// ---------------------------------------------------------------------------
// Running and summarizing
// ---------------------------------------------------------------------------

struct SeedResult {
    std::uint64_t seed = 0;
    std::vector<std::vector<StepRecord>> episodes;
    std::string posterior_csv;  // nonempty for centaur runs
};

/// Runs all episodes for one seed. The particle belief persists across the
/// episodes of a seed; the posterior trace records one block per observed
/// protocol round.
inline SeedResult run_seed(const ExperimentSpec& spec, const ExperimentContext& ctx,
                           std::uint64_t seed) {
    SeedResult result;
    result.seed = seed;
    PlannerMachine* planner_machine = nullptr;
    auto machine = make_machine_agent(spec, ctx, seed, &planner_machine);

    std::ostringstream posterior;
    std::size_t global_step = 0;
    if (spec.mode == ArmMode::Centaur && planner_machine) {
        posterior << posterior_csv_header(ctx.param_kind) << '\n';
        planner_machine->set_posterior_callback([&](const ParticleBelief& belief) {
            append_posterior_rows(posterior, global_step, belief);
            ++global_step;
        });
    }

    for (std::size_t e = 0; e < spec.episodes; ++e) {
        std::uint64_t episode_seed = splitmix64(seed ^ splitmix64(0xe9150deULL + e));
        result.episodes.push_back(run_episode(ctx.cfg, *machine, episode_seed));
    }
    if (spec.mode == ArmMode::Centaur) result.posterior_csv = posterior.str();
    return result;
}

struct SummaryRow {
    std::string arm;
    std::size_t index = 0;  // episode (food truck) or step (food shelter)
    double mean = 0.0;
    double stderr_ = 0.0;
    double running_mean = 0.0;
};

inline std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    return {mean, sd / std::sqrt(static_cast<double>(xs.size()))};
}

/// Food truck: one row per episode with the mean return across seeds.
/// Food shelter: one row per step with the mean cumulative return.
inline std::vector<SummaryRow> summarize(const ExperimentSpec& spec,
                                         const std::vector<SeedResult>& seeds) {
    std::vector<SummaryRow> rows;
    std::string arm = to_string(spec.mode);
    if (spec.experiment == ExperimentKind::FoodTruck) {
        double running = 0.0;
        for (std::size_t e = 0; e < spec.episodes; ++e) {
            std::vector<double> returns;
            for (const auto& sr : seeds) returns.push_back(episode_machine_return(sr.episodes[e]));
            auto [mean, se] = mean_and_stderr(returns);
            running += mean;
            rows.push_back({arm, e, mean, se, running / static_cast<double>(e + 1)});
        }
    } else {
        for (std::size_t t = 0; t < spec.horizon; ++t) {
            std::vector<double> cumulative;
            for (const auto& sr : seeds) {
                double acc = 0.0;
                for (const auto& log : sr.episodes)
                    for (std::size_t i = 0; i < log.size() && log[i].t <= t; ++i) acc += log[i].r_m;
                cumulative.push_back(acc / static_cast<double>(sr.episodes.size()));
            }
            auto [mean, se] = mean_and_stderr(cumulative);
            rows.push_back({arm, t, mean, se, mean});
        }
    }
    return rows;
}

inline std::string summary_csv_header() { return "arm,index,mean_return,stderr,running_mean"; }

inline void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out(path);
    out << summary_csv_header() << '\n';
    out << std::setprecision(12);
    for (const auto& r : rows)
        out << r.arm << ',' << r.index << ',' << r.mean << ',' << r.stderr_ << ','
            << r.running_mean << '\n';
}

struct ExperimentResult {
    std::vector<SeedResult> seeds;
    std::vector<SummaryRow> summary;
    std::filesystem::path summary_path;
};

/// Runs one experiment arm end to end: seeds (optionally in parallel), episode
/// CSVs, posterior traces, the summary table and the run metadata.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const ExperimentContext& ctx,
                                       std::ostream* log = nullptr) {
    validate_spec(spec);
    namespace fs = std::filesystem;
    fs::path dir = fs::path(spec.output_dir) / (to_string(spec.experiment) + "_" + to_string(spec.mode));
    fs::create_directories(dir);

    ExperimentResult result;
    result.seeds.resize(spec.seeds.size());
    std::size_t workers = std::max<std::size_t>(1, spec.threads);
    if (workers > 1) {
        std::vector<std::future<void>> jobs;
        for (std::size_t w = 0; w < workers; ++w)
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < spec.seeds.size(); i += workers)
                    result.seeds[i] = run_seed(spec, ctx, spec.seeds[i]);
            }));
        for (auto& j : jobs) j.get();
    } else {
        for (std::size_t i = 0; i < spec.seeds.size(); ++i)
            result.seeds[i] = run_seed(spec, ctx, spec.seeds[i]);
    }

    for (std::size_t i = 0; i < result.seeds.size(); ++i) {
        const auto& sr = result.seeds[i];
        for (std::size_t e = 0; e < sr.episodes.size(); ++e) {
            std::ostringstream name;
            name << "episode_seed" << sr.seed << "_ep" << e << ".csv";
            write_episode_csv((dir / name.str()).string(), sr.episodes[e]);
        }
        if (!sr.posterior_csv.empty()) {
            std::ofstream out(dir / ("posterior_seed" + std::to_string(sr.seed) + ".csv"));
            out << sr.posterior_csv;
        }
    }

    result.summary = summarize(spec, result.seeds);
    result.summary_path = dir / "summary.csv";
    write_summary_csv(result.summary_path.string(), result.summary);

    nlohmann::json meta;
    meta["spec"] = spec_to_json(spec);
    meta["version"] = kVersion;
    meta["single_worker"] = spec.threads <= 1;
    std::ofstream meta_out(dir / "metadata.json");
    meta_out << meta.dump(2) << '\n';

    if (log) *log << "wrote " << result.summary_path.string() << "\n";
    return result;
}

/// Reference trajectory returns for the Food Truck figure: the direct route,
/// the detour route, and the rollout of a given human policy (the tempted
/// trajectory when the policy is a high-gamma human's greedy).
struct FoodTruckReferences {
    double blue = 0.0, purple = 0.0, red = 0.0;
};

inline FoodTruckReferences food_truck_references(const FoodTruckEnv& env, const Policy& human_policy,
                                                 std::size_t horizon = 64) {
    FoodTruckReferences refs;
    refs.blue = rollout_action_return(env, shortest_route(env, CellType::Vegan, 0), horizon);
    refs.purple = rollout_action_return(env, shortest_route(env, CellType::Vegan, 1), horizon);
    refs.red = evaluate_return(env.model, human_policy, env.start_state, horizon, {0})[0];
    return refs;
}

/// Loads a spec's environment, solves/loads the particle cache (centaur mode
/// only) and runs the arm end to end.
inline ExperimentResult run_benchmark_arm(const ExperimentSpec& spec, std::ostream* log = nullptr) {
    validate_spec(spec);
    switch (spec.experiment) {
        case ExperimentKind::FoodTruck: {
            auto layout = layout_from_file(spec.layout_path.empty() ? default_layout_path()
                                                                    : spec.layout_path);
            auto env = build_food_truck(layout);
            SolveCacheResult cache;
            if (spec.mode == ArmMode::Centaur)
                cache = solve_cache(spec, food_truck_grid(),
                                    [&](double gamma) {
                                        return hyperbolic_q(env.model, gamma, spec.hyperbolic_grid,
                                                            /*parallel=*/false);
                                    },
                                    log);
            auto ctx = make_food_truck_context(spec, env, cache);
            auto result = run_experiment(spec, ctx, log);
            // Drop the trajectory reference lines next to the summary.
            auto refs = food_truck_references(env, ctx.cfg.stm_h.policy(), spec.horizon);
            std::ofstream ref_out(result.summary_path.parent_path() / "references.csv");
            ref_out << "name,value\n"
                    << std::setprecision(12) << "blue," << refs.blue << "\npurple," << refs.purple
                    << "\nred," << refs.red << '\n';
            return result;
        }
        case ExperimentKind::FoodShelter:
        case ExperimentKind::FoodShelterSwapped:
        case ExperimentKind::FoodShelterBothCorrect: {
            SolveCacheResult cache;
            if (spec.mode == ArmMode::Centaur)
                cache = solve_cache(spec, food_shelter_grid(),
                                    [&](double eps) {
                                        auto [t, h] = build_food_shelter(spec.shelter, eps);
                                        return value_iteration(h, spec.human_lambda);
                                    },
                                    log);
            auto ctx = make_food_shelter_context(spec, cache);
            return run_experiment(spec, ctx, log);
        }
        case ExperimentKind::Alignment:
            throw InvalidSpec("alignment runs through run_alignment_suite");
    }
    throw InvalidSpec("unhandled experiment kind");
}

/// The alignment arm: random in-regime instances, one BoundReport row each.
inline std::filesystem::path run_alignment_suite(
    const ExperimentSpec& spec,
    const std::function<void(std::size_t, const BoundReport&)>& on_report = {}) {
    namespace fs = std::filesystem;
    fs::path dir = fs::path(spec.output_dir) / "alignment";
    fs::create_directories(dir);
    fs::path path = dir / "bound_reports.csv";
    std::ofstream out(path);
    out << "instance_id,alpha,gamma,eps_O,kl_before,lhs,rhs,holds,gamma_method\n";
    out << std::setprecision(12);

    auto rng = derive_stream(spec.instance_seed, StreamPurpose::InstanceGeneration);
    const double mu = 1e-3;
    for (std::size_t i = 0; i < spec.instances; ++i) {
        auto inst = random_alignment_instance(rng, 5, 5, 0.2, mu);
        BoundReport report = theorem_6_4_check(inst.hmm, inst.b_m, inst.b_h, mu);
        out << i << ',' << report.alpha << ',' << report.gamma_obs << ',' << report.epsilon_O << ','
            << report.kl_before << ',' << report.lhs << ',' << report.rhs << ','
            << (report.holds ? 1 : 0) << ',' << (report.gamma_exact ? "exact_lp" : "local_search")
            << '\n';
        if (on_report) on_report(i, report);
    }

    nlohmann::json meta;
    meta["spec"] = spec_to_json(spec);
    meta["version"] = kVersion;
    std::ofstream meta_out(dir / "metadata.json");
    meta_out << meta.dump(2) << '\n';
    return path;
}

}  // namespace centaur
