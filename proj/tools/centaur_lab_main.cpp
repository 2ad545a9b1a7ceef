// centaur-lab: experiment harness for the human-machine centaur framework.
//
//   centaur-lab <experiment> --mode <m> --seeds a..b [--config file] [--out dir]
//   centaur-lab alignment --instances N --seed s [--out dir]
//   centaur-lab solve-cache --experiment <e> [--config file]
//   centaur-lab plot <summary.csv> [--out plot.svg]
//
// Exit codes: 0 success, 2 invalid spec, 3 runtime error (partial outputs are
// left in place).

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "centaur/experiments.hpp"
#include "centaur/plotting.hpp"

using namespace centaur;

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    auto dots = text.find("..");
    if (dots != std::string::npos) {
        std::uint64_t lo = std::stoull(text.substr(0, dots));
        std::uint64_t hi = std::stoull(text.substr(dots + 2));
        if (hi < lo) throw InvalidSpec("seed range is reversed: " + text);
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) seeds.push_back(std::stoull(field));
    if (seeds.empty()) throw InvalidSpec("no seeds in: " + text);
    return seeds;
}

struct ArmOptions {
    std::string mode = "centaur";
    std::string seeds;
    std::string config;
    std::string out;
    std::string cache;
    std::string layout;
    double gamma = -1.0, epsilon = -1.0, c_h = -1.0, c_m = -1.0;
    long long episodes = -1, horizon = -1, iterations = -1, threads = -1;
};

void add_arm_options(CLI::App* cmd, ArmOptions& opts) {
    cmd->add_option("--mode", opts.mode, "centaur | naive | ideal | human");
    cmd->add_option("--seeds", opts.seeds, "seed range a..b or comma list");
    cmd->add_option("--config", opts.config, "JSON spec file (flags override it)");
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--cache", opts.cache, "particle cache directory");
    cmd->add_option("--layout", opts.layout, "food-truck layout JSON");
    cmd->add_option("--gamma", opts.gamma, "true human discount (food truck)");
    cmd->add_option("--epsilon", opts.epsilon, "true human noise inflation (food shelter)");
    cmd->add_option("--ch", opts.c_h, "true human override cost");
    cmd->add_option("--cm", opts.c_m, "machine override cost");
    cmd->add_option("--episodes", opts.episodes, "episodes per seed");
    cmd->add_option("--horizon", opts.horizon, "steps per episode");
    cmd->add_option("--iterations", opts.iterations, "planner iterations");
    cmd->add_option("--threads", opts.threads, "worker threads (1 = deterministic single-worker)");
}

ExperimentSpec build_spec(ExperimentKind kind, const ArmOptions& opts) {
    ExperimentSpec spec;
    if (!opts.config.empty()) {
        std::ifstream in(opts.config);
        if (!in) throw InvalidSpec("cannot open config: " + opts.config);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw InvalidSpec(std::string("bad config JSON: ") + e.what());
        }
        j["experiment"] = to_string(kind);
        if (!j.contains("mode")) j["mode"] = opts.mode;
        spec = spec_from_json(j);
    } else {
        spec = ExperimentSpec::defaults_for(kind, mode_from_string(opts.mode));
    }
    spec.mode = mode_from_string(opts.mode);
    if (!opts.seeds.empty()) spec.seeds = parse_seeds(opts.seeds);
    if (!opts.out.empty()) spec.output_dir = opts.out;
    if (!opts.cache.empty()) spec.cache_dir = opts.cache;
    if (!opts.layout.empty()) spec.layout_path = opts.layout;
    if (opts.gamma >= 0.0) spec.true_gamma = opts.gamma;
    if (opts.epsilon >= 0.0) spec.true_epsilon = opts.epsilon;
    if (opts.c_h >= 0.0) spec.true_c_h = opts.c_h;
    if (opts.c_m >= 0.0) spec.c_m = opts.c_m;
    if (opts.episodes > 0) spec.episodes = static_cast<std::size_t>(opts.episodes);
    if (opts.horizon > 0) spec.horizon = static_cast<std::size_t>(opts.horizon);
    if (opts.iterations > 0) spec.planner.iterations = static_cast<std::size_t>(opts.iterations);
    if (opts.threads > 0) spec.threads = static_cast<std::size_t>(opts.threads);
    validate_spec(spec);
    return spec;
}

int run_arm(ExperimentKind kind, const ArmOptions& opts) {
    ExperimentSpec spec = build_spec(kind, opts);
    auto result = run_benchmark_arm(spec, &std::cout);
    std::cout << "arm " << to_string(spec.experiment) << '/' << to_string(spec.mode)
              << ": final mean return " << result.summary.back().mean << " (stderr "
              << result.summary.back().stderr_ << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"centaur-lab: planning with a learned human override model"};
    app.require_subcommand(1);

    ArmOptions ft_opts, fs_opts, fsw_opts, fsb_opts;
    auto* foodtruck = app.add_subcommand("foodtruck", "time-inconsistent human gridworld");
    add_arm_options(foodtruck, ft_opts);
    auto* foodshelter = app.add_subcommand("foodshelter", "noise-overestimating human gridworld");
    add_arm_options(foodshelter, fs_opts);
    auto* swapped = app.add_subcommand("foodshelter_swapped", "machine wrong, human correct");
    add_arm_options(swapped, fsw_opts);
    auto* bothcorrect = app.add_subcommand("foodshelter_bothcorrect", "both models correct");
    add_arm_options(bothcorrect, fsb_opts);

    std::size_t align_instances = 200;
    std::uint64_t align_seed = 0;
    std::string align_out = "out";
    auto* alignment = app.add_subcommand("alignment", "belief-alignment bound suite");
    alignment->add_option("--instances", align_instances, "number of random instances");
    alignment->add_option("--seed", align_seed, "instance generator seed");
    alignment->add_option("--out", align_out, "output directory");

    std::string cache_experiment = "foodshelter";
    std::string cache_config;
    std::string cache_dir = "cache";
    auto* cache_cmd = app.add_subcommand("solve-cache", "pre-solve the particle grid");
    cache_cmd->add_option("--experiment", cache_experiment, "grid family: foodtruck | foodshelter");
    cache_cmd->add_option("--config", cache_config, "JSON spec file");
    cache_cmd->add_option("--cache", cache_dir, "cache directory");

    std::string plot_summary_path, plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "render a summary CSV as an SVG");
    plot_cmd->add_option("summary", plot_summary_path, "summary.csv")->required();
    plot_cmd->add_option("--out", plot_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad command line counts as an invalid spec
    }

    try {
        if (foodtruck->parsed()) return run_arm(ExperimentKind::FoodTruck, ft_opts);
        if (foodshelter->parsed()) return run_arm(ExperimentKind::FoodShelter, fs_opts);
        if (swapped->parsed()) return run_arm(ExperimentKind::FoodShelterSwapped, fsw_opts);
        if (bothcorrect->parsed()) return run_arm(ExperimentKind::FoodShelterBothCorrect, fsb_opts);

        if (alignment->parsed()) {
            ExperimentSpec spec =
                ExperimentSpec::defaults_for(ExperimentKind::Alignment, ArmMode::Centaur);
            spec.instances = align_instances;
            spec.instance_seed = align_seed;
            spec.output_dir = align_out;
            validate_spec(spec);
            std::size_t violations = 0;
            auto path = run_alignment_suite(spec, [&](std::size_t, const BoundReport& r) {
                if (!r.holds) ++violations;
            });
            std::cout << "wrote " << path.string() << " (" << spec.instances << " instances, "
                      << violations << " violations)\n";
            return violations == 0 ? 0 : 3;
        }

        if (cache_cmd->parsed()) {
            ArmOptions opts;
            opts.config = cache_config;
            opts.cache = cache_dir;
            ExperimentKind kind = experiment_from_string(cache_experiment);
            ExperimentSpec spec = build_spec(kind, opts);
            SolveCacheResult cache;
            if (kind == ExperimentKind::FoodTruck) {
                auto layout = layout_from_file(spec.layout_path.empty() ? default_layout_path()
                                                                        : spec.layout_path);
                auto env = build_food_truck(layout);
                cache = solve_cache(spec, food_truck_grid(),
                                    [&](double gamma) {
                                        return hyperbolic_q(env.model, gamma, spec.hyperbolic_grid,
                                                            false);
                                    },
                                    &std::cout);
            } else {
                cache = solve_cache(spec, food_shelter_grid(),
                                    [&](double eps) {
                                        auto [t, h] = build_food_shelter(spec.shelter, eps);
                                        return value_iteration(h, spec.human_lambda);
                                    },
                                    &std::cout);
            }
            std::cout << (cache.cache_hit ? "cache hit" : "solved") << ": "
                      << cache.cached_particles << " particles\n";
            return 0;
        }

        if (plot_cmd->parsed()) {
            std::string out = plot_out.empty() ? std::filesystem::path(plot_summary_path)
                                                     .replace_extension(".svg")
                                                     .string()
                                               : plot_out;
            std::vector<ReferenceLine> refs;
            auto ref_path =
                std::filesystem::path(plot_summary_path).parent_path() / "references.csv";
            if (std::filesystem::exists(ref_path)) {
                std::ifstream in(ref_path);
                std::string line;
                std::getline(in, line);  // header
                while (std::getline(in, line)) {
                    auto comma = line.find(',');
                    if (comma == std::string::npos) continue;
                    refs.push_back({line.substr(0, comma), std::stod(line.substr(comma + 1))});
                }
            }
            plot_summary_file(plot_summary_path, out, refs);
            std::cout << "wrote " << out << '\n';
            return 0;
        }
    } catch (const InvalidSpec& e) {
        std::cerr << "invalid spec: " << e.what() << '\n';
        return 2;
    } catch (const InvalidLayout& e) {
        std::cerr << "invalid spec: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
