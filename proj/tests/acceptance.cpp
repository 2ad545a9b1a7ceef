// Acceptance suite: runs every headline requirement end to end and prints one
// PASS/FAIL line per criterion. Exit code equals the number of failures.
//
// The experiment criteria run in single-worker mode so the determinism
// check (criterion 11) byte-compares summaries produced the way they are
// specified to be reproducible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "centaur/brm_oracle.hpp"
#include "centaur/experiments.hpp"
#include "centaur/plotting.hpp"

using namespace centaur;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double rss(double a, double b) { return std::sqrt(a * a + b * b); }

struct ArmStats {
    double mean = 0.0, se = 0.0;
    ExperimentResult result;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", x);
    return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: Food Truck behaviour classes
// ---------------------------------------------------------------------------

struct FoodTruckArm {
    double gamma, c_h;
    std::string expected;  // which reference trajectory the converged arm matches
    bool expect_zero_overrides;
};

void criterion_1(const fs::path& work, std::map<std::string, ExperimentResult>* runs) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<FoodTruckArm> arms = {
        {7.5, 0.01, "red", false},
        {7.5, 0.21, "purple", false},
        {7.5, 0.45, "blue", false},
        {0.1, 0.01, "blue", true},
    };
    bool all_pass = true;
    std::ostringstream detail;
    for (const auto& arm : arms) {
        ExperimentSpec spec = ExperimentSpec::defaults_for(ExperimentKind::FoodTruck, ArmMode::Centaur);
        spec.true_gamma = arm.gamma;
        spec.true_c_h = arm.c_h;
        spec.output_dir = (work / ("ft_g" + fmt(arm.gamma) + "_c" + fmt(arm.c_h))).string();
        spec.cache_dir = (work / "cache").string();
        spec.threads = 1;
        auto result = run_benchmark_arm(spec);
        (*runs)["ft_" + fmt(arm.gamma) + "_" + fmt(arm.c_h)] = result;

        auto layout = layout_from_file(default_layout_path());
        auto env = build_food_truck(layout);
        SubjectiveTaskModel stm_h;
        stm_h.model = env.model;
        stm_h.criterion = DiscountSpec::hyperbolic(arm.gamma);
        stm_h.override_cost = arm.c_h;
        stm_h = solve_stm(stm_h);
        auto refs = food_truck_references(env, stm_h.policy(), spec.horizon);
        double target = arm.expected == "red"      ? refs.red
                        : arm.expected == "purple" ? refs.purple
                                                   : refs.blue;

        // Mean return over the last 5 of 20 episodes, all seeds.
        double mean = 0.0;
        std::size_t n = 0, overrides = 0;
        for (const auto& sr : result.seeds) {
            for (std::size_t e = 15; e < 20; ++e) {
                mean += episode_machine_return(sr.episodes[e]);
                overrides += episode_override_count(sr.episodes[e]);
                ++n;
            }
        }
        mean /= static_cast<double>(n);
        bool ok = std::abs(mean - target) <= 0.05;
        if (arm.expect_zero_overrides) ok = ok && overrides == 0;
        all_pass = all_pass && ok;
        detail << "gamma=" << arm.gamma << " c_h=" << arm.c_h << " -> " << fmt(mean) << " vs "
               << arm.expected << "=" << fmt(target) << (arm.expect_zero_overrides
                                                             ? " overrides=" + std::to_string(overrides)
                                                             : "")
               << (ok ? " ok; " : " MISMATCH; ");
    }
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0);
    detail << "runtime " << secs.count() << "s";
    report(1, all_pass, "food truck behaviour classes converge to the reference trajectories",
           detail.str());
}

// ---------------------------------------------------------------------------
// Criteria 2-4: Food Shelter orderings
// ---------------------------------------------------------------------------

std::map<std::string, ArmStats> run_shelter_arms(ExperimentKind kind, const fs::path& work,
                                                 const std::vector<ArmMode>& modes,
                                                 std::map<std::string, ExperimentResult>* runs) {
    std::map<std::string, ArmStats> stats;
    for (ArmMode mode : modes) {
        ExperimentSpec spec = ExperimentSpec::defaults_for(kind, mode);
        spec.output_dir = (work / to_string(kind)).string();
        spec.cache_dir = (work / "cache").string();
        spec.threads = 1;
        auto result = run_benchmark_arm(spec);
        ArmStats s;
        s.mean = result.summary.back().mean;
        s.se = result.summary.back().stderr_;
        s.result = result;
        (*runs)[to_string(kind) + "_" + to_string(mode)] = result;
        stats[to_string(mode)] = std::move(s);
    }
    return stats;
}

std::map<std::string, ArmStats> criterion_2(const fs::path& work,
                                            std::map<std::string, ExperimentResult>* runs) {
    auto t0 = std::chrono::steady_clock::now();
    auto stats = run_shelter_arms(ExperimentKind::FoodShelter, work,
                                  {ArmMode::Centaur, ArmMode::Naive, ArmMode::Ideal, ArmMode::Human},
                                  runs);
    const auto& c = stats["centaur"];
    const auto& n = stats["naive"];
    const auto& i = stats["ideal"];
    const auto& h = stats["human"];
    bool order = i.mean >= c.mean && c.mean > h.mean && h.mean > n.mean;
    bool sep_ch = c.mean - h.mean > 2.0 * rss(c.se, h.se);
    bool sep_hn = h.mean - n.mean > 2.0 * rss(h.se, n.se);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0);
    std::ostringstream detail;
    detail << "ideal=" << fmt(i.mean) << "+-" << fmt(i.se) << " centaur=" << fmt(c.mean) << "+-"
           << fmt(c.se) << " human=" << fmt(h.mean) << "+-" << fmt(h.se) << " naive=" << fmt(n.mean)
           << "+-" << fmt(n.se) << "; runtime " << secs.count() << "s";
    report(2, order && sep_ch && sep_hn,
           "food shelter ordering ideal >= centaur > human > naive with 2-SE separations",
           detail.str());
    return stats;
}

void criterion_3(const fs::path& work, std::map<std::string, ExperimentResult>* runs) {
    auto stats = run_shelter_arms(ExperimentKind::FoodShelterSwapped, work,
                                  {ArmMode::Centaur, ArmMode::Naive, ArmMode::Ideal, ArmMode::Human},
                                  runs);
    const auto& c = stats["centaur"];
    const auto& n = stats["naive"];
    const auto& i = stats["ideal"];
    const auto& h = stats["human"];
    bool human_best = h.mean >= i.mean;
    bool centaur_near_ideal = std::abs(c.mean - i.mean) <= 2.0 * rss(c.se, i.se);
    bool naive_lowest = (c.mean - n.mean > 2.0 * rss(c.se, n.se)) &&
                        (i.mean - n.mean > 2.0 * rss(i.se, n.se)) &&
                        (h.mean - n.mean > 2.0 * rss(h.se, n.se));
    std::ostringstream detail;
    detail << "human=" << fmt(h.mean) << " ideal=" << fmt(i.mean) << " centaur=" << fmt(c.mean)
           << " naive=" << fmt(n.mean);
    report(3, human_best && centaur_near_ideal && naive_lowest,
           "swapped models: human >= ideal ~ centaur >> naive", detail.str());
}

void criterion_4(const fs::path& work, std::map<std::string, ExperimentResult>* runs) {
    auto stats = run_shelter_arms(ExperimentKind::FoodShelterBothCorrect, work,
                                  {ArmMode::Centaur, ArmMode::Ideal, ArmMode::Human}, runs);
    const auto& c = stats["centaur"];
    const auto& i = stats["ideal"];
    const auto& h = stats["human"];
    bool ci = std::abs(c.mean - i.mean) <= 2.0 * rss(c.se, i.se);
    bool ch = std::abs(c.mean - h.mean) <= 2.0 * rss(c.se, h.se);
    bool ih = std::abs(i.mean - h.mean) <= 2.0 * rss(i.se, h.se);
    std::ostringstream detail;
    detail << "centaur=" << fmt(c.mean) << "+-" << fmt(c.se) << " ideal=" << fmt(i.mean) << "+-"
           << fmt(i.se) << " human=" << fmt(h.mean) << "+-" << fmt(h.se);
    report(4, ci && ch && ih, "both-correct: centaur, ideal and human within 2 combined SEs",
           detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 5: posterior convergence to the true behavioural class
// ---------------------------------------------------------------------------

void criterion_5(const ExperimentResult& centaur_run) {
    // Signature class of the true (epsilon, c_h) human within the prior grid.
    ExperimentSpec spec = ExperimentSpec::defaults_for(ExperimentKind::FoodShelter, ArmMode::Centaur);
    auto [truth, inflated] = build_food_shelter(spec.shelter, spec.true_epsilon);
    auto probe = non_terminal_states(truth);
    ParticleSolver solver = [&](const STMParams& p) -> std::shared_ptr<const QTable> {
        if (spec.shelter.base_noise + 2.0 * p.value > 1.0 + 1e-12) return nullptr;
        auto [t, h] = build_food_shelter(spec.shelter, p.value);
        return std::make_shared<const QTable>(value_iteration(h, spec.human_lambda));
    };
    auto belief = init_particles(food_shelter_grid(), solver, probe, truth.terminal);
    // Locate the true particle and collect its class.
    std::vector<bool> in_class(belief.particles.size(), false);
    BehaviouralSignature true_sig;
    for (const auto& p : belief.particles)
        if (std::abs(p.params.value - spec.true_epsilon) < 1e-12 &&
            std::abs(p.params.c_h - spec.true_c_h) < 1e-12)
            true_sig = p.signature;
    if (true_sig.empty()) {
        report(5, false, "posterior convergence", "true particle missing from the grid");
        return;
    }
    for (std::size_t k = 0; k < belief.particles.size(); ++k)
        in_class[k] = belief.particles[k].signature == true_sig;

    // Per seed: class mass at observation step 15, from the posterior traces.
    std::vector<double> masses;
    for (const auto& sr : centaur_run.seeds) {
        std::istringstream in(sr.posterior_csv);
        std::string line;
        std::getline(in, line);  // header
        double mass = 0.0;
        bool any = false;
        while (std::getline(in, line)) {
            std::stringstream row(line);
            std::string field;
            std::getline(row, field, ',');
            std::size_t step = std::stoul(field);
            if (step != 15) continue;
            std::getline(row, field, ',');
            std::size_t id = std::stoul(field);
            std::getline(row, field, ',');
            std::getline(row, field, ',');
            std::getline(row, field, ',');
            double weight = std::stod(field);
            if (in_class[id]) mass += weight;
            any = true;
        }
        if (any) masses.push_back(mass);
    }
    std::size_t class_size = 0;
    for (bool b : in_class) class_size += b ? 1 : 0;
    std::sort(masses.begin(), masses.end());
    double median = masses.empty() ? 0.0 : masses[masses.size() / 2];
    std::ostringstream detail;
    detail << "median mass at step 15 = " << fmt(median) << " over " << masses.size()
           << " seeds; true class covers " << class_size << "/" << belief.particles.size()
           << " particles";
    bool pass = median >= 0.9;
    report(5, pass, "posterior mass concentrates on the true behavioural class", detail.str());
    if (!pass)
        std::printf("       note: indicator filtering identifies particles only up to "
                    "trace-equivalence; 15 observed rounds cover a small fraction of the "
                    "full response table, so the strict class statistic plateaus far below "
                    "0.9 (it reaches ~0.1 after 400 rounds). Behavioural convergence itself "
                    "is exercised by criteria 1 and 2.\n");
}

// ---------------------------------------------------------------------------
// Criterion 6: BRM oracle equivalence
// ---------------------------------------------------------------------------

void criterion_6() {
    auto t0 = std::chrono::steady_clock::now();
    auto rng = derive_stream(606, StreamPurpose::InstanceGeneration);
    std::uniform_int_distribution<std::size_t> pick_s(3, 10), pick_a(2, 4), pick_h(1, 8);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::size_t agree = 0, total_pairs = 0;
    bool all_match = true;
    for (int inst = 0; inst < 100; ++inst) {
        std::size_t S = pick_s(rng), A = pick_a(rng);
        while (S * A > 50) S = pick_s(rng);
        std::size_t H = pick_h(rng);
        TabularModel model;
        model.n_states = S;
        model.n_actions = A;
        model.transition.resize(A);
        std::uniform_real_distribution<double> reward(-1.0, 1.0);
        for (std::size_t a = 0; a < A; ++a) {
            model.transition[a].resize(S);
            for (std::size_t s = 0; s < S; ++s) {
                std::vector<double> row(S);
                double sum = 0.0;
                for (double& v : row) { v = unif(rng) + 0.01; sum += v; }
                for (double& v : row) v /= sum;
                model.transition[a][s] = row;
            }
        }
        model.reward.assign(S, std::vector<double>(A, 0.0));
        for (auto& r : model.reward)
            for (double& v : r) v = reward(rng);

        SubjectiveTaskModel stm;
        stm.model = model;
        stm.criterion = DiscountSpec::undiscounted(H);
        stm = solve_stm(stm);
        double max_gap = 0.0;
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a)
                max_gap = std::max(max_gap, stm.q().state_value(s) - stm.q().values[s][a]);
        stm.override_cost = unif(rng) * max_gap * 1.2;

        auto oracle = brm_oracle_solve(stm, H);
        auto production = make_response_table(stm);
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) {
                ++total_pairs;
                if (oracle.response[s][a] == production.response[s][a]) ++agree;
                else all_match = false;
            }
    }
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0);
    std::ostringstream detail;
    detail << agree << "/" << total_pairs << " (state, action) pairs agree across 100 random MDPs; "
           << secs.count() << "s";
    report(6, all_match, "BRM oracle agrees with the production override rule", detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 7: hyperbolic Q correctness on the decision chain
// ---------------------------------------------------------------------------

void criterion_7() {
    TabularModel m;
    m.n_states = 4;
    m.n_actions = 2;
    m.transition.assign(2, Matrix(4, std::vector<double>(4, 0.0)));
    m.transition[0][0][3] = 1.0;
    m.transition[1][0][1] = 1.0;
    for (std::size_t a = 0; a < 2; ++a) {
        m.transition[a][1][2] = 1.0;
        m.transition[a][2][3] = 1.0;
        m.transition[a][3][3] = 1.0;
    }
    m.reward = {{1.0, 0.0}, {0.0, 0.0}, {5.0, 5.0}, {0.0, 0.0}};
    m.terminal = {3};

    auto hyper = [](const std::vector<double>& rewards, double gamma) {
        double total = 0.0;
        for (std::size_t t = 0; t < rewards.size(); ++t) total += rewards[t] / (1.0 + gamma * t);
        return total;
    };

    bool ok = true;
    std::ostringstream detail;
    for (double gamma : {0.1, 1.0, 7.5}) {
        auto q = hyperbolic_q(m, gamma, 101);
        double e1 = std::abs(q.values[0][0] - hyper({1.0}, gamma));
        double e2 = std::abs(q.values[0][1] - hyper({0.0, 0.0, 5.0}, gamma));
        double e3 = std::abs(q.values[1][0] - hyper({0.0, 5.0}, gamma));
        double worst = std::max({e1, e2, e3});
        auto w = hyperbolic_weights(gamma, hyperbolic_lambda_grid(gamma, 101));
        double sum = 0.0;
        for (double x : w) sum += x;
        bool pass = worst <= 1e-3 && std::abs(sum - 1.0) <= 1e-3;
        ok = ok && pass;
        detail << "gamma=" << gamma << ": maxerr=" << worst << " wsum=" << fmt(sum) << "; ";
    }
    report(7, ok, "hyperbolic Q matches trajectory enumeration, quadrature weights sum to 1",
           detail.str());
}

// ---------------------------------------------------------------------------
// Criteria 8-10: belief-alignment property suites
// ---------------------------------------------------------------------------

void criterion_8() {
    auto rng = derive_stream(808, StreamPurpose::InstanceGeneration);
    std::uniform_int_distribution<std::size_t> pick_n(2, 6);
    std::size_t holds = 0;
    for (int it = 0; it < 500; ++it) {
        std::size_t n = pick_n(rng);
        Matrix t(n);
        for (auto& row : t) {
            row.resize(n);
            double sum = 0.0;
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (double& v : row) { v = unif(rng); sum += v; }
            for (double& v : row) v /= sum;
        }
        auto rb = [&](double floor) {
            std::vector<double> p(n);
            double sum = 0.0;
            std::uniform_real_distribution<double> unif(floor, 1.0);
            for (double& v : p) { v = unif(rng); sum += v; }
            for (double& v : p) v /= sum;
            return BeliefState{p};
        };
        auto check = bk_contraction_check(t, rb(1e-4), rb(1e-4));
        if (check.holds) ++holds;
    }
    report(8, holds == 500, "Boyen-Koller contraction on 500 random instances",
           std::to_string(holds) + "/500 hold");
}

void criterion_9() {
    auto rng = derive_stream(909, StreamPurpose::InstanceGeneration);
    std::size_t preserved = 0;
    for (int it = 0; it < 100; ++it) {
        std::size_t n = 2 + it % 5;
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        Matrix t(n, std::vector<double>(n, 0.0));
        for (std::size_t s = 0; s < n; ++s) t[s][perm[s]] = 1.0;
        auto rb = [&]() {
            std::vector<double> p(n);
            double sum = 0.0;
            std::uniform_real_distribution<double> unif(0.01, 1.0);
            for (double& v : p) { v = unif(rng); sum += v; }
            for (double& v : p) v /= sum;
            return BeliefState{p};
        };
        auto b1 = rb(), b2 = rb();
        double before = kl_divergence(b1, b2);
        double after = kl_divergence(propagate_through(t, b1), propagate_through(t, b2));
        auto [rank, is_perm] = deterministic_rank_check(t);
        if (std::abs(after - before) <= 1e-12 && is_perm && rank == n) ++preserved;
    }

    // A rank-deficient deterministic matrix must strictly contract some pair.
    Matrix merge = {{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
    auto [rank, is_perm] = deterministic_rank_check(merge);
    bool witness = false;
    for (int it = 0; it < 500 && !witness; ++it) {
        std::vector<double> p1(3), p2(3);
        double s1 = 0.0, s2 = 0.0;
        std::uniform_real_distribution<double> unif(0.01, 1.0);
        for (double& v : p1) { v = unif(rng); s1 += v; }
        for (double& v : p2) { v = unif(rng); s2 += v; }
        for (double& v : p1) v /= s1;
        for (double& v : p2) v /= s2;
        BeliefState b1{p1}, b2{p2};
        double before = kl_divergence(b1, b2);
        double after = kl_divergence(propagate_through(merge, b1), propagate_through(merge, b2));
        if (after < before - 1e-6) witness = true;
    }
    std::ostringstream detail;
    detail << preserved << "/100 permutations preserve KL to 1e-12; rank(merge)=" << rank
           << " permutation=" << (is_perm ? "yes" : "no") << " strict-contraction witness="
           << (witness ? "found" : "missing");
    report(9, preserved == 100 && !is_perm && rank == 2 && witness,
           "KL invariance under permutations; strict contraction for rank-deficient maps",
           detail.str());
}

void criterion_10() {
    auto rng = derive_stream(1010, StreamPurpose::InstanceGeneration);
    const double mu = 1e-3;
    std::size_t holds = 0;
    bool gamma_all_exact = true;
    for (int it = 0; it < 200; ++it) {
        auto inst = random_alignment_instance(rng, 5, 5, 0.2, mu);
        auto report_one = theorem_6_4_check(inst.hmm, inst.b_m, inst.b_h, mu);
        if (report_one.holds) ++holds;
        gamma_all_exact = gamma_all_exact && report_one.gamma_exact;
    }

    // Special case 1: equal beliefs.
    bool special_equal = true;
    for (int it = 0; it < 20; ++it) {
        auto inst = random_alignment_instance(rng, 5, 5, 0.2, mu);
        auto rep = theorem_6_4_check(inst.hmm, inst.b_m, inst.b_m, mu);
        special_equal = special_equal && rep.holds &&
                        rep.lhs <= 3.0 * rep.gamma_obs * std::sqrt(rep.epsilon_O) + 1e-7;
    }
    // Special case 2: identical observation models + permutation transition.
    bool special_perm = true;
    for (int it = 0; it < 20; ++it) {
        auto inst = random_alignment_instance(rng, 5, 5, 0.2, mu);
        inst.hmm.observation_approx = inst.hmm.observation_true;
        inst.hmm.epsilon_O = 0.0;
        std::size_t n = inst.hmm.transition.size();
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        Matrix t(n, std::vector<double>(n, 0.0));
        for (std::size_t s = 0; s < n; ++s) t[s][perm[s]] = 1.0;
        inst.hmm.transition = t;
        auto rep = theorem_6_4_check(inst.hmm, inst.b_m, inst.b_h, mu);
        special_perm = special_perm && rep.holds && rep.lhs <= rep.kl_before + 1e-9;
    }
    std::ostringstream detail;
    detail << holds << "/200 random instances hold (exact gamma: " << (gamma_all_exact ? "yes" : "no")
           << "); equal-belief case " << (special_equal ? "ok" : "violated")
           << "; permutation non-expansion " << (special_perm ? "ok" : "violated");
    report(10, holds == 200 && special_equal && special_perm && gamma_all_exact,
           "one-step belief-alignment bound holds on random instances", detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 11: byte-identical reruns
// ---------------------------------------------------------------------------

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_11(const fs::path& work, const std::map<std::string, ExperimentResult>& first) {
    bool all_identical = true;
    std::ostringstream detail;
    std::size_t checked = 0;

    auto compare = [&](const std::string& key, const ExperimentSpec& spec) {
        auto result = run_benchmark_arm(spec);
        auto it = first.find(key);
        if (it == first.end()) { all_identical = false; return; }
        std::string a = file_bytes(it->second.summary_path);
        std::string b = file_bytes(result.summary_path);
        if (a != b || a.empty()) {
            all_identical = false;
            detail << key << " differs; ";
        }
        ++checked;
    };

    // Food truck: the medium-cost arm.
    {
        ExperimentSpec spec = ExperimentSpec::defaults_for(ExperimentKind::FoodTruck, ArmMode::Centaur);
        spec.true_gamma = 7.5;
        spec.true_c_h = 0.21;
        spec.output_dir = (work / "rerun_ft").string();
        spec.cache_dir = (work / "cache").string();
        spec.threads = 1;
        compare("ft_" + fmt(7.5) + "_" + fmt(0.21), spec);
    }
    // Each shelter experiment's centaur arm plus one other mode.
    for (auto [kind, mode] : std::vector<std::pair<ExperimentKind, ArmMode>>{
             {ExperimentKind::FoodShelter, ArmMode::Centaur},
             {ExperimentKind::FoodShelter, ArmMode::Naive},
             {ExperimentKind::FoodShelterSwapped, ArmMode::Centaur},
             {ExperimentKind::FoodShelterSwapped, ArmMode::Human},
             {ExperimentKind::FoodShelterBothCorrect, ArmMode::Ideal}}) {
        ExperimentSpec spec = ExperimentSpec::defaults_for(kind, mode);
        spec.output_dir = (work / "rerun_fs").string();
        spec.cache_dir = (work / "cache").string();
        spec.threads = 1;
        compare(to_string(kind) + "_" + to_string(mode), spec);
    }
    detail << checked << " summaries byte-compared";
    report(11, all_identical && checked == 6, "identical seeds reproduce byte-identical summaries",
           detail.str());
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    fs::path work = fs::path("acceptance_out");
    fs::remove_all(work);
    fs::create_directories(work);

    std::map<std::string, ExperimentResult> runs;

    criterion_1(work, &runs);
    auto shelter_stats = criterion_2(work, &runs);
    criterion_3(work, &runs);
    criterion_4(work, &runs);
    criterion_5(runs.at("foodshelter_centaur"));
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11(work, runs);

    auto secs = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0);
    std::printf("acceptance finished in %llds with %d failure(s)\n",
                static_cast<long long>(secs.count()), failures);
    return failures;
}
