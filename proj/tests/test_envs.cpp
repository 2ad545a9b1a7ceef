#include <doctest.h>

#include <cmath>
#include <set>

#include "centaur/centaur_protocol.hpp"
#include "centaur/food_shelter.hpp"
#include "centaur/food_truck.hpp"
#include "centaur/moh.hpp"
#include "centaur/stm.hpp"

using namespace centaur;

namespace {

FoodTruckEnv default_env() {
    static FoodTruckEnv env = build_food_truck(layout_from_file(
        std::string(CENTAUR_LAB_DATA_DIR) + "/food_truck_default.json"));
    return env;
}

CentaurConfig food_truck_config(const FoodTruckEnv& env, double gamma, double c_h,
                                double c_m = 0.05, std::size_t horizon = 30) {
    CentaurConfig cfg;
    cfg.otm = env.model;
    SubjectiveTaskModel stm_m;
    stm_m.model = env.model;
    stm_m.criterion = DiscountSpec::exponential(0.95);
    cfg.stm_m = solve_stm(stm_m);
    SubjectiveTaskModel stm_h;
    stm_h.model = env.model;
    stm_h.criterion = DiscountSpec::hyperbolic(gamma);
    stm_h.override_cost = c_h;
    cfg.stm_h = solve_stm(stm_h);
    cfg.c_m = c_m;
    cfg.horizon = horizon;
    cfg.start_state = env.start_state;
    return cfg;
}

}  // namespace

TEST_CASE("centaur_action formula") {
    CHECK(centaur_action(2, HumanResponse::noop()) == 2);
    CHECK(centaur_action(2, HumanResponse::override_with(5)) == 5);
    // Overriding with the machine's own action still executes it (and the
    // protocol still charges the override costs).
    CHECK(centaur_action(5, HumanResponse::override_with(5)) == 5);
}

TEST_CASE("food truck build: routes, returns and chain rewards") {
    auto env = default_env();
    validate_model(env.model);

    auto blue = shortest_route(env, CellType::Vegan, 0);
    auto purple = shortest_route(env, CellType::Vegan, 1);
    CHECK(purple.size() == blue.size() + 2);

    double blue_return = rollout_action_return(env, blue);
    double purple_return = rollout_action_return(env, purple);
    double expected_blue =
        env.layout.vegan_entry + env.layout.vegan_exit -
        (static_cast<double>(blue.size()) + 2.0) * env.layout.step_cost;
    CHECK(blue_return == doctest::Approx(expected_blue));
    CHECK(purple_return == doctest::Approx(expected_blue - 0.2));

    // Doughnut food rewards cancel before step costs.
    CHECK(env.layout.doughnut_entry + env.layout.doughnut_exit == doctest::Approx(0.0));

    // Chain rewards: entering a doughnut shop pays +10 - 0.1 one step in, then
    // -10 - 0.1, then the terminal absorbs.
    const FoodTruckEnv::Restaurant* doughnut = nullptr;
    for (const auto& r : env.restaurants)
        if (r.type == CellType::Doughnut) doughnut = &r;
    REQUIRE(doughnut != nullptr);
    CHECK(env.model.reward[doughnut->entry_state][0] == doctest::Approx(9.9));
    CHECK(env.model.reward[doughnut->exit_state][0] == doctest::Approx(-10.1));

    // Deterministic movement: every transition row is one-hot.
    for (std::size_t a = 0; a < env.model.n_actions; ++a)
        for (std::size_t s = 0; s < env.model.n_states; ++s) {
            int nonzero = 0;
            for (double p : env.model.transition[a][s]) nonzero += p != 0.0 ? 1 : 0;
            CHECK(nonzero == 1);
        }
}

TEST_CASE("food truck: degenerate layouts are rejected") {
    nlohmann::json walls = {{"rows", {"###", "#S#", "###"}}};
    CHECK_THROWS_AS(build_food_truck(layout_from_json(walls)), InvalidLayout);
    nlohmann::json sealed = {{"rows", {"#V#", "###", "#S#"}}};
    CHECK_THROWS_AS(build_food_truck(layout_from_json(sealed)), InvalidLayout);
    nlohmann::json no_start = {{"rows", {".V."}}};
    CHECK_THROWS_AS(build_food_truck(layout_from_json(no_start)), InvalidLayout);
}

TEST_CASE("protocol rewards and bookkeeping") {
    auto env = default_env();
    auto cfg = food_truck_config(env, 7.5, 0.21);

    SUBCASE("noop rounds carry no override costs") {
        SimState sim = make_sim_state(cfg, 1);
        std::size_t a_m = cfg.stm_h.policy()(sim.state);
        auto rec = protocol_step(cfg, sim, a_m);
        CHECK_FALSE(rec.a_h.overrides);
        CHECK(rec.r_m == doctest::Approx(cfg.otm.reward[rec.state][rec.a_c]));
        CHECK(rec.r_h == doctest::Approx(cfg.stm_h.model.reward[rec.state][rec.a_c]));
    }

    SUBCASE("overridden rounds charge both sides") {
        // Walk the blue route to the temptation cell; with gamma 7.5 and the
        // medium cost the human overrides the continuing move there.
        SimState sim = make_sim_state(cfg, 1);
        std::vector<StepRecord> log;
        bool saw_override = false;
        for (int t = 0; t < 6 && !cfg.otm.is_terminal(sim.state); ++t) {
            auto rec = protocol_step(cfg, sim, 0 /* up */);
            if (rec.a_h.overrides) {
                saw_override = true;
                CHECK(rec.r_m ==
                      doctest::Approx(cfg.otm.reward[rec.state][rec.a_c] - cfg.c_m));
                CHECK(rec.r_h == doctest::Approx(cfg.stm_h.model.reward[rec.state][rec.a_c] -
                                                 cfg.stm_h.override_cost));
                break;
            }
        }
        CHECK(saw_override);
    }

    SUBCASE("exactly one of the two proposals executes each round") {
        SimState sim = make_sim_state(cfg, 3);
        while (sim.t < cfg.horizon && !cfg.otm.is_terminal(sim.state)) {
            auto rec = protocol_step(cfg, sim, sim.t % cfg.otm.n_actions);
            CHECK(rec.a_c == (rec.a_h.overrides ? rec.a_h.action : rec.a_m));
        }
        CHECK_THROWS_AS(protocol_step(cfg, sim, 0), EpisodeTerminated);
    }
}

TEST_CASE("zero-override episodes match evaluate_return") {
    auto env = default_env();
    auto cfg = food_truck_config(env, 7.5, 0.21);
    cfg.stm_h.override_cost = never_override_cost();
    Policy machine_policy = cfg.stm_m.policy();
    FixedPolicyMachine machine(machine_policy);
    auto log = run_episode(cfg, machine, 7);
    CHECK(episode_override_count(log) == 0);
    auto oracle = evaluate_return(cfg.otm, machine_policy, cfg.start_state, cfg.horizon, {7});
    CHECK(episode_machine_return(log) == doctest::Approx(oracle[0]));
}

TEST_CASE("machine proposing the human's own policy is never overridden") {
    auto env = default_env();
    auto cfg = food_truck_config(env, 7.5, 0.01);
    FixedPolicyMachine machine(cfg.stm_h.policy());
    auto log = run_episode(cfg, machine, 5);
    CHECK(episode_override_count(log) == 0);
}

TEST_CASE("low-gamma humans walk the direct route and never override it") {
    auto env = default_env();
    auto cfg = food_truck_config(env, 0.1, 0.01);
    // The machine's exponential optimum and the low-gamma human's agree.
    FixedPolicyMachine machine(cfg.stm_m.policy());
    auto log = run_episode(cfg, machine, 11);
    CHECK(episode_override_count(log) == 0);
    auto blue = shortest_route(env, CellType::Vegan, 0);
    CHECK(episode_machine_return(log) == doctest::Approx(rollout_action_return(env, blue)));
}

TEST_CASE("identical seeds give byte-identical logs") {
    auto env = default_env();
    auto cfg = food_truck_config(env, 7.5, 0.01);
    FixedPolicyMachine m1(cfg.stm_m.policy()), m2(cfg.stm_m.policy());
    auto a = run_episode(cfg, m1, 13);
    auto b = run_episode(cfg, m2, 13);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(episode_csv_row(a[i]) == episode_csv_row(b[i]));
}

TEST_CASE("food shelter: construction invariants") {
    FoodShelterConfig cfg;

    SUBCASE("epsilon 0 reproduces the true model") {
        auto [truth, human] = build_food_shelter(cfg, 0.0);
        CHECK(truth.transition == human.transition);
        CHECK(truth.reward == human.reward);
        validate_model(truth);
    }

    SUBCASE("epsilon 0.45 removes diagonal success in the human model") {
        auto [truth, human] = build_food_shelter(cfg, 0.45);
        validate_model(truth);
        validate_model(human);
        CHECK(truth.reward == human.reward);  // only transitions differ
        CHECK(truth.transition != human.transition);

        FoodShelterIndex index(cfg);
        // From the centre with an intact shelter, a diagonal move in the human
        // model never lands on the intended target: the success probability is
        // 1 - (0.1 + 2 * 0.45) = 0 and slips go to 4-adjacent cells only.
        int centre = cfg.cell(1, 1);
        std::size_t s = index.encode(centre, true, cfg.cell(2, 2));
        std::size_t diag_to_corner = 7;  // down-right
        double mass_on_target = 0.0;
        for (std::size_t s2 = 0; s2 < human.n_states; ++s2) {
            int agent, food;
            bool ok;
            index.decode(s2, agent, ok, food);
            if (agent == cfg.cell(2, 2)) mass_on_target += human.transition[diag_to_corner][s][s2];
        }
        CHECK(mass_on_target == doctest::Approx(0.0));
        // The true model still succeeds at 0.9.
        double true_mass = 0.0;
        for (std::size_t s2 = 0; s2 < truth.n_states; ++s2) {
            int agent, food;
            bool ok;
            index.decode(s2, agent, ok, food);
            if (agent == cfg.cell(2, 2)) true_mass += truth.transition[diag_to_corner][s][s2];
        }
        CHECK(true_mass == doctest::Approx(0.9));
    }

    SUBCASE("noise out of range is rejected") {
        CHECK_THROWS_AS(build_food_shelter(cfg, 0.46), NoiseOutOfRange);
        CHECK_THROWS_AS(build_food_shelter(cfg, -0.1), NoiseOutOfRange);
    }
}

TEST_CASE("food shelter: solved human policy return matches a high-sample oracle") {
    FoodShelterConfig cfg;
    auto [truth, human_model] = build_food_shelter(cfg, 0.45);
    SubjectiveTaskModel stm_h;
    stm_h.model = human_model;
    stm_h.criterion = DiscountSpec::exponential(0.95);
    stm_h = solve_stm(stm_h);

    FoodShelterIndex index(cfg);
    std::size_t start = index.start_state();
    std::vector<std::uint64_t> seeds(19);
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
    auto sample = evaluate_return(truth, stm_h.policy(), start, 100, seeds);
    double mean = 0.0;
    for (double r : sample) mean += r;
    mean /= sample.size();

    std::vector<std::uint64_t> big(10000);
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = 1000 + i;
    auto oracle = evaluate_return(truth, stm_h.policy(), start, 100, big);
    double oracle_mean = 0.0, oracle_sq = 0.0;
    for (double r : oracle) { oracle_mean += r; oracle_sq += r * r; }
    oracle_mean /= oracle.size();
    double var = oracle_sq / oracle.size() - oracle_mean * oracle_mean;
    double se_small = std::sqrt(var / sample.size());
    CHECK(std::abs(mean - oracle_mean) <= 2.0 * se_small + 1e-9);
}

TEST_CASE("food truck signatures: both low-gamma humans share a class on the routes") {
    auto env = default_env();
    auto make = [&](double gamma, double c_h) {
        SubjectiveTaskModel stm;
        stm.model = env.model;
        stm.criterion = DiscountSpec::hyperbolic(gamma);
        stm.override_cost = c_h;
        return solve_stm(stm);
    };
    // Probe the states the interaction actually visits: the cells of the
    // direct and the detour routes. (Off-route pocket cells near the second
    // doughnut shop can split low-gamma classes on this layout.)
    auto route_states = [&](int radius) {
        std::vector<std::size_t> states{env.start_state};
        std::size_t s = env.start_state;
        for (std::size_t a : shortest_route(env, CellType::Vegan, radius)) {
            const auto& row = env.model.transition[a][s];
            for (std::size_t s2 = 0; s2 < env.model.n_states; ++s2)
                if (row[s2] == 1.0) { s = s2; break; }
            if (env.is_grid_state(s)) states.push_back(s);
        }
        return states;
    };
    std::vector<std::size_t> probe = route_states(0);
    for (std::size_t s : route_states(1)) probe.push_back(s);

    double c_h = 0.01;
    auto lo_a = make(0.1, c_h);
    auto lo_b = make(0.3, c_h);
    CHECK(behavioural_signature(lo_a, probe) == behavioural_signature(lo_b, probe));
    auto hi = make(7.5, c_h);
    CHECK(behavioural_signature(hi, probe) != behavioural_signature(lo_a, probe));
}

TEST_CASE("the inflated-noise human vetoes subjectively inferior diagonal proposals") {
    FoodShelterConfig cfg;
    cfg.width = cfg.height = 4;
    auto [truth, human_model] = build_food_shelter(cfg, 0.45);
    SubjectiveTaskModel stm_h;
    stm_h.model = human_model;
    stm_h.criterion = DiscountSpec::exponential(0.78);
    stm_h.override_cost = 0.05;
    stm_h = solve_stm(stm_h);

    bool found_veto = false, found_allowed = false;
    for (std::size_t s = 0; s < truth.n_states && !(found_veto && found_allowed); ++s) {
        for (std::size_t a = 4; a < 8; ++a) {
            double gap = stm_h.q().state_value(s) - stm_h.q().values[s][a];
            BeliefState b = BeliefState::point_mass(s, truth.n_states);
            bool vetoed = override_indicator(stm_h, b, a);
            CHECK(vetoed == (gap > stm_h.override_cost));
            if (vetoed) found_veto = true;
            if (!vetoed) found_allowed = true;
        }
    }
    // Both kinds exist: the machine has diagonal moves it can nudge through
    // and diagonal moves the human refuses.
    CHECK(found_veto);
    CHECK(found_allowed);
}
