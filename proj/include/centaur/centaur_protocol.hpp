#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "centaur/moh.hpp"
#include "centaur/rng.hpp"
#include "centaur/stm.hpp"

namespace centaur {

/// Everything one interaction episode needs: the true environment, both
/// agents' subjective models, the machine's override cost, horizon and start.
/// All three models must share the same state/action index spaces.
struct CentaurConfig {
    TabularModel otm;
    SubjectiveTaskModel stm_m;
    SubjectiveTaskModel stm_h;
    double c_m = 0.0;
    std::size_t horizon = 100;
    std::size_t start_state = 0;
};

inline void validate_config(const CentaurConfig& cfg) {
    if (cfg.stm_m.model.n_states != cfg.otm.n_states ||
        cfg.stm_h.model.n_states != cfg.otm.n_states ||
        cfg.stm_m.model.n_actions != cfg.otm.n_actions ||
        cfg.stm_h.model.n_actions != cfg.otm.n_actions)
        throw InvalidModel("objective and subjective models must share index spaces");
    if (cfg.c_m < 0.0) throw InvalidModel("c_m must be non-negative");
    if (cfg.start_state >= cfg.otm.n_states) throw InvalidModel("start state out of range");
}

/// One protocol round: the machine's proposal, the human's reply, the executed
/// centaur action, both reward streams and the shared observation.
struct StepRecord {
    std::size_t t = 0;
    std::size_t state = 0;
    std::size_t a_m = 0;
    HumanResponse a_h;
    std::size_t a_c = 0;
    double r_m = 0.0;
    double r_h = 0.0;
    std::size_t o = 0;  // observed next state (both environments are fully observable)
};

/// a_c = a_h if the human overrides, else a_m. Overriding with the machine's
/// own action still counts as an override.
inline std::size_t centaur_action(std::size_t a_m, const HumanResponse& a_h) {
    return a_h.overrides ? a_h.action : a_m;
}

/// Mutable episode state. Single-owner during an episode; the RNG stream is
/// private to the episode.
struct SimState {
    std::size_t state = 0;
    std::size_t t = 0;
    MoHState human;
    std::mt19937_64 rng;
};

inline SimState make_sim_state(const CentaurConfig& cfg, std::uint64_t seed) {
    SimState sim;
    sim.state = cfg.start_state;
    sim.t = 0;
    sim.human = MoHState::at_state(cfg.start_state, cfg.otm.n_states);
    sim.rng = derive_stream(seed, StreamPurpose::Environment);
    return sim;
}

/// Runs one round of the override protocol: the machine proposes a_m, the
/// human replies, the true environment transitions under the executed action,
/// and both agents are charged their override costs.
inline StepRecord protocol_step(const CentaurConfig& cfg, SimState& sim, std::size_t a_m) {
    if (sim.t >= cfg.horizon || cfg.otm.is_terminal(sim.state))
        throw EpisodeTerminated("episode is over");

    StepRecord rec;
    rec.t = sim.t;
    rec.state = sim.state;
    rec.a_m = a_m;
    rec.a_h = moh_respond(cfg.stm_h, sim.human, a_m);
    rec.a_c = centaur_action(a_m, rec.a_h);

    bool overridden = rec.a_h.overrides;
    rec.r_m = cfg.otm.reward[sim.state][rec.a_c] - (overridden ? cfg.c_m : 0.0);
    rec.r_h = cfg.stm_h.model.reward[sim.state][rec.a_c] -
              (overridden ? cfg.stm_h.override_cost : 0.0);

    const auto& row = cfg.otm.transition[rec.a_c][sim.state];
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(sim.rng), acc = 0.0;
    std::size_t next = cfg.otm.n_states - 1;
    for (std::size_t s2 = 0; s2 < cfg.otm.n_states; ++s2) {
        acc += row[s2];
        if (u < acc) { next = s2; break; }
    }
    rec.o = next;

    sim.state = next;
    sim.t += 1;
    sim.human = moh_belief_step(cfg.stm_h, sim.human, rec.a_c, rec.o);
    sim.human.last_machine_action = a_m;
    return rec;
}

/// A machine-side controller: proposes actions and observes the outcome of
/// each round. Fixed policies ignore the feedback.
class MachineAgent {
public:
    virtual ~MachineAgent() = default;
    virtual std::size_t propose(std::size_t state, std::size_t t) = 0;
    virtual void observe(const StepRecord&) {}
    virtual void begin_episode() {}
};

class FixedPolicyMachine final : public MachineAgent {
public:
    explicit FixedPolicyMachine(Policy policy) : policy_(std::move(policy)) {}
    std::size_t propose(std::size_t state, std::size_t) override { return policy_(state); }

private:
    Policy policy_;
};

/// Plays one seeded episode of the protocol and returns the full log.
inline std::vector<StepRecord> run_episode(const CentaurConfig& cfg, MachineAgent& machine,
                                           std::uint64_t seed) {
    validate_config(cfg);
    SimState sim = make_sim_state(cfg, seed);
    machine.begin_episode();
    std::vector<StepRecord> log;
    log.reserve(cfg.horizon);
    while (sim.t < cfg.horizon && !cfg.otm.is_terminal(sim.state)) {
        std::size_t a_m = machine.propose(sim.state, sim.t);
        StepRecord rec = protocol_step(cfg, sim, a_m);
        machine.observe(rec);
        log.push_back(rec);
    }
    return log;
}

inline double episode_machine_return(const std::vector<StepRecord>& log) {
    double total = 0.0;
    for (const auto& rec : log) total += rec.r_m;
    return total;
}

inline std::size_t episode_override_count(const std::vector<StepRecord>& log) {
    std::size_t n = 0;
    for (const auto& rec : log) n += rec.a_h.overrides ? 1 : 0;
    return n;
}

// Episode log schema: t, state, a_m, a_h, a_c, r_m, r_h, overridden.
// a_h is -1 when the human plays noop.
inline std::string episode_csv_header() { return "t,state,a_m,a_h,a_c,r_m,r_h,overridden"; }

inline std::string episode_csv_row(const StepRecord& rec) {
    std::ostringstream out;
    out << rec.t << ',' << rec.state << ',' << rec.a_m << ','
        << (rec.a_h.overrides ? static_cast<long>(rec.a_h.action) : -1L) << ',' << rec.a_c << ','
        << rec.r_m << ',' << rec.r_h << ',' << (rec.a_h.overrides ? 1 : 0);
    return out.str();
}

inline void write_episode_csv(const std::string& path, const std::vector<StepRecord>& log) {
    std::ofstream out(path);
    out << episode_csv_header() << '\n';
    for (const auto& rec : log) out << episode_csv_row(rec) << '\n';
}

}  // namespace centaur
