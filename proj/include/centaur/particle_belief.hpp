#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "centaur/moh.hpp"
#include "centaur/rng.hpp"
#include "centaur/stm.hpp"

namespace centaur {

/// Hidden parameters of a human's subjective task model: one model parameter
/// (discount gamma or noise inflation epsilon) plus the cost of effort.
struct STMParams {
    enum class Kind { Gamma, Epsilon };
    Kind kind = Kind::Gamma;
    double value = 0.0;
    double c_h = 0.0;

    const char* kind_name() const { return kind == Kind::Gamma ? "gamma" : "epsilon"; }
};

/// One weighted hypothesis about the human: parameters, the solved Q-table of
/// the induced STM (shared between particles with the same model parameter)
/// and the precomputed override-response table the planner simulates with.
struct STMParticle {
    STMParams params;
    double weight = 0.0;
    std::shared_ptr<const QTable> q;
    ResponseTable response;
    BehaviouralSignature signature;
};

struct ParticleBelief {
    std::vector<STMParticle> particles;

    double total_weight() const {
        double t = 0.0;
        for (const auto& p : particles) t += p.weight;
        return t;
    }

    std::size_t support_size() const {
        std::size_t n = 0;
        for (const auto& p : particles) n += p.weight > 0.0 ? 1 : 0;
        return n;
    }

    void normalize() {
        double t = total_weight();
        if (t <= 0.0) throw DegenerateBelief("all particle weights are zero");
        for (auto& p : particles) p.weight /= t;
    }
};

/// Solves one STM parameter setting into a shared Q-table. Implementations
/// return nullptr for infeasible parameter values (they are skipped with a
/// warning collected by init_particles).
using ParticleSolver = std::function<std::shared_ptr<const QTable>(const STMParams&)>;

namespace detail {

inline STMParticle make_particle(const STMParams& params, std::shared_ptr<const QTable> q,
                                 const std::vector<std::size_t>& probe_states,
                                 const std::set<std::size_t>& terminal) {
    STMParticle particle;
    particle.params = params;
    particle.q = std::move(q);

    const QTable& table = *particle.q;
    const std::size_t S = table.n_states(), A = table.n_actions();
    particle.response.response.assign(S, std::vector<std::int16_t>(A, -1));
    for (std::size_t s = 0; s < S; ++s) {
        if (terminal.count(s)) continue;
        std::size_t best = 0;
        for (std::size_t a = 1; a < A; ++a)
            if (table.values[s][a] > table.values[s][best]) best = a;
        for (std::size_t a_m = 0; a_m < A; ++a_m)
            if (table.values[s][best] - table.values[s][a_m] > params.c_h)
                particle.response.response[s][a_m] = static_cast<std::int16_t>(best);
    }
    particle.signature.reserve(probe_states.size() * A);
    for (std::size_t s : probe_states)
        for (std::size_t a = 0; a < A; ++a)
            particle.signature.push_back(static_cast<char>(particle.response.response[s][a] + 1));
    return particle;
}

}  // namespace detail

/// Builds the particle set for a parameter grid: every distinct model
/// parameter is solved once (offline phase), response tables and behavioural
/// signatures are tabulated, weights start uniform. Infeasible grid entries
/// are skipped and reported through `warnings`.
inline ParticleBelief init_particles(const std::vector<STMParams>& prior_grid,
                                     const ParticleSolver& solver,
                                     const std::vector<std::size_t>& probe_states,
                                     const std::set<std::size_t>& terminal = {},
                                     std::vector<std::string>* warnings = nullptr) {
    if (prior_grid.empty()) throw EmptyGrid("empty particle grid");

    std::map<double, std::shared_ptr<const QTable>> solved;
    ParticleBelief belief;
    for (const auto& params : prior_grid) {
        auto it = solved.find(params.value);
        if (it == solved.end()) {
            auto q = solver(params);
            it = solved.emplace(params.value, std::move(q)).first;
        }
        if (!it->second) {
            if (warnings) {
                std::ostringstream msg;
                msg << "skipping infeasible particle " << params.kind_name() << "=" << params.value
                    << " c_h=" << params.c_h;
                warnings->push_back(msg.str());
            }
            continue;
        }
        belief.particles.push_back(detail::make_particle(params, it->second, probe_states, terminal));
    }
    if (belief.particles.empty()) throw EmptyGrid("no feasible particles in the grid");
    double w = 1.0 / static_cast<double>(belief.particles.size());
    for (auto& p : belief.particles) p.weight = w;
    return belief;
}

/// Deterministic-likelihood filtering, in place: a particle survives an
/// observed round only if its predicted response matches both the override bit
/// and, when overriding, the exact action. Weights renormalize afterwards.
/// Throws AllParticlesEliminated (leaving all weights zero) when nothing
/// survives; callers fall back to their prior.
inline void filter_particles_in_place(ParticleBelief& belief, std::size_t state, std::size_t a_m,
                                      const HumanResponse& observed) {
    for (auto& p : belief.particles) {
        if (p.weight == 0.0) continue;
        if (p.response(state, a_m) != observed) p.weight = 0.0;
    }
    if (belief.total_weight() <= 0.0)
        throw AllParticlesEliminated("no particle predicted the observed response");
    belief.normalize();
}

inline ParticleBelief filter_particles(const ParticleBelief& belief, std::size_t state,
                                       std::size_t a_m, const HumanResponse& observed) {
    ParticleBelief out = belief;
    filter_particles_in_place(out, state, a_m, observed);
    return out;
}

/// Restores the particle count by jittering surviving particles. New STMs are
/// solved online, so the number of additions per call is bounded. With no
/// survivors the caller is expected to fall back to the prior.
inline ParticleBelief reinvigorate(const ParticleBelief& belief, double perturbation_scale,
                                   std::size_t target_count, const ParticleSolver& solver,
                                   const std::vector<std::size_t>& probe_states,
                                   std::mt19937_64& rng, const std::set<std::size_t>& terminal = {},
                                   std::size_t max_new = 32) {
    std::vector<const STMParticle*> survivors;
    for (const auto& p : belief.particles)
        if (p.weight > 0.0) survivors.push_back(&p);
    if (survivors.empty()) throw NoSurvivors("reinvigorate needs at least one surviving particle");

    ParticleBelief out = belief;
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, survivors.size() - 1);
    std::size_t added = 0;
    while (out.particles.size() < target_count && added < max_new) {
        const STMParticle& parent = *survivors[pick(rng)];
        STMParams params = parent.params;
        params.value = std::max(0.0, params.value + perturbation_scale * noise(rng));
        params.c_h = std::max(0.0, params.c_h + perturbation_scale * noise(rng));
        std::shared_ptr<const QTable> q =
            perturbation_scale == 0.0 ? parent.q : solver(params);
        if (!q) continue;  // landed on an infeasible setting, draw again
        STMParticle child = detail::make_particle(params, q, probe_states, terminal);
        child.weight = parent.weight;
        out.particles.push_back(std::move(child));
        ++added;
    }
    out.normalize();
    return out;
}

// Posterior snapshot rows: step, particle_id, gamma|epsilon, c_h, weight.
inline std::string posterior_csv_header(STMParams::Kind kind) {
    return std::string("step,particle_id,") +
           (kind == STMParams::Kind::Gamma ? "gamma" : "epsilon") + ",c_h,weight";
}

inline void append_posterior_rows(std::ostream& out, std::size_t step,
                                  const ParticleBelief& belief, bool nonzero_only = true) {
    for (std::size_t i = 0; i < belief.particles.size(); ++i) {
        const auto& p = belief.particles[i];
        if (nonzero_only && p.weight == 0.0) continue;
        out << step << ',' << i << ',' << p.params.value << ',' << p.params.c_h << ',' << p.weight
            << '\n';
    }
}

}  // namespace centaur
