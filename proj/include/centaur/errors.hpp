#pragma once

#include <stdexcept>
#include <string>

namespace centaur {

struct ZeroLikelihoodObservation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AllZeroCounts : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonconvergenceAfterMaxIterations : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsolvedSTM : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EpisodeTerminated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidLayout : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoiseOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateBelief : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AllParticlesEliminated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoSurvivors : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownHeuristic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonStochasticMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotDeterministic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionTooLargeForExact : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BeliefFloorViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooManyRocks : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSpec : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedSummary : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidModel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace centaur
