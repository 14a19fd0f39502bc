#pragma once

// Run-level knobs shared by the CLI and the engine.

#include <cstdint>
#include <string>

#include "core.hpp"

namespace mnd {

struct RunConfig {
    std::uint64_t seed = 0;
    double clusterTol = defaults::cluster_tol;
    double trackerTol = defaults::tracker_tol;
    double residualTol = defaults::residual_tol;
    int pxSamples = 200;
    int extraSlices = 2;
    int scanGrid = 3;
    std::string outputPath;

    bool operator==(const RunConfig&) const = default;
};

// Stepping and safety parameters for loop tracking.
struct TrackerConfig {
    double correctorTol = defaults::tracker_tol;
    double clusterTol = defaults::cluster_tol;
    int maxNewtonIters = 5;
    int maxHalvings = 20;
    double initialStepFraction = 1.0 / 32.0;  // of the loop arc length
    double marginRatio = 10.0;                // endpoint matching safety factor
    int circleNodes = 24;
};

}  // namespace mnd
