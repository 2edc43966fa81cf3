#pragma once

// Direct per-pixel disparity estimation: Adam on the total loss.

#include <cstdint>
#include <optional>
#include <vector>

#include "fdl/core.hpp"
#include "fdl/losses.hpp"
#include "fdl/metrics.hpp"

namespace fdl {

struct OptimizerConfig {
    int steps = 1000;
    double learning_rate = 0.2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double init_disparity = 1.0;
    std::uint64_t seed = 0;
};

void validate(const OptimizerConfig& cfg);

struct TraceStep {
    int step = 0;
    double ir = 0.0;  // unweighted, summed over scales and views
    double ds = 0.0;
    double lr = 0.0;
    double fd = 0.0;
    double total = 0.0;
};

struct OptimizeTrace {
    std::vector<TraceStep> steps;
    DisparityMap d_left;
    DisparityMap d_right;
};

inline constexpr double kInitJitter = 0.1;

/// init_disparity plus seeded uniform jitter in [0, 0.1]; the left map draws first.
std::pair<DisparityMap, DisparityMap> initial_disparities(int height, int width, const OptimizerConfig& cfg);

/// Runs cfg.steps Adam updates on both maps, clamping to d >= 0 after each
/// step. Trace entry k holds the loss at the parameters before update k.
OptimizeTrace optimize_disparity(const StereoPair& pair, const LossWeights& weights, const OptimizerConfig& cfg);

struct RegionMetrics {
    std::optional<DepthMetricsReport> all;
    std::optional<DepthMetricsReport> active;
    std::optional<DepthMetricsReport> inactive;
};

/// Depth metrics of the final left disparity against ground truth, over all,
/// active and inactive pixels of `mask`. A region with no pixels is left empty.
RegionMetrics evaluate_run(const OptimizeTrace& trace, const DisparityMap& d_true, const CameraRig& rig,
                           const ActiveMask& mask);

}  // namespace fdl
