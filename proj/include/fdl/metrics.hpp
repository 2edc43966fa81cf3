#pragma once

// Disparity-to-depth conversion and depth-error metrics.

#include <optional>
#include <string>
#include <vector>

#include "fdl/core.hpp"

namespace fdl {

struct DepthMetricsReport {
    double abs_rel = 0.0;
    double sq_rel = 0.0;
    double rmse = 0.0;
    double rmse_log = 0.0;  // natural log
    double delta_1 = 0.0;   // fraction with max(D/D*, D*/D) < 1.25
    double delta_2 = 0.0;   // < 1.25^2
    double delta_3 = 0.0;   // < 1.25^3
    std::size_t pixel_count = 0;
};

/// D = baseline * focal / d clamped to the rig's depth range; d = 0 maps to the maximum.
RealGrid disp_to_depth(const DisparityMap& disp, const CameraRig& rig);

/// Metrics over `valid` pixels (all pixels when no mask is given).
DepthMetricsReport depth_metrics(const RealGrid& depth, const RealGrid& truth, const ActiveMask* valid = nullptr);

/// Linear-interpolation percentile (p in [0,1]) of an unsorted sample.
double percentile(std::vector<double> values, double p);

struct BinSample {
    double covariate = 0.0;
    RealGrid depth;
    RealGrid truth;
    std::optional<ActiveMask> valid;
};

struct BinRow {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t samples = 0;
    /// Metrics of all pooled pixels in the bin; empty bins carry none.
    std::optional<DepthMetricsReport> pooled;
    /// Mean over samples of per-sample metrics.
    std::optional<DepthMetricsReport> per_sample_mean;
    double abs_rel_p25 = 0.0;
    double abs_rel_p50 = 0.0;
    double abs_rel_p75 = 0.0;
};

struct BinnedReport {
    std::string covariate;
    std::vector<double> edges;
    std::vector<BinRow> bins;
};

/// Bins are [e_k, e_{k+1}), except the last, which also includes its upper edge.
BinnedReport bin_metrics(const std::string& covariate, const std::vector<BinSample>& samples,
                         const std::vector<double>& edges);

}  // namespace fdl
