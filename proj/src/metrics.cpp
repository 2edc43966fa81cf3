#include "fdl/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace fdl {

RealGrid disp_to_depth(const DisparityMap& disp, const CameraRig& rig) {
    validate(rig);
    RealGrid depth(disp.height(), disp.width());
    const double bf = rig.baseline_m * rig.focal_px;
    for (std::size_t p = 0; p < disp.size(); ++p) {
        const double d = disp[p];
        const double raw = d > 0.0 ? bf / d : rig.depth_max_m;
        depth[p] = std::clamp(raw, rig.depth_min_m, rig.depth_max_m);
    }
    return depth;
}

namespace {

struct MetricSums {
    double abs_rel = 0.0, sq_rel = 0.0, sq = 0.0, sq_log = 0.0;
    std::size_t d1 = 0, d2 = 0, d3 = 0, n = 0;

    void add(double d, double t) {
        const double err = d - t;
        abs_rel += std::abs(err) / t;
        sq_rel += err * err / t;
        sq += err * err;
        const double lg = std::log(d) - std::log(t);
        sq_log += lg * lg;
        const double ratio = std::max(d / t, t / d);
        d1 += ratio < 1.25 ? 1 : 0;
        d2 += ratio < 1.25 * 1.25 ? 1 : 0;
        d3 += ratio < 1.25 * 1.25 * 1.25 ? 1 : 0;
        ++n;
    }

    DepthMetricsReport report() const {
        const double inv = 1.0 / static_cast<double>(n);
        return {abs_rel * inv, sq_rel * inv, std::sqrt(sq * inv), std::sqrt(sq_log * inv),
                static_cast<double>(d1) * inv, static_cast<double>(d2) * inv, static_cast<double>(d3) * inv, n};
    }
};

void accumulate(MetricSums& sums, const RealGrid& depth, const RealGrid& truth, const ActiveMask* valid) {
    if (!depth.same_shape(truth)) throw Error(Errc::DimensionMismatch, "depth maps differ in shape");
    if (valid && !valid->same_shape(depth)) throw Error(Errc::DimensionMismatch, "valid mask differs in shape");
    for (std::size_t p = 0; p < depth.size(); ++p) {
        if (valid && !(*valid)[p]) continue;
        if (!(truth[p] > 0.0)) throw Error(Errc::ZeroGroundTruthDepth, "ground-truth depth must be positive", p);
        if (!(depth[p] > 0.0) || !std::isfinite(depth[p]))
            throw Error(Errc::OutOfRange, "predicted depth must be positive and finite", p);
        sums.add(depth[p], truth[p]);
    }
}

}  // namespace

DepthMetricsReport depth_metrics(const RealGrid& depth, const RealGrid& truth, const ActiveMask* valid) {
    MetricSums sums;
    accumulate(sums, depth, truth, valid);
    if (sums.n == 0) throw Error(Errc::EmptyValidSet, "no valid pixels to evaluate");
    return sums.report();
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw Error(Errc::EmptyValidSet, "percentile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

BinnedReport bin_metrics(const std::string& covariate, const std::vector<BinSample>& samples,
                         const std::vector<double>& edges) {
    if (samples.empty()) throw Error(Errc::EmptyValidSet, "binning needs at least one sample");
    if (edges.size() < 2) throw Error(Errc::InvalidArgument, "binning needs at least two edges");
    for (std::size_t k = 1; k < edges.size(); ++k)
        if (!(edges[k] > edges[k - 1])) throw Error(Errc::InvalidArgument, "bin edges must be strictly ascending", k);

    const std::size_t bin_count = edges.size() - 1;
    std::vector<std::vector<std::size_t>> members(bin_count);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double v = samples[i].covariate;
        if (!(v >= edges.front() && v <= edges.back()))
            throw Error(Errc::CovariateOutOfRange,
                        covariate + " = " + std::to_string(v) + " lies outside the bin edges", i);
        auto it = std::upper_bound(edges.begin(), edges.end(), v);
        std::size_t bin = static_cast<std::size_t>(std::distance(edges.begin(), it)) - 1;
        bin = std::min(bin, bin_count - 1);
        members[bin].push_back(i);
    }

    BinnedReport report{covariate, edges, {}};
    for (std::size_t b = 0; b < bin_count; ++b) {
        BinRow row;
        row.lower = edges[b];
        row.upper = edges[b + 1];
        row.samples = members[b].size();
        if (!members[b].empty()) {
            MetricSums pooled;
            DepthMetricsReport mean{};
            std::vector<double> abs_rels;
            for (std::size_t i : members[b]) {
                const BinSample& s = samples[i];
                const ActiveMask* valid = s.valid ? &*s.valid : nullptr;
                accumulate(pooled, s.depth, s.truth, valid);
                const DepthMetricsReport one = depth_metrics(s.depth, s.truth, valid);
                abs_rels.push_back(one.abs_rel);
                mean.abs_rel += one.abs_rel;
                mean.sq_rel += one.sq_rel;
                mean.rmse += one.rmse;
                mean.rmse_log += one.rmse_log;
                mean.delta_1 += one.delta_1;
                mean.delta_2 += one.delta_2;
                mean.delta_3 += one.delta_3;
                mean.pixel_count += one.pixel_count;
            }
            const double inv = 1.0 / static_cast<double>(members[b].size());
            for (double* f : {&mean.abs_rel, &mean.sq_rel, &mean.rmse, &mean.rmse_log, &mean.delta_1,
                              &mean.delta_2, &mean.delta_3})
                *f *= inv;
            row.pooled = pooled.report();
            row.per_sample_mean = mean;
            row.abs_rel_p25 = percentile(abs_rels, 0.25);
            row.abs_rel_p50 = percentile(abs_rels, 0.50);
            row.abs_rel_p75 = percentile(abs_rels, 0.75);
        }
        report.bins.push_back(row);
    }
    return report;
}

}  // namespace fdl
