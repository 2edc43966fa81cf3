#pragma once

// Analytic (sub)gradients of the loss terms with respect to disparity.
//
// L1 kinks take subgradient 0. Filled-disparity targets are constants: no
// gradient flows through the filler.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "fdl/core.hpp"
#include "fdl/losses.hpp"
#include "fdl/warp.hpp"

namespace fdl {

struct GradField {
    RealGrid d_dleft;
    RealGrid d_dright;
};

/// d image_recon_loss(image, reconstruct(other, disp)) / d disp, where `side`
/// names the view `image` belongs to.
RealGrid grad_recon(const ImageField& image, const ImageField& other, const DisparityMap& disp, Side side,
                    double ssim_alpha);

RealGrid grad_smooth(const DisparityMap& disp, const ImageField& image);

struct LrGradient {
    RealGrid d_self;
    RealGrid d_other;
};

LrGradient grad_lr(const DisparityMap& d_self, const DisparityMap& d_other, Side side);

RealGrid grad_fd(const DisparityMap& disp, const DisparityMap& filled);

/// Gradient of the four-scale total loss at full resolution. Filled targets
/// are recomputed from the current disparities and held fixed.
GradField grad_total(const StereoPair& pair, const DisparityMap& d_left, const DisparityMap& d_right,
                     const LossWeights& weights);

/// As above against explicit targets; optionally also returns the loss value.
GradField grad_total(const LossModel& model, const DisparityMap& d_left, const DisparityMap& d_right,
                     const FilledTargets& targets, LossBreakdown* value = nullptr);

struct GradCheckPoint {
    std::size_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckPoint> points;
    std::size_t skipped = 0;  // pixels rejected as lying near a kink
    double max_rel_error = 0.0;
};

/// |a - n| / max(|a|, |n|), or 0 when both are below 1e-10.
double relative_error(double analytic, double numeric);

/// Compares `analytic` with central differences of `loss` at up to `samples`
/// random pixels of `x`. A pixel is skipped when the central differences with
/// steps h and h/2 disagree by more than 1e-4 of their magnitude, which flags
/// an L1 kink or bilinear cell boundary strictly inside (x - h, x + h). A kink
/// sitting exactly at x is kept: the subgradients use sign(0) = 0, which is
/// the symmetric difference of |.|. Gives up after 50 * samples draws. Pixels
/// with x - h below `lower_bound` are skipped too.
GradCheckReport check_gradient(const std::function<double(const RealGrid&)>& loss, const RealGrid& x,
                               const RealGrid& analytic, int samples, std::uint64_t seed, double h = 1e-3,
                               double lower_bound = -std::numeric_limits<double>::infinity());

/// check_gradient applied to the total loss, half the samples on each map.
/// Filled targets are computed once at the given disparities and frozen.
struct TotalGradCheck {
    GradCheckReport left;
    GradCheckReport right;
    double max_rel_error() const { return std::max(left.max_rel_error, right.max_rel_error); }
};
TotalGradCheck check_grad_total(const StereoPair& pair, const DisparityMap& d_left, const DisparityMap& d_right,
                                const LossWeights& weights, int samples, std::uint64_t seed, double h = 1e-3);

}  // namespace fdl
