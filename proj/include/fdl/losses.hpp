#pragma once

// The four loss terms (image reconstruction, edge-aware smoothness,
// left-right consistency, filled disparity), evaluated for both views over a
// four-level scale pyramid.

#include <array>

#include "fdl/core.hpp"
#include "fdl/warp.hpp"

namespace fdl {

inline constexpr int kScales = 4;
inline constexpr int kMinPyramidSize = 8;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

/// Level 0 is full resolution; level s is ceil(H / 2^s) x ceil(W / 2^s).
template <typename Field>
using ScalePyramid = std::array<Field, kScales>;

/// 2x2 average pooling per level; a trailing odd row/column pools with itself.
ScalePyramid<ImageField> pyramid(const ImageField& img);
/// As pyramid(), with values halved per level to stay in level pixel units.
ScalePyramid<DisparityMap> pyramid_d(const DisparityMap& disp);

/// Per-pixel SSIM over 3x3 box windows with edge replication, averaged over channels.
RealGrid ssim_map(const ImageField& a, const ImageField& b);

/// mean over pixels of ssim_alpha * (1 - SSIM) / 2 + (1 - ssim_alpha) * |I - I_rec|.
double image_recon_loss(const ImageField& image, const ImageField& reconstruction, double ssim_alpha);

/// mean of |dx d| exp(-|dx I|) + |dy d| exp(-|dy I|) using forward differences
/// that vanish on the last column/row.
double smoothness_loss(const DisparityMap& disp, const ImageField& image);

/// mean |d_self - project_disparity(d_other, d_self, side)|.
double lr_consistency_loss(const DisparityMap& d_self, const DisparityMap& d_other, Side side);

/// mean |d - d_filled| over all pixels.
double filled_disparity_loss(const DisparityMap& disp, const DisparityMap& filled);

/// Unweighted terms of one scale.
struct ScaleTerms {
    double ir_left = 0.0;
    double ir_right = 0.0;
    double ds_left = 0.0;
    double ds_right = 0.0;
    double lr_left = 0.0;
    double lr_right = 0.0;
    double fd_left = 0.0;
    double fd_right = 0.0;

    double weighted(const LossWeights& w) const;
};

struct LossBreakdown {
    std::array<ScaleTerms, kScales> scales{};
    double total = 0.0;
};

/// Filled-disparity targets per scale; treated as constants by the gradients.
struct FilledTargets {
    ScalePyramid<DisparityMap> left;
    ScalePyramid<DisparityMap> right;
};

/// Image-dependent state of the total loss: pyramids and per-level texture
/// masks, computed once per stereo pair.
class LossModel {
public:
    LossModel(const StereoPair& pair, const LossWeights& weights);

    const LossWeights& weights() const noexcept { return weights_; }
    int height() const noexcept { return left_[0].height(); }
    int width() const noexcept { return left_[0].width(); }
    const ScalePyramid<ImageField>& levels(Side side) const noexcept {
        return side == Side::Left ? left_ : right_;
    }
    const ActiveMask& mask(Side side, int scale) const {
        return (side == Side::Left ? mask_left_ : mask_right_)[static_cast<std::size_t>(scale)];
    }

    /// Runs the filler on every level of both disparity pyramids.
    FilledTargets filled_targets(const DisparityMap& d_left, const DisparityMap& d_right) const;

    LossBreakdown evaluate(const DisparityMap& d_left, const DisparityMap& d_right) const;
    LossBreakdown evaluate(const DisparityMap& d_left, const DisparityMap& d_right,
                           const FilledTargets& targets) const;

private:
    void check_disparities(const DisparityMap& d_left, const DisparityMap& d_right) const;

    LossWeights weights_;
    ScalePyramid<ImageField> left_;
    ScalePyramid<ImageField> right_;
    ScalePyramid<ActiveMask> mask_left_;
    ScalePyramid<ActiveMask> mask_right_;
};

LossBreakdown total_loss(const StereoPair& pair, const DisparityMap& d_left, const DisparityMap& d_right,
                         const LossWeights& weights);

}  // namespace fdl
