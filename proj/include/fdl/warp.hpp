#pragma once

// Horizontal bilinear warping for rectified stereo.
//
// Sign convention: a scene point at left column j appears at right column
// j - d with d >= 0. The left view is synthesised by sampling the right image
// at j - d_left; the right view by sampling the left image at j + d_right.
// Coordinates outside [0, W-1] clamp to the border column.

#include <vector>

#include "fdl/core.hpp"

namespace fdl {

enum class Side { Left, Right };

/// Sampling direction along the row for a view: -1 for left, +1 for right.
inline double shift_sign(Side side) { return side == Side::Left ? -1.0 : 1.0; }

/// Location of a clamped horizontal sample: value = (1-frac)*v[col] + frac*v[col+1].
/// `clamped` is true when the requested coordinate lay strictly outside
/// [0, W-1]; the sample is then locally constant in x.
struct LinearTap {
    int col = 0;
    double frac = 0.0;
    bool clamped = false;
};

inline LinearTap locate(double x, int width) {
    if (width <= 1) return {0, 0.0, true};
    if (x < 0.0) return {0, 0.0, true};
    const double last = static_cast<double>(width - 1);
    if (x > last) return {width - 2, 1.0, true};
    int col = static_cast<int>(x);
    if (col > width - 2) col = width - 2;
    return {col, x - col, false};
}

/// Per-channel values of row `row` at fractional column `x`.
std::vector<double> sample_h(const ImageField& img, int row, double x);

ImageField reconstruct_left(const ImageField& right, const DisparityMap& d_left);
ImageField reconstruct_right(const ImageField& left, const DisparityMap& d_right);

/// The other view's disparity sampled along `d_self`'s correspondences
/// (j - d for the left view, j + d for the right view).
DisparityMap project_disparity(const DisparityMap& d_other, const DisparityMap& d_self, Side side);

// Double-precision kernels shared with the loss and gradient code.
namespace detail {

/// out(r, j) = src(r, j + sign * shift(r, j)), per channel.
ImageField warp_rows(const ImageField& src, const RealGrid& shift, double sign);

/// Single-channel variant.
RealGrid warp_rows(const RealGrid& src, const RealGrid& shift, double sign);

}  // namespace detail

}  // namespace fdl
