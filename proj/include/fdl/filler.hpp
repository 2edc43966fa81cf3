#pragma once

// Disparity filling: seed values on textured pixels, propagate them outward
// until the grid is covered, then smooth only the pixels that were filled.

#include "fdl/core.hpp"

namespace fdl {

struct FillResult {
    DisparityMap filled;
    int iterations = 0;
    ActiveMask initially_active;
};

/// Simultaneous 4-neighbour propagation. Each iteration, every inactive pixel
/// with at least one active neighbour takes the mean of its active neighbours
/// (summed in up, down, left, right order) and becomes active for the next
/// iteration. Active pixels are never rewritten.
FillResult propagate(const DisparityMap& disp, const ActiveMask& mask);

/// One pass of the normalised 5x5 inverse-distance kernel (centre weight 1)
/// over initially inactive pixels; initially active pixels pass through.
/// Taps outside the grid are dropped and the remaining weights renormalised.
DisparityMap smooth(const FillResult& fill);

struct FilledDisparity {
    DisparityMap filled;
    ActiveMask mask;
};

/// texture_mask(gray) followed by smooth(propagate(disp, mask)).
FilledDisparity fill_disparity(const DisparityMap& disp, const ImageField& gray);

/// smooth(propagate(disp, mask)) for a precomputed mask.
DisparityMap fill_with_mask(const DisparityMap& disp, const ActiveMask& mask);

}  // namespace fdl
