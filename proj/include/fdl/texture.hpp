#pragma once

#include "fdl/core.hpp"

namespace fdl {

/// Horizontal/vertical responses of the 7-tap Sobel operator and their norm.
struct GradientField {
    RealGrid gx;
    RealGrid gy;
    RealGrid magnitude;
};

inline constexpr int kSobelSize = 7;
inline constexpr double kDefaultTextureThreshold = 0.1;

/// Separable 7x7 Sobel with edge replication. Smoothing taps [1,6,15,20,15,6,1],
/// derivative taps [-1,-4,-5,0,5,4,1] (correlation: positive for rising intensity).
GradientField sobel7(const ImageField& gray);

/// Pixels whose max-normalised gradient magnitude strictly exceeds `threshold`.
/// A constant image has no active pixels.
ActiveMask texture_mask(const ImageField& gray, double threshold = kDefaultTextureThreshold);

/// Fraction of active pixels.
double texturedness(const ActiveMask& mask);

}  // namespace fdl
