#pragma once

// Loss-term kernels that return the term value and, when a gradient buffer is
// supplied, accumulate weight * d(term)/d(disparity) into it.

#include "fdl/core.hpp"

namespace fdl::detail {

/// Reconstruction of `target` by sampling `source` at c + sign * d.
double recon_term(const ImageField& target, const ImageField& source, const RealGrid& disp, double sign,
                  double ssim_alpha, RealGrid* grad = nullptr, double weight = 1.0);

double smooth_term(const RealGrid& disp, const ImageField& image, RealGrid* grad = nullptr, double weight = 1.0);

double lr_term(const RealGrid& d_self, const RealGrid& d_other, double sign, RealGrid* grad_self = nullptr,
               RealGrid* grad_other = nullptr, double weight = 1.0);

double fd_term(const RealGrid& disp, const RealGrid& target, RealGrid* grad = nullptr, double weight = 1.0);

/// Per-channel SSIM map over 3x3 clamped box windows.
RealGrid ssim_channel(const RealGrid& a, const RealGrid& b);

/// Adjoint of one pyramid level: scatters coarse-grid values onto the fine
/// grid with 1/4 * factor per pooled tap.
RealGrid pool_adjoint(const RealGrid& coarse, int fine_height, int fine_width, double factor);

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace fdl::detail
