#include "fdl/texture.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace fdl {

namespace {

// Taps as {centre, 1, 2, 3}; the full kernels are [1,6,15,20,15,6,1] and
// [-1,-4,-5,0,5,4,1]. Summing mirrored pairs keeps the derivative of a
// constant exactly zero.
struct HalfKernel {
    std::array<double, 4> taps;
    double parity;  // +1 symmetric, -1 antisymmetric
};
constexpr HalfKernel kSmooth{{20, 15, 6, 1}, 1.0};
constexpr HalfKernel kDeriv{{0, 5, 4, 1}, -1.0};
constexpr int kRadius = kSobelSize / 2;

template <typename At>
double apply(const HalfKernel& k, At at) {
    double acc = k.taps[0] * at(0);
    for (int i = 1; i <= kRadius; ++i) acc += k.taps[static_cast<std::size_t>(i)] * (at(i) + k.parity * at(-i));
    return acc;
}

RealGrid correlate_rows(const RealGrid& in, const HalfKernel& k) {
    RealGrid out(in.height(), in.width());
    for (int r = 0; r < in.height(); ++r)
        for (int c = 0; c < in.width(); ++c)
            out(r, c) = apply(k, [&](int o) { return in(r, clamp_index(c + o, in.width())); });
    return out;
}

RealGrid correlate_cols(const RealGrid& in, const HalfKernel& k) {
    RealGrid out(in.height(), in.width());
    for (int r = 0; r < in.height(); ++r)
        for (int c = 0; c < in.width(); ++c)
            out(r, c) = apply(k, [&](int o) { return in(clamp_index(r + o, in.height()), c); });
    return out;
}

}  // namespace

GradientField sobel7(const ImageField& gray) {
    if (gray.channels() != 1)
        throw Error(Errc::WrongChannelCount, "sobel7 needs a single-channel image");
    if (gray.height() < kSobelSize || gray.width() < kSobelSize)
        throw Error(Errc::ImageTooSmall, "sobel7 needs at least 7x7 pixels, got " +
                                             std::to_string(gray.height()) + "x" + std::to_string(gray.width()));
    const RealGrid src = gray.plane(0);
    GradientField g;
    g.gx = correlate_rows(correlate_cols(src, kSmooth), kDeriv);
    g.gy = correlate_cols(correlate_rows(src, kSmooth), kDeriv);
    g.magnitude = RealGrid(src.height(), src.width());
    for (std::size_t p = 0; p < src.size(); ++p) g.magnitude[p] = std::hypot(g.gx[p], g.gy[p]);
    return g;
}

ActiveMask texture_mask(const ImageField& gray, double threshold) {
    const GradientField g = sobel7(gray);
    ActiveMask mask(gray.height(), gray.width(), 0);
    const auto mag = g.magnitude.data();
    const double peak = *std::max_element(mag.begin(), mag.end());
    if (!(peak > 0.0)) return mask;
    for (std::size_t p = 0; p < mag.size(); ++p) mask[p] = (mag[p] / peak > threshold) ? 1 : 0;
    return mask;
}

double texturedness(const ActiveMask& mask) {
    if (mask.size() == 0) return 0.0;
    return static_cast<double>(mask.active_count()) / static_cast<double>(mask.size());
}

}  // namespace fdl
