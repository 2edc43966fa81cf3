#include "fdl/warp.hpp"

namespace fdl {

namespace detail {

ImageField warp_rows(const ImageField& src, const RealGrid& shift, double sign) {
    if (!src.same_grid(shift))
        throw Error(Errc::DimensionMismatch, "warp source and disparity grids differ");
    const int h = src.height();
    const int w = src.width();
    const int ch = src.channels();
    ImageField out(h, w, ch);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const LinearTap t = locate(c + sign * shift(r, c), w);
            for (int k = 0; k < ch; ++k) {
                if (w == 1) {
                    out(r, c, k) = src(r, 0, k);
                    continue;
                }
                const double v0 = src(r, t.col, k);
                const double v1 = src(r, t.col + 1, k);
                // Exact pass-through at integer taps keeps zero shifts bit-identical.
                out(r, c, k) = t.frac == 0.0 ? v0 : (t.frac == 1.0 ? v1 : v0 + t.frac * (v1 - v0));
            }
        }
    return out;
}

RealGrid warp_rows(const RealGrid& src, const RealGrid& shift, double sign) {
    if (!src.same_shape(shift))
        throw Error(Errc::DimensionMismatch, "warp source and disparity grids differ");
    const int h = src.height();
    const int w = src.width();
    RealGrid out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (w == 1) {
                out(r, c) = src(r, 0);
                continue;
            }
            const LinearTap t = locate(c + sign * shift(r, c), w);
            const double v0 = src(r, t.col);
            const double v1 = src(r, t.col + 1);
            out(r, c) = t.frac == 0.0 ? v0 : (t.frac == 1.0 ? v1 : v0 + t.frac * (v1 - v0));
        }
    return out;
}

}  // namespace detail

std::vector<double> sample_h(const ImageField& img, int row, double x) {
    if (row < 0 || row >= img.height())
        throw Error(Errc::RowOutOfBounds, "row " + std::to_string(row) + " outside image of height " +
                                              std::to_string(img.height()));
    std::vector<double> out(static_cast<std::size_t>(img.channels()));
    if (img.width() == 1) {
        for (int k = 0; k < img.channels(); ++k) out[static_cast<std::size_t>(k)] = img(row, 0, k);
        return out;
    }
    const LinearTap t = locate(x, img.width());
    for (int k = 0; k < img.channels(); ++k) {
        const double v0 = img(row, t.col, k);
        const double v1 = img(row, t.col + 1, k);
        out[static_cast<std::size_t>(k)] = t.frac == 0.0 ? v0 : (t.frac == 1.0 ? v1 : v0 + t.frac * (v1 - v0));
    }
    return out;
}

ImageField reconstruct_left(const ImageField& right, const DisparityMap& d_left) {
    return detail::warp_rows(right, d_left, shift_sign(Side::Left));
}

ImageField reconstruct_right(const ImageField& left, const DisparityMap& d_right) {
    return detail::warp_rows(left, d_right, shift_sign(Side::Right));
}

DisparityMap project_disparity(const DisparityMap& d_other, const DisparityMap& d_self, Side side) {
    if (!d_other.same_shape(d_self))
        throw Error(Errc::DimensionMismatch, "disparity maps differ in shape");
    return DisparityMap(detail::warp_rows(d_other, d_self, shift_sign(side)));
}

}  // namespace fdl
