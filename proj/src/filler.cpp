#include "fdl/filler.hpp"

#include <array>
#include <cmath>

#include "fdl/texture.hpp"

namespace fdl {

namespace {

constexpr int kSmoothRadius = 2;

void check_same_grid(const DisparityMap& disp, const ActiveMask& mask) {
    if (!disp.same_shape(mask))
        throw Error(Errc::DimensionMismatch, "disparity is " + std::to_string(disp.height()) + "x" +
                                                 std::to_string(disp.width()) + ", mask is " +
                                                 std::to_string(mask.height()) + "x" +
                                                 std::to_string(mask.width()));
}

}  // namespace

FillResult propagate(const DisparityMap& disp, const ActiveMask& mask) {
    check_same_grid(disp, mask);
    const int h = disp.height();
    const int w = disp.width();

    // The simultaneous update fills a pixel at iteration t exactly when its
    // grid distance to the seed set is t, and averages the neighbours at
    // distance t - 1. A multi-source BFS visits pixels in that order.
    Grid<int> layer(h, w, -1);
    std::vector<std::size_t> order;
    order.reserve(disp.size());
    for (std::size_t p = 0; p < mask.size(); ++p)
        if (mask[p]) {
            layer[p] = 0;
            order.push_back(p);
        }
    if (order.empty()) throw Error(Errc::NoActivePixels, "no textured pixels to propagate from");

    FillResult result{disp, 0, mask};
    DisparityMap& out = result.filled;

    for (std::size_t head = 0; head < order.size(); ++head) {
        const std::size_t p = order[head];
        const int r = static_cast<int>(p / static_cast<std::size_t>(w));
        const int c = static_cast<int>(p % static_cast<std::size_t>(w));
        const int next = layer[p] + 1;
        const std::array<std::array<int, 2>, 4> nbrs{{{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}}};
        for (const auto& [nr, nc] : nbrs) {
            if (nr < 0 || nr >= h || nc < 0 || nc >= w || layer(nr, nc) >= 0) continue;
            layer(nr, nc) = next;
            order.push_back(static_cast<std::size_t>(nr) * static_cast<std::size_t>(w) +
                            static_cast<std::size_t>(nc));
        }
        if (layer[p] == 0) continue;

        double sum = 0.0;
        int count = 0;
        for (const auto& [nr, nc] : nbrs) {
            if (nr < 0 || nr >= h || nc < 0 || nc >= w || layer(nr, nc) != layer[p] - 1) continue;
            sum += out(nr, nc);
            ++count;
        }
        out[p] = sum / count;
        result.iterations = layer[p];
    }
    return result;
}

DisparityMap smooth(const FillResult& fill) {
    const DisparityMap& in = fill.filled;
    check_same_grid(in, fill.initially_active);
    if (in.size() != in.pixel_count())
        throw Error(Errc::IncompleteFill, "filled map does not cover the grid");
    for (std::size_t p = 0; p < in.size(); ++p)
        if (!std::isfinite(in[p])) throw Error(Errc::IncompleteFill, "filled map has unset pixels", p);

    std::array<std::array<double, 2 * kSmoothRadius + 1>, 2 * kSmoothRadius + 1> weight{};
    for (int dr = -kSmoothRadius; dr <= kSmoothRadius; ++dr)
        for (int dc = -kSmoothRadius; dc <= kSmoothRadius; ++dc)
            weight[static_cast<std::size_t>(dr + kSmoothRadius)][static_cast<std::size_t>(dc + kSmoothRadius)] =
                (dr == 0 && dc == 0) ? 1.0 : 1.0 / std::sqrt(static_cast<double>(dr * dr + dc * dc));

    DisparityMap out = in;
    const int h = in.height();
    const int w = in.width();
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (fill.initially_active.active(r, c)) continue;
            double acc = 0.0;
            double norm = 0.0;
            for (int dr = -kSmoothRadius; dr <= kSmoothRadius; ++dr) {
                const int rr = r + dr;
                if (rr < 0 || rr >= h) continue;
                for (int dc = -kSmoothRadius; dc <= kSmoothRadius; ++dc) {
                    const int cc = c + dc;
                    if (cc < 0 || cc >= w) continue;
                    const double k = weight[static_cast<std::size_t>(dr + kSmoothRadius)]
                                           [static_cast<std::size_t>(dc + kSmoothRadius)];
                    acc += k * in(rr, cc);
                    norm += k;
                }
            }
            out(r, c) = acc / norm;
        }
    return out;
}

DisparityMap fill_with_mask(const DisparityMap& disp, const ActiveMask& mask) {
    return smooth(propagate(disp, mask));
}

FilledDisparity fill_disparity(const DisparityMap& disp, const ImageField& gray) {
    if (!gray.same_grid(disp))
        throw Error(Errc::DimensionMismatch, "disparity and image grids differ");
    ActiveMask mask = texture_mask(as_gray(gray));
    DisparityMap filled = fill_with_mask(disp, mask);
    return {std::move(filled), std::move(mask)};
}

}  // namespace fdl
