#include <doctest.h>

#include <cmath>

#include "fdl/filler.hpp"
#include "fdl/losses.hpp"
#include "fdl/scenes.hpp"
#include "fdl/texture.hpp"
#include "support.hpp"

using namespace fdl;
using fdl::test::error_code_of;

namespace {

// SSIM of the 3x3 replicated window around (r, c), from the textbook formula.
double window_ssim(const ImageField& a, const ImageField& b, int r, int c, int ch) {
    double xa[9], xb[9];
    int n = 0;
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
            const int rr = std::clamp(r + dr, 0, a.height() - 1);
            const int cc = std::clamp(c + dc, 0, a.width() - 1);
            xa[n] = a(rr, cc, ch);
            xb[n] = b(rr, cc, ch);
            ++n;
        }
    double ma = 0, mb = 0;
    for (int i = 0; i < 9; ++i) {
        ma += xa[i] / 9;
        mb += xb[i] / 9;
    }
    double va = 0, vb = 0, cov = 0;
    for (int i = 0; i < 9; ++i) {
        va += (xa[i] - ma) * (xa[i] - ma) / 9;
        vb += (xb[i] - mb) * (xb[i] - mb) / 9;
        cov += (xa[i] - ma) * (xb[i] - mb) / 9;
    }
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    return (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
}

StereoPair textured_pair(int h, int w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return {test::random_image(h, w, 1, rng), test::random_image(h, w, 1, rng)};
}

}  // namespace

TEST_CASE("ssim_map matches the per-window formula") {
    std::mt19937_64 rng(1);
    for (int channels : {1, 3}) {
        const ImageField a = test::random_image(8, 8, channels, rng);
        const ImageField b = test::random_image(8, 8, channels, rng);
        const RealGrid s = ssim_map(a, b);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c) {
                double want = 0.0;
                for (int k = 0; k < channels; ++k) want += window_ssim(a, b, r, c, k) / channels;
                CHECK(std::abs(s(r, c) - want) < 1e-6);
            }
    }
}

TEST_CASE("ssim of an image with itself is one") {
    std::mt19937_64 rng(2);
    const ImageField a = test::random_image(9, 7, 1, rng);
    const RealGrid s = ssim_map(a, a);
    for (double v : s.data()) CHECK(v == 1.0);
}

TEST_CASE("ssim of constant black against constant white") {
    const double c1 = kSsimC1;
    const RealGrid s = ssim_map(ImageField(4, 4, 1, 0.0), ImageField(4, 4, 1, 1.0));
    for (double v : s.data()) CHECK(v == doctest::Approx(c1 / (1.0 + c1)).epsilon(1e-12));
}

TEST_CASE("image reconstruction loss examples") {
    std::mt19937_64 rng(3);
    const ImageField a = test::random_image(6, 6, 3, rng);
    CHECK(image_recon_loss(a, a, 0.85) == 0.0);

    CHECK(image_recon_loss(ImageField(5, 5, 1, 0.2), ImageField(5, 5, 1, 0.5), 0.0) ==
          doctest::Approx(0.3).epsilon(1e-14));

    const double ssim = kSsimC1 / (1.0 + kSsimC1);
    const double want = 0.85 * (1.0 - ssim) / 2.0 + 0.15 * 1.0;
    CHECK(image_recon_loss(ImageField(5, 5, 1, 0.0), ImageField(5, 5, 1, 1.0), 0.85) ==
          doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("smoothness loss examples") {
    CHECK(smoothness_loss(DisparityMap(6, 7, 3.0), ImageField(6, 7, 1, 0.4)) == 0.0);

    const int h = 6, w = 10;
    const double m = 0.3;
    DisparityMap ramp(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) ramp(r, c) = m * c;
    CHECK(smoothness_loss(ramp, ImageField(h, w, 1, 0.5)) == doctest::Approx(m * (w - 1) / w).epsilon(1e-13));

    const double g = 0.05;
    ImageField slope(h, w, 1);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) slope(r, c) = g * c;
    CHECK(smoothness_loss(ramp, slope) == doctest::Approx(std::exp(-g) * m * (w - 1) / w).epsilon(1e-12));
}

TEST_CASE("left-right consistency examples") {
    const DisparityMap c(5, 9, 2.0);
    CHECK(lr_consistency_loss(c, c, Side::Left) == 0.0);
    CHECK(lr_consistency_loss(c, c, Side::Right) == 0.0);

    std::mt19937_64 rng(4);
    const DisparityMap other = test::random_disparity(5, 9, 0.0, 3.0, rng);
    double sum = 0.0;
    for (double v : other.data()) sum += v;
    CHECK(lr_consistency_loss(DisparityMap(5, 9, 0.0), other, Side::Left) == doctest::Approx(sum / 45).epsilon(1e-14));

    for (Side side : {Side::Left, Side::Right}) {
        const DisparityMap self = test::random_disparity(5, 9, 0.0, 3.0, rng);
        const DisparityMap proj = project_disparity(other, self, side);
        double want = 0.0;
        for (std::size_t p = 0; p < self.size(); ++p) want += std::abs(self[p] - proj[p]);
        CHECK(lr_consistency_loss(self, other, side) == doctest::Approx(want / 45).epsilon(1e-14));
    }
}

TEST_CASE("filled disparity loss examples") {
    std::mt19937_64 rng(5);
    const DisparityMap d = test::random_disparity(8, 8, 0.0, 4.0, rng);
    CHECK(filled_disparity_loss(d, d) == 0.0);
    CHECK(filled_disparity_loss(DisparityMap(8, 8, 2.0), fill_with_mask(DisparityMap(8, 8, 2.0),
                                                                          test::random_mask(8, 8, 0.3, rng))) == 0.0);

    // Frame of ones around an interior of fives: the interior target is 1.
    DisparityMap wrong(8, 8, 1.0);
    ActiveMask m(8, 8, 1);
    for (int r = 2; r < 6; ++r)
        for (int c = 2; c < 6; ++c) {
            wrong(r, c) = 5.0;
            m(r, c) = 0;
        }
    CHECK(filled_disparity_loss(wrong, fill_with_mask(wrong, m)) == doctest::Approx(16.0 * 4.0 / 64.0).epsilon(1e-14));
}

TEST_CASE("pyramids") {
    const auto levels = pyramid(ImageField(16, 20, 1, 0.3));
    for (const ImageField& l : levels)
        for (double v : l.data()) CHECK(v == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(levels[1].height() == 8);
    CHECK(levels[3].width() == 3);

    // 2x2 blocks of distinct values: level 2 pixels are block means.
    ImageField blocks(8, 8, 1);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) blocks(r, c) = ((r / 2) * 4 + (c / 2)) / 16.0 + ((r + c) % 2) * 0.01;
    const auto bl = pyramid(blocks);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const double mean =
                0.25 * (blocks(2 * r, 2 * c) + blocks(2 * r + 1, 2 * c) + blocks(2 * r, 2 * c + 1) + blocks(2 * r + 1, 2 * c + 1));
            CHECK(bl[1](r, c) == doctest::Approx(mean).epsilon(1e-15));
        }

    const auto dl = pyramid_d(DisparityMap(16, 16, 8.0));
    CHECK(dl[0](3, 3) == 8.0);
    CHECK(dl[1](3, 3) == 4.0);
    CHECK(dl[2](1, 1) == 2.0);
    CHECK(dl[3](0, 0) == 1.0);

    // Odd sizes pool the trailing row/column with itself.
    ImageField odd(9, 9, 1, 0.0);
    odd(8, 8) = 1.0;
    CHECK(pyramid(odd)[1](4, 4) == 1.0);

    CHECK(error_code_of([] { pyramid(ImageField(7, 20, 1)); }) == Errc::ImageTooSmall);
    CHECK(error_code_of([] { pyramid_d(DisparityMap(20, 7, 0.0)); }) == Errc::ImageTooSmall);
}

TEST_CASE("total loss equals the weighted sum of independently computed terms") {
    const StereoPair pair = textured_pair(64, 72, 6);
    std::mt19937_64 rng(7);
    const DisparityMap dl = test::random_disparity(64, 72, 0.5, 4.0, rng);
    const DisparityMap dr = test::random_disparity(64, 72, 0.5, 4.0, rng);
    const LossWeights w{0.7, 0.2, 0.9, 0.4, 0.85};
    const LossBreakdown b = total_loss(pair, dl, dr, w);

    const auto il = pyramid(pair.left), ir = pyramid(pair.right);
    const auto pl = pyramid_d(dl), pr = pyramid_d(dr);
    double total = 0.0;
    for (std::size_t k = 0; k < kScales; ++k) {
        const ScaleTerms& t = b.scales[k];
        const double ir_l = image_recon_loss(il[k], reconstruct_left(ir[k], pl[k]), w.ssim_alpha);
        const double ir_r = image_recon_loss(ir[k], reconstruct_right(il[k], pr[k]), w.ssim_alpha);
        const double ds_l = smoothness_loss(pl[k], il[k]);
        const double ds_r = smoothness_loss(pr[k], ir[k]);
        const double lr_l = lr_consistency_loss(pl[k], pr[k], Side::Left);
        const double lr_r = lr_consistency_loss(pr[k], pl[k], Side::Right);
        const double fd_l = filled_disparity_loss(pl[k], fill_disparity(pl[k], il[k]).filled);
        const double fd_r = filled_disparity_loss(pr[k], fill_disparity(pr[k], ir[k]).filled);
        CHECK(std::abs(t.ir_left - ir_l) < 1e-12);
        CHECK(std::abs(t.ir_right - ir_r) < 1e-12);
        CHECK(std::abs(t.ds_left - ds_l) < 1e-12);
        CHECK(std::abs(t.ds_right - ds_r) < 1e-12);
        CHECK(std::abs(t.lr_left - lr_l) < 1e-12);
        CHECK(std::abs(t.lr_right - lr_r) < 1e-12);
        CHECK(std::abs(t.fd_left - fd_l) < 1e-12);
        CHECK(std::abs(t.fd_right - fd_r) < 1e-12);
        total += w.alpha_ap * (ir_l + ir_r) + w.alpha_ds * (ds_l + ds_r) + w.alpha_lr * (lr_l + lr_r) +
                 w.alpha_fd * (fd_l + fd_r);
    }
    CHECK(std::abs(b.total - total) < 1e-12);
}

TEST_CASE("zero weights give zero total") {
    const StereoPair pair = textured_pair(64, 64, 8);
    std::mt19937_64 rng(9);
    const LossBreakdown b = total_loss(pair, test::random_disparity(64, 64, 0, 3, rng),
                                       test::random_disparity(64, 64, 0, 3, rng), LossWeights{0, 0, 0, 0, 0.85});
    CHECK(b.total == 0.0);
}

TEST_CASE("terms are non-negative and the total is monotone in each weight") {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 5; ++t) {
        const StereoPair pair = textured_pair(64, 64, 100 + t);
        const DisparityMap dl = test::random_disparity(64, 64, 0, 5, rng);
        const DisparityMap dr = test::random_disparity(64, 64, 0, 5, rng);
        const LossWeights base{1, 0.1, 1, 0.5, 0.85};
        const LossBreakdown b = total_loss(pair, dl, dr, base);
        for (const ScaleTerms& s : b.scales)
            for (double v : {s.ir_left, s.ir_right, s.ds_left, s.ds_right, s.lr_left, s.lr_right, s.fd_left, s.fd_right})
                CHECK(v >= 0.0);
        for (double LossWeights::*field :
             {&LossWeights::alpha_ap, &LossWeights::alpha_ds, &LossWeights::alpha_lr, &LossWeights::alpha_fd}) {
            LossWeights more = base;
            more.*field += 0.5;
            CHECK(total_loss(pair, dl, dr, more).total >= b.total);
        }
    }
}

TEST_CASE("loss is consistent under a horizontal flip with swapped views") {
    std::mt19937_64 rng(11);
    const StereoPair pair = textured_pair(64, 96, 12);
    const DisparityMap dl = test::random_disparity(64, 96, 0.2, 5.0, rng);
    const DisparityMap dr = test::random_disparity(64, 96, 0.2, 5.0, rng);
    const LossWeights w{};
    const LossBreakdown a = total_loss(pair, dl, dr, w);
    const StereoPair flipped{test::flip_h(pair.right), test::flip_h(pair.left)};
    const LossBreakdown b = total_loss(flipped, test::flip_h(dr), test::flip_h(dl), w);
    for (std::size_t k = 0; k < kScales; ++k) {
        CHECK(std::abs(a.scales[k].ir_left - b.scales[k].ir_right) < 1e-6);
        CHECK(std::abs(a.scales[k].ir_right - b.scales[k].ir_left) < 1e-6);
        CHECK(std::abs(a.scales[k].ds_left - b.scales[k].ds_right) < 1e-6);
        CHECK(std::abs(a.scales[k].lr_left - b.scales[k].lr_right) < 1e-6);
        CHECK(std::abs(a.scales[k].lr_right - b.scales[k].lr_left) < 1e-6);
        CHECK(std::abs(a.scales[k].fd_left - b.scales[k].fd_right) < 1e-6);
        CHECK(std::abs(a.scales[k].fd_right - b.scales[k].fd_left) < 1e-6);
    }
    CHECK(std::abs(a.total - b.total) < 1e-6);
}

TEST_CASE("reconstruction term is minimal at the true shift") {
    const RenderedScene scene = render_stereo(fixture("textured_shift"));
    const LossWeights w{1, 0, 0, 0, 0.85};
    const int h = scene.pair.left.height(), wd = scene.pair.left.width();
    double prev = -1.0;
    for (double err : {0.0, 0.25, 0.5, 1.0, 2.0, 3.0}) {
        const DisparityMap d(h, wd, 4.0 + err);
        const LossBreakdown b = total_loss(scene.pair, d, d, w);
        const double v = b.total;
        // only the clamped border columns differ at full resolution
        if (err == 0.0) CHECK(b.scales[0].ir_left + b.scales[0].ir_right < 0.005);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("loss model rejects untextured or mismatched input") {
    const StereoPair flat{ImageField(64, 64, 1, 0.5), ImageField(64, 64, 1, 0.5)};
    CHECK(error_code_of([&] { LossModel(flat, LossWeights{}); }) == Errc::NoActivePixels);
    const StereoPair pair = textured_pair(64, 64, 13);
    CHECK(error_code_of([&] { total_loss(pair, DisparityMap(64, 63, 0.0), DisparityMap(64, 64, 0.0), LossWeights{}); }) ==
          Errc::DimensionMismatch);
    // The coarsest level must still fit the 7x7 texture operator.
    const StereoPair small = textured_pair(32, 32, 14);
    CHECK(error_code_of([&] { LossModel(small, LossWeights{}); }) == Errc::ImageTooSmall);
}
