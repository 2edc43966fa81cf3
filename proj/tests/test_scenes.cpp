#include <algorithm>
#include <doctest.h>

#include <cmath>

#include "fdl/scenes.hpp"
#include "fdl/texture.hpp"
#include "fdl/warp.hpp"
#include "support.hpp"

using namespace fdl;

namespace {

bool same(const ImageField& a, const ImageField& b) {
    return a.same_shape(b) && std::ranges::equal(a.data(), b.data());
}

bool same(const DisparityMap& a, const DisparityMap& b) {
    return a.same_shape(b) && std::ranges::equal(a.data(), b.data());
}

}  // namespace

TEST_CASE("rendering is deterministic") {
    for (const std::string& name : fixture_names()) {
        const RenderedScene a = render_stereo(fixture(name));
        const RenderedScene b = render_stereo(fixture(name));
        CHECK(same(a.pair.left, b.pair.left));
        CHECK(same(a.pair.right, b.pair.right));
        CHECK(same(a.disparity_left, b.disparity_left));
    }
    SceneSpec other = fixture("textured_shift");
    other.seed = 99;
    CHECK(!same(render_stereo(other).pair.left, render_stereo(fixture("textured_shift")).pair.left));
}

TEST_CASE("ground truth links corresponding pixels in both views") {
    for (const std::string& name : fixture_names()) {
        INFO(name);
        const RenderedScene s = render_stereo(fixture(name));
        const int h = s.pair.left.height(), w = s.pair.left.width();
        int checked = 0;
        double worst = 0.0;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const double dl = s.disparity_left(r, c);
                const int cr = c - static_cast<int>(dl);
                if (cr >= 0 && s.disparity_right(r, cr) == dl) {
                    worst = std::max(worst, std::abs(s.pair.left(r, c) - s.pair.right(r, cr)));
                    ++checked;
                }
                const double dr = s.disparity_right(r, c);
                const int cl = c + static_cast<int>(dr);
                if (cl < w && s.disparity_left(r, cl) == dr) {
                    worst = std::max(worst, std::abs(s.pair.right(r, c) - s.pair.left(r, cl)));
                    ++checked;
                }
            }
        CHECK(checked > h * w);
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("warping with ground truth reproduces the textured fixture") {
    const RenderedScene s = render_stereo(fixture("textured_shift"));
    const ImageField left = reconstruct_left(s.pair.right, s.disparity_left);
    const ImageField right = reconstruct_right(s.pair.left, s.disparity_right);
    double err_l = 0.0, err_r = 0.0;
    int n = 0;
    for (int r = 0; r < left.height(); ++r)
        for (int c = 8; c < left.width() - 8; ++c) {
            err_l += std::abs(left(r, c) - s.pair.left(r, c));
            err_r += std::abs(right(r, c) - s.pair.right(r, c));
            ++n;
        }
    CHECK(err_l / n < 1e-3);
    CHECK(err_r / n < 1e-3);
}

TEST_CASE("fixtures have the expected layout") {
    const RenderedScene shift = render_stereo(fixture("textured_shift"));
    for (double v : shift.disparity_left.data()) CHECK(v == 4.0);
    CHECK(texturedness(texture_mask(shift.pair.left)) > 0.5);

    const RenderedScene wall = render_stereo(fixture("untextured_wall"));
    CHECK(texturedness(texture_mask(wall.pair.left)) < 0.5);
    CHECK(wall.disparity_left(64, 128) == 6.0);
    CHECK(wall.disparity_left(64, 10) == 2.0);

    const RenderedScene hole = render_stereo(fixture("framed_hole"));
    for (double v : hole.disparity_left.data()) CHECK(v == 5.0);

    CHECK(test::error_code_of([] { fixture("nope"); }) == Errc::UnknownFixture);
}

TEST_CASE("single region example") {
    SceneSpec spec;
    spec.width = 32;
    spec.height = 16;
    spec.background = {1.0, 0.0, 8.0, 0.2};
    spec.regions.push_back({10, 4, 8, 6, {3.0, 0.0, 8.0, 0.9}});
    const RenderedScene s = render_stereo(spec);
    CHECK(s.pair.left(5, 12) == 0.9);
    CHECK(s.pair.left(5, 9) == 0.2);
    CHECK(s.disparity_left(5, 12) == 3.0);
    CHECK(s.disparity_left(0, 0) == 1.0);
    // the region appears 3 columns further left in the right view
    CHECK(s.pair.right(5, 7) == 0.9);
    CHECK(s.pair.right(5, 6) == 0.2);
    CHECK(s.disparity_right(5, 7) == 3.0);
}

TEST_CASE("zero rotation is the identity") {
    const SceneSpec spec = fixture("multi_plane");
    const RenderedScene a = render_stereo(spec);
    const RenderedScene b = render_stereo(spec, RotationSample{0.0, 0.0});
    CHECK(same(a.pair.left, b.pair.left));
    CHECK(same(a.pair.right, b.pair.right));
    CHECK(same(a.disparity_right, b.disparity_right));
    const RenderedScene c = render_stereo(spec, RotationSample{3.0, -4.0});
    CHECK(!same(a.pair.left, c.pair.left));
    for (double v : c.pair.left.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(test::error_code_of([&] { render_stereo(spec, RotationSample{NAN, 0.0}); }) == Errc::NonFiniteValue);
}

TEST_CASE("rotation regimes") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        const RotationSample n = sample_rotation(RotationDataset::N, rng);
        CHECK(n.pitch_deg == 0.0);
        CHECK(n.roll_deg == 0.0);
        const RotationSample p = sample_rotation(RotationDataset::P, rng, 0.0);
        CHECK(p.pitch_deg == 0.0);
        CHECK(sample_rotation(RotationDataset::R, rng).pitch_deg == 0.0);
        CHECK(sample_rotation(RotationDataset::P, rng).roll_deg == 0.0);
    }
    double sp = 0, sp2 = 0, sr = 0, sr2 = 0;
    const int n = 10000;
    for (int t = 0; t < n; ++t) {
        const RotationSample s = sample_rotation(RotationDataset::PR, rng);
        sp += s.pitch_deg;
        sp2 += s.pitch_deg * s.pitch_deg;
        sr += s.roll_deg;
        sr2 += s.roll_deg * s.roll_deg;
    }
    const double std_p = std::sqrt(sp2 / n - (sp / n) * (sp / n));
    const double std_r = std::sqrt(sr2 / n - (sr / n) * (sr / n));
    CHECK(std::abs(std_p - kRotationSigmaDeg) < 0.05 * kRotationSigmaDeg);
    CHECK(std::abs(std_r - kRotationSigmaDeg) < 0.05 * kRotationSigmaDeg);

    CHECK(parse_dataset("PR") == RotationDataset::PR);
    CHECK(std::string(dataset_name(RotationDataset::R)) == "R");
    CHECK(test::error_code_of([] { parse_dataset("X"); }) == Errc::InvalidArgument);
    CHECK(test::error_code_of([&] { sample_rotation(RotationDataset::P, rng, -1.0); }) == Errc::OutOfRange);
}

TEST_CASE("scene text round trip") {
    for (const std::string& name : fixture_names()) {
        const SceneSpec a = fixture(name);
        const SceneSpec b = parse_scene(format_scene(a));
        CHECK(format_scene(b) == format_scene(a));
        CHECK(same(render_stereo(a).pair.left, render_stereo(b).pair.left));
    }
    const SceneSpec parsed = parse_scene(
        "# comment\n[scene]\nwidth = 64\nheight = 48\nseed = 7\n[background]\ndisparity = 1.5\namplitude = 0.2\n"
        "cell = 4\nbase = 0.3\n[region]\nx = 1\ny = 2\nwidth = 10\nheight = 5\ndisparity = 3\n");
    CHECK(parsed.width == 64);
    CHECK(parsed.seed == 7);
    CHECK(parsed.background.base == 0.3);
    REQUIRE(parsed.regions.size() == 1);
    CHECK(parsed.regions[0].surface.disparity == 3.0);
}

TEST_CASE("scene validation") {
    SceneSpec spec;
    spec.regions.push_back({0, 0, 10, 10, {}});
    spec.regions.push_back({250, 0, 10, 10, {}});
    try {
        validate(spec);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::RegionOutOfBounds);
        CHECK(e.index() == std::optional<std::size_t>(1));
    }
    spec = {};
    spec.background.texture_amplitude = 1.5;
    CHECK(test::error_code_of([&] { validate(spec); }) == Errc::OutOfRange);
    spec = {};
    spec.background.base = 0.9;
    CHECK(test::error_code_of([&] { validate(spec); }) == Errc::OutOfRange);
    spec = {};
    spec.background.disparity = -1.0;
    CHECK(test::error_code_of([&] { validate(spec); }) == Errc::OutOfRange);
    CHECK(test::error_code_of([] { parse_scene("[scene]\nwidth = abc\n"); }) == Errc::MalformedHeader);
    CHECK(test::error_code_of([] { parse_scene("[scene]\ncolour = 3\n"); }) == Errc::MalformedHeader);
    CHECK(test::error_code_of([] { parse_scene("width = 3\n"); }) == Errc::MalformedHeader);
}
