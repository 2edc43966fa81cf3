#include "fdl/losses.hpp"

#include <algorithm>

#include "fdl/filler.hpp"
#include "fdl/texture.hpp"
#include "terms.hpp"

namespace fdl {

namespace {

ImageField pool2(const ImageField& in) {
    const int h = (in.height() + 1) / 2;
    const int w = (in.width() + 1) / 2;
    ImageField out(h, w, in.channels());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const int r0 = 2 * r, r1 = std::min(2 * r + 1, in.height() - 1);
            const int c0 = 2 * c, c1 = std::min(2 * c + 1, in.width() - 1);
            for (int k = 0; k < in.channels(); ++k)
                out(r, c, k) = 0.25 * (in(r0, c0, k) + in(r0, c1, k) + in(r1, c0, k) + in(r1, c1, k));
        }
    return out;
}

void require_pyramid_size(int height, int width) {
    if (height < kMinPyramidSize || width < kMinPyramidSize)
        throw Error(Errc::ImageTooSmall, "scale pyramid needs at least 8x8 pixels, got " + std::to_string(height) +
                                             "x" + std::to_string(width));
}

void require_same(const ImageField& a, const ImageField& b) {
    if (!a.same_shape(b)) throw Error(Errc::DimensionMismatch, "images differ in shape");
}

void require_same(const DisparityMap& a, const DisparityMap& b) {
    if (!a.same_shape(b)) throw Error(Errc::DimensionMismatch, "disparity maps differ in shape");
}

void require_same(const DisparityMap& d, const ImageField& img) {
    if (!img.same_grid(d)) throw Error(Errc::DimensionMismatch, "disparity map and image grids differ");
}

}  // namespace

ScalePyramid<ImageField> pyramid(const ImageField& img) {
    require_pyramid_size(img.height(), img.width());
    ScalePyramid<ImageField> out;
    out[0] = img;
    for (std::size_t s = 1; s < out.size(); ++s) out[s] = pool2(out[s - 1]);
    return out;
}

ScalePyramid<DisparityMap> pyramid_d(const DisparityMap& disp) {
    require_pyramid_size(disp.height(), disp.width());
    ScalePyramid<DisparityMap> out;
    out[0] = disp;
    for (std::size_t s = 1; s < out.size(); ++s) {
        const DisparityMap& prev = out[s - 1];
        ImageField as_image(prev.height(), prev.width(), 1,
                            std::vector<double>(prev.data().begin(), prev.data().end()));
        const ImageField pooled = pool2(as_image);
        DisparityMap level(pooled.height(), pooled.width());
        for (std::size_t p = 0; p < level.size(); ++p) level[p] = 0.5 * pooled.data()[p];
        out[s] = std::move(level);
    }
    return out;
}

RealGrid ssim_map(const ImageField& a, const ImageField& b) {
    require_same(a, b);
    RealGrid out(a.height(), a.width());
    for (int k = 0; k < a.channels(); ++k) {
        const RealGrid s = detail::ssim_channel(a.plane(k), b.plane(k));
        for (std::size_t p = 0; p < out.size(); ++p) out[p] += s[p];
    }
    for (double& v : out.data()) v /= a.channels();
    return out;
}

double image_recon_loss(const ImageField& image, const ImageField& reconstruction, double ssim_alpha) {
    require_same(image, reconstruction);
    // A zero shift reproduces `reconstruction` exactly, so the warp-based
    // kernel evaluates the plain image comparison.
    return detail::recon_term(image, reconstruction, RealGrid(image.height(), image.width()), 0.0, ssim_alpha);
}

double smoothness_loss(const DisparityMap& disp, const ImageField& image) {
    require_same(disp, image);
    return detail::smooth_term(disp, image);
}

double lr_consistency_loss(const DisparityMap& d_self, const DisparityMap& d_other, Side side) {
    require_same(d_self, d_other);
    return detail::lr_term(d_self, d_other, shift_sign(side));
}

double filled_disparity_loss(const DisparityMap& disp, const DisparityMap& filled) {
    require_same(disp, filled);
    return detail::fd_term(disp, filled);
}

double ScaleTerms::weighted(const LossWeights& w) const {
    return w.alpha_ap * (ir_left + ir_right) + w.alpha_ds * (ds_left + ds_right) +
           w.alpha_lr * (lr_left + lr_right) + w.alpha_fd * (fd_left + fd_right);
}

LossModel::LossModel(const StereoPair& pair, const LossWeights& weights) : weights_(weights) {
    validate(pair);
    validate(weights);
    left_ = pyramid(pair.left);
    right_ = pyramid(pair.right);
    for (std::size_t s = 0; s < kScales; ++s) {
        try {
            mask_left_[s] = texture_mask(as_gray(left_[s]));
            mask_right_[s] = texture_mask(as_gray(right_[s]));
        } catch (const Error& e) {
            const std::string what = e.what();
            const std::string detail = what.substr(what.find(": ") + 2);
            throw Error(e.code(), detail + " at scale " + std::to_string(s + 1));
        }
        if (mask_left_[s].active_count() == 0 || mask_right_[s].active_count() == 0)
            throw Error(Errc::NoActivePixels, std::string(mask_left_[s].active_count() == 0 ? "left" : "right") +
                                                  " image has no textured pixels at scale " + std::to_string(s + 1));
    }
}

void LossModel::check_disparities(const DisparityMap& d_left, const DisparityMap& d_right) const {
    if (!d_left.same_shape(height(), width()) || !d_right.same_shape(height(), width()))
        throw Error(Errc::DimensionMismatch, "disparity maps do not match the stereo pair");
}

FilledTargets LossModel::filled_targets(const DisparityMap& d_left, const DisparityMap& d_right) const {
    check_disparities(d_left, d_right);
    const auto pl = pyramid_d(d_left);
    const auto pr = pyramid_d(d_right);
    FilledTargets t;
    for (std::size_t s = 0; s < kScales; ++s) {
        t.left[s] = fill_with_mask(pl[s], mask_left_[s]);
        t.right[s] = fill_with_mask(pr[s], mask_right_[s]);
    }
    return t;
}

LossBreakdown LossModel::evaluate(const DisparityMap& d_left, const DisparityMap& d_right) const {
    return evaluate(d_left, d_right, filled_targets(d_left, d_right));
}

LossBreakdown LossModel::evaluate(const DisparityMap& d_left, const DisparityMap& d_right,
                                  const FilledTargets& targets) const {
    check_disparities(d_left, d_right);
    const auto pl = pyramid_d(d_left);
    const auto pr = pyramid_d(d_right);
    for (std::size_t s = 0; s < kScales; ++s)
        if (!targets.left[s].same_shape(pl[s]) || !targets.right[s].same_shape(pr[s]))
            throw Error(Errc::DimensionMismatch, "filled targets do not match scale " + std::to_string(s + 1));
    LossBreakdown out;
    for (std::size_t s = 0; s < kScales; ++s) {
        ScaleTerms& t = out.scales[s];
        const double left_sign = shift_sign(Side::Left);
        const double right_sign = shift_sign(Side::Right);
        t.ir_left = detail::recon_term(left_[s], right_[s], pl[s], left_sign, weights_.ssim_alpha);
        t.ir_right = detail::recon_term(right_[s], left_[s], pr[s], right_sign, weights_.ssim_alpha);
        t.ds_left = detail::smooth_term(pl[s], left_[s]);
        t.ds_right = detail::smooth_term(pr[s], right_[s]);
        t.lr_left = detail::lr_term(pl[s], pr[s], left_sign);
        t.lr_right = detail::lr_term(pr[s], pl[s], right_sign);
        t.fd_left = detail::fd_term(pl[s], targets.left[s]);
        t.fd_right = detail::fd_term(pr[s], targets.right[s]);
        out.total += t.weighted(weights_);
    }
    return out;
}

LossBreakdown total_loss(const StereoPair& pair, const DisparityMap& d_left, const DisparityMap& d_right,
                         const LossWeights& weights) {
    return LossModel(pair, weights).evaluate(d_left, d_right);
}

}  // namespace fdl
