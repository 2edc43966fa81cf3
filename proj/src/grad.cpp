#include "fdl/grad.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "terms.hpp"

namespace fdl {

namespace {

void require_finite(const RealGrid& g, const char* what) {
    for (std::size_t p = 0; p < g.size(); ++p)
        if (!std::isfinite(g[p])) throw Error(Errc::NonFiniteValue, std::string(what) + " is not finite", p);
}

void require_same_grid(const DisparityMap& d, const ImageField& img) {
    if (!img.same_grid(d)) throw Error(Errc::DimensionMismatch, "disparity map and image grids differ");
}

void require_same_grid(const DisparityMap& a, const DisparityMap& b) {
    if (!a.same_shape(b)) throw Error(Errc::DimensionMismatch, "disparity maps differ in shape");
}

}  // namespace

RealGrid grad_recon(const ImageField& image, const ImageField& other, const DisparityMap& disp, Side side,
                    double ssim_alpha) {
    if (!image.same_shape(other)) throw Error(Errc::DimensionMismatch, "images differ in shape");
    require_same_grid(disp, image);
    RealGrid g(disp.height(), disp.width());
    detail::recon_term(image, other, disp, shift_sign(side), ssim_alpha, &g);
    require_finite(g, "reconstruction gradient");
    return g;
}

RealGrid grad_smooth(const DisparityMap& disp, const ImageField& image) {
    require_same_grid(disp, image);
    RealGrid g(disp.height(), disp.width());
    detail::smooth_term(disp, image, &g);
    require_finite(g, "smoothness gradient");
    return g;
}

LrGradient grad_lr(const DisparityMap& d_self, const DisparityMap& d_other, Side side) {
    require_same_grid(d_self, d_other);
    LrGradient g{RealGrid(d_self.height(), d_self.width()), RealGrid(d_self.height(), d_self.width())};
    detail::lr_term(d_self, d_other, shift_sign(side), &g.d_self, &g.d_other);
    require_finite(g.d_self, "consistency gradient");
    require_finite(g.d_other, "consistency gradient");
    return g;
}

RealGrid grad_fd(const DisparityMap& disp, const DisparityMap& filled) {
    require_same_grid(disp, filled);
    RealGrid g(disp.height(), disp.width());
    detail::fd_term(disp, filled, &g);
    return g;
}

GradField grad_total(const LossModel& model, const DisparityMap& d_left, const DisparityMap& d_right,
                     const FilledTargets& targets, LossBreakdown* value) {
    const LossWeights& w = model.weights();
    if (!d_left.same_shape(model.height(), model.width()) || !d_right.same_shape(model.height(), model.width()))
        throw Error(Errc::DimensionMismatch, "disparity maps do not match the stereo pair");
    const auto pl = pyramid_d(d_left);
    const auto pr = pyramid_d(d_right);
    const auto& il = model.levels(Side::Left);
    const auto& ir = model.levels(Side::Right);
    const double ls = shift_sign(Side::Left);
    const double rs = shift_sign(Side::Right);

    LossBreakdown breakdown;
    RealGrid acc_left, acc_right;
    // Coarse to fine: each level's gradient is added to the adjoint of the
    // coarser level's accumulated gradient. Disparities halve per level, so
    // the pooling adjoint carries an extra factor 1/2.
    for (int s = kScales - 1; s >= 0; --s) {
        const auto k = static_cast<std::size_t>(s);
        const int h = pl[k].height();
        const int wd = pl[k].width();
        RealGrid gl = s + 1 < kScales ? detail::pool_adjoint(acc_left, h, wd, 0.5) : RealGrid(h, wd);
        RealGrid gr = s + 1 < kScales ? detail::pool_adjoint(acc_right, h, wd, 0.5) : RealGrid(h, wd);

        if (!targets.left[k].same_shape(pl[k]) || !targets.right[k].same_shape(pr[k]))
            throw Error(Errc::DimensionMismatch, "filled targets do not match scale " + std::to_string(s + 1));

        ScaleTerms& t = breakdown.scales[k];
        t.ir_left = detail::recon_term(il[k], ir[k], pl[k], ls, w.ssim_alpha, &gl, w.alpha_ap);
        t.ir_right = detail::recon_term(ir[k], il[k], pr[k], rs, w.ssim_alpha, &gr, w.alpha_ap);
        t.ds_left = detail::smooth_term(pl[k], il[k], &gl, w.alpha_ds);
        t.ds_right = detail::smooth_term(pr[k], ir[k], &gr, w.alpha_ds);
        t.lr_left = detail::lr_term(pl[k], pr[k], ls, &gl, &gr, w.alpha_lr);
        t.lr_right = detail::lr_term(pr[k], pl[k], rs, &gr, &gl, w.alpha_lr);
        t.fd_left = detail::fd_term(pl[k], targets.left[k], &gl, w.alpha_fd);
        t.fd_right = detail::fd_term(pr[k], targets.right[k], &gr, w.alpha_fd);

        acc_left = std::move(gl);
        acc_right = std::move(gr);
    }
    for (const ScaleTerms& t : breakdown.scales) breakdown.total += t.weighted(w);

    require_finite(acc_left, "total gradient");
    require_finite(acc_right, "total gradient");
    if (value) *value = breakdown;
    return {std::move(acc_left), std::move(acc_right)};
}

GradField grad_total(const StereoPair& pair, const DisparityMap& d_left, const DisparityMap& d_right,
                     const LossWeights& weights) {
    const LossModel model(pair, weights);
    return grad_total(model, d_left, d_right, model.filled_targets(d_left, d_right));
}

double relative_error(double analytic, double numeric) {
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    return scale < 1e-10 ? 0.0 : std::abs(analytic - numeric) / scale;
}

GradCheckReport check_gradient(const std::function<double(const RealGrid&)>& loss, const RealGrid& x,
                               const RealGrid& analytic, int samples, std::uint64_t seed, double h,
                               double lower_bound) {
    if (!x.same_shape(analytic)) throw Error(Errc::DimensionMismatch, "gradient and point differ in shape");
    if (x.size() == 0 || samples < 1 || !(h > 0.0)) throw Error(Errc::InvalidArgument, "empty gradient check");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
    GradCheckReport report;
    RealGrid probe = x;
    const long max_draws = 50L * samples;
    for (long draw = 0; draw < max_draws && static_cast<int>(report.points.size()) < samples; ++draw) {
        const std::size_t p = pick(rng);
        if (x[p] - h < lower_bound) {
            ++report.skipped;
            continue;
        }
        auto central = [&](double step) {
            probe[p] = x[p] + step;
            const double fp = loss(probe);
            probe[p] = x[p] - step;
            const double fm = loss(probe);
            probe[p] = x[p];
            return (fp - fm) / (2.0 * step);
        };
        const double full = central(h);
        const double half = central(0.5 * h);
        if (std::abs(full - half) > 1e-4 * std::max({std::abs(full), std::abs(half), 1e-10})) {
            ++report.skipped;
            continue;
        }
        GradCheckPoint pt{p, analytic[p], full, 0.0};
        pt.rel_error = relative_error(pt.analytic, pt.numeric);
        report.max_rel_error = std::max(report.max_rel_error, pt.rel_error);
        report.points.push_back(pt);
    }
    return report;
}

TotalGradCheck check_grad_total(const StereoPair& pair, const DisparityMap& d_left, const DisparityMap& d_right,
                                const LossWeights& weights, int samples, std::uint64_t seed, double h) {
    const LossModel model(pair, weights);
    const FilledTargets targets = model.filled_targets(d_left, d_right);
    const GradField g = grad_total(model, d_left, d_right, targets);
    auto total_left = [&](const RealGrid& x) { return model.evaluate(DisparityMap(x), d_right, targets).total; };
    auto total_right = [&](const RealGrid& x) { return model.evaluate(d_left, DisparityMap(x), targets).total; };
    const int half = std::max(1, samples / 2);
    return {check_gradient(total_left, d_left, g.d_dleft, half, seed, h, 0.0),
            check_gradient(total_right, d_right, g.d_dright, std::max(1, samples - half), seed + 1, h, 0.0)};
}

}  // namespace fdl
