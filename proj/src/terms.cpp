#include "terms.hpp"

#include <algorithm>
#include <cmath>

#include "fdl/losses.hpp"
#include "fdl/warp.hpp"

namespace fdl::detail {

namespace {

constexpr double kBoxWeight = 1.0 / 9.0;

RealGrid box3(const RealGrid& in) {
    const int h = in.height();
    const int w = in.width();
    RealGrid out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int dr = -1; dr <= 1; ++dr) {
                const int rr = clamp_index(r + dr, h);
                for (int dc = -1; dc <= 1; ++dc) acc += in(rr, clamp_index(c + dc, w));
            }
            out(r, c) = acc * kBoxWeight;
        }
    return out;
}

// Transpose of box3 under edge replication.
RealGrid box3_adjoint(const RealGrid& in) {
    const int h = in.height();
    const int w = in.width();
    RealGrid out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const double v = in(r, c) * kBoxWeight;
            for (int dr = -1; dr <= 1; ++dr) {
                const int rr = clamp_index(r + dr, h);
                for (int dc = -1; dc <= 1; ++dc) out(rr, clamp_index(c + dc, w)) += v;
            }
        }
    return out;
}

RealGrid product(const RealGrid& a, const RealGrid& b) {
    RealGrid out(a.height(), a.width());
    for (std::size_t p = 0; p < a.size(); ++p) out[p] = a[p] * b[p];
    return out;
}

struct SsimStats {
    RealGrid mu_a, mu_b, s_aa, s_bb, s_ab;
};

SsimStats ssim_stats(const RealGrid& a, const RealGrid& b) {
    return {box3(a), box3(b), box3(product(a, a)), box3(product(b, b)), box3(product(a, b))};
}

struct SsimParts {
    double n1, n2, d1, d2;
    double value() const { return (n1 * n2) / (d1 * d2); }
};

SsimParts ssim_parts(const SsimStats& s, std::size_t p) {
    const double ma = s.mu_a[p];
    const double mb = s.mu_b[p];
    const double var_a = s.s_aa[p] - ma * ma;
    const double var_b = s.s_bb[p] - mb * mb;
    const double cov = s.s_ab[p] - ma * mb;
    return {2.0 * ma * mb + kSsimC1, 2.0 * cov + kSsimC2, ma * ma + mb * mb + kSsimC1, var_a + var_b + kSsimC2};
}

}  // namespace

RealGrid ssim_channel(const RealGrid& a, const RealGrid& b) {
    const SsimStats s = ssim_stats(a, b);
    RealGrid out(a.height(), a.width());
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = ssim_parts(s, p).value();
    return out;
}

double recon_term(const ImageField& target, const ImageField& source, const RealGrid& disp, double sign,
                  double ssim_alpha, RealGrid* grad, double weight) {
    const int h = target.height();
    const int w = target.width();
    const int channels = target.channels();
    const ImageField rec = warp_rows(source, disp, sign);
    const double norm = 1.0 / (static_cast<double>(target.pixel_count()) * channels);

    double value = 0.0;
    for (int k = 0; k < channels; ++k) {
        const RealGrid a = target.plane(k);
        const RealGrid b = rec.plane(k);
        const SsimStats s = ssim_stats(a, b);

        RealGrid g_mu(h, w), g_bb(h, w), g_ab(h, w), g_b(h, w);
        for (std::size_t p = 0; p < a.size(); ++p) {
            const SsimParts q = ssim_parts(s, p);
            const double ssim = q.value();
            const double diff = b[p] - a[p];
            value += norm * (ssim_alpha * 0.5 * (1.0 - ssim) + (1.0 - ssim_alpha) * std::abs(diff));
            if (!grad) continue;

            const double up = -0.5 * ssim_alpha * norm;
            const double denom = q.d1 * q.d2;
            const double ma = s.mu_a[p];
            const double mb = s.mu_b[p];
            const double d_mu = (2.0 * ma * q.n2 - 2.0 * ma * q.n1) / denom -
                                ssim * (2.0 * mb / q.d1 - 2.0 * mb / q.d2);
            g_mu[p] = up * d_mu;
            g_bb[p] = up * (-ssim / q.d2);
            g_ab[p] = up * (2.0 * q.n1 / denom);
            g_b[p] = (1.0 - ssim_alpha) * norm * sign_of(diff);
        }
        if (!grad) continue;

        const RealGrid adj_mu = box3_adjoint(g_mu);
        const RealGrid adj_bb = box3_adjoint(g_bb);
        const RealGrid adj_ab = box3_adjoint(g_ab);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const std::size_t p = static_cast<std::size_t>(r) * static_cast<std::size_t>(w) +
                                      static_cast<std::size_t>(c);
                const double dldb = g_b[p] + adj_mu[p] + 2.0 * b[p] * adj_bb[p] + a[p] * adj_ab[p];
                const LinearTap t = locate(c + sign * disp[p], w);
                if (t.clamped) continue;
                const double slope = source(r, t.col + 1, k) - source(r, t.col, k);
                (*grad)[p] += weight * dldb * sign * slope;
            }
    }
    return value;
}

double smooth_term(const RealGrid& disp, const ImageField& image, RealGrid* grad, double weight) {
    const int h = disp.height();
    const int w = disp.width();
    const int channels = image.channels();
    const double norm = 1.0 / static_cast<double>(disp.pixel_count());

    auto image_step = [&](int r0, int c0, int r1, int c1) {
        double acc = 0.0;
        for (int k = 0; k < channels; ++k) acc += std::abs(image(r1, c1, k) - image(r0, c0, k));
        return acc / channels;
    };

    double value = 0.0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (c + 1 < w) {
                const double dx = disp(r, c + 1) - disp(r, c);
                const double ex = std::exp(-image_step(r, c, r, c + 1));
                value += norm * std::abs(dx) * ex;
                if (grad) {
                    const double g = weight * norm * sign_of(dx) * ex;
                    (*grad)(r, c + 1) += g;
                    (*grad)(r, c) -= g;
                }
            }
            if (r + 1 < h) {
                const double dy = disp(r + 1, c) - disp(r, c);
                const double ey = std::exp(-image_step(r, c, r + 1, c));
                value += norm * std::abs(dy) * ey;
                if (grad) {
                    const double g = weight * norm * sign_of(dy) * ey;
                    (*grad)(r + 1, c) += g;
                    (*grad)(r, c) -= g;
                }
            }
        }
    return value;
}

double lr_term(const RealGrid& d_self, const RealGrid& d_other, double sign, RealGrid* grad_self,
               RealGrid* grad_other, double weight) {
    const int h = d_self.height();
    const int w = d_self.width();
    const double norm = 1.0 / static_cast<double>(d_self.pixel_count());
    const RealGrid projected = warp_rows(d_other, d_self, sign);

    double value = 0.0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const double res = d_self(r, c) - projected(r, c);
            value += norm * std::abs(res);
            if (!grad_self && !grad_other) continue;
            const double g = weight * norm * sign_of(res);
            if (g == 0.0) continue;
            if (w == 1) {
                if (grad_self) (*grad_self)(r, c) += g;
                if (grad_other) (*grad_other)(r, 0) -= g;
                continue;
            }
            const LinearTap t = locate(c + sign * d_self(r, c), w);
            if (grad_self) {
                const double slope = t.clamped ? 0.0 : d_other(r, t.col + 1) - d_other(r, t.col);
                (*grad_self)(r, c) += g * (1.0 - sign * slope);
            }
            if (grad_other) {
                (*grad_other)(r, t.col) -= g * (1.0 - t.frac);
                (*grad_other)(r, t.col + 1) -= g * t.frac;
            }
        }
    return value;
}

double fd_term(const RealGrid& disp, const RealGrid& target, RealGrid* grad, double weight) {
    const double norm = 1.0 / static_cast<double>(disp.pixel_count());
    double value = 0.0;
    for (std::size_t p = 0; p < disp.size(); ++p) {
        const double res = disp[p] - target[p];
        value += norm * std::abs(res);
        if (grad) (*grad)[p] += weight * norm * sign_of(res);
    }
    return value;
}

RealGrid pool_adjoint(const RealGrid& coarse, int fine_height, int fine_width, double factor) {
    RealGrid fine(fine_height, fine_width);
    for (int r = 0; r < coarse.height(); ++r)
        for (int c = 0; c < coarse.width(); ++c) {
            const double v = 0.25 * factor * coarse(r, c);
            for (int dr = 0; dr < 2; ++dr)
                for (int dc = 0; dc < 2; ++dc)
                    fine(std::min(2 * r + dr, fine_height - 1), std::min(2 * c + dc, fine_width - 1)) += v;
        }
    return fine;
}

}  // namespace fdl::detail
