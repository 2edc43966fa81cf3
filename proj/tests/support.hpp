#pragma once

// Random instances and small helpers shared by the unit tests.

#include <cstdint>
#include <random>

#include "fdl/core.hpp"

namespace fdl::test {

inline ImageField random_image(int h, int w, int channels, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ImageField img(h, w, channels);
    for (double& v : img.data()) v = u(rng);
    return img;
}

inline DisparityMap random_disparity(int h, int w, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    DisparityMap d(h, w);
    for (double& v : d.data()) v = u(rng);
    return d;
}

inline ActiveMask random_mask(int h, int w, double p_active, std::mt19937_64& rng) {
    std::bernoulli_distribution b(p_active);
    ActiveMask m(h, w);
    for (auto& v : m.data()) v = b(rng) ? 1 : 0;
    return m;
}

inline DisparityMap constant_disparity(int h, int w, double v) {
    DisparityMap d(h, w);
    for (double& x : d.data()) x = v;
    return d;
}

template <typename G>
G flip_h(const G& g) {
    G out(g.height(), g.width());
    for (int r = 0; r < g.height(); ++r)
        for (int c = 0; c < g.width(); ++c) out(r, c) = g(r, g.width() - 1 - c);
    return out;
}

inline ImageField flip_h(const ImageField& img) {
    ImageField out(img.height(), img.width(), img.channels());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
            for (int k = 0; k < img.channels(); ++k) out(r, c, k) = img(r, img.width() - 1 - c, k);
    return out;
}

template <typename F>
Errc error_code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return static_cast<Errc>(-1);
}

}  // namespace fdl::test
