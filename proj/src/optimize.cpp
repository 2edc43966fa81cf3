#include "fdl/optimize.hpp"

#include <cmath>
#include <random>

#include "fdl/grad.hpp"

namespace fdl {

void validate(const OptimizerConfig& cfg) {
    if (cfg.steps < 1) throw Error(Errc::OutOfRange, "steps must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw Error(Errc::OutOfRange, "learning rate must be positive");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0))
        throw Error(Errc::OutOfRange, "Adam betas must lie in [0,1)");
    if (!(cfg.epsilon > 0.0)) throw Error(Errc::OutOfRange, "Adam epsilon must be positive");
    if (!(cfg.init_disparity >= 0.0) || !std::isfinite(cfg.init_disparity))
        throw Error(Errc::OutOfRange, "initial disparity must be finite and >= 0");
}

std::pair<DisparityMap, DisparityMap> initial_disparities(int height, int width, const OptimizerConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    auto fill = [&] {
        DisparityMap d(height, width);
        for (double& v : d.data()) v = cfg.init_disparity + kInitJitter * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
        return d;
    };
    DisparityMap left = fill();
    DisparityMap right = fill();
    return {std::move(left), std::move(right)};
}

namespace {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    void step(std::span<double> params, std::span<const double> grad, const OptimizerConfig& cfg, int t) {
        const double c1 = 1.0 - std::pow(cfg.beta1, t);
        const double c2 = 1.0 - std::pow(cfg.beta2, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
            if (params[i] < 0.0) params[i] = 0.0;
        }
    }
};

TraceStep summarise(int step, const LossBreakdown& b) {
    TraceStep t;
    t.step = step;
    for (const ScaleTerms& s : b.scales) {
        t.ir += s.ir_left + s.ir_right;
        t.ds += s.ds_left + s.ds_right;
        t.lr += s.lr_left + s.lr_right;
        t.fd += s.fd_left + s.fd_right;
    }
    t.total = b.total;
    return t;
}

}  // namespace

OptimizeTrace optimize_disparity(const StereoPair& pair, const LossWeights& weights, const OptimizerConfig& cfg) {
    validate(cfg);
    const LossModel model(pair, weights);
    auto [d_left, d_right] = initial_disparities(model.height(), model.width(), cfg);

    OptimizeTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(cfg.steps));
    AdamState adam_left(d_left.size());
    AdamState adam_right(d_right.size());
    for (int step = 1; step <= cfg.steps; ++step) {
        LossBreakdown value;
        const FilledTargets targets = model.filled_targets(d_left, d_right);
        const GradField g = grad_total(model, d_left, d_right, targets, &value);
        if (!std::isfinite(value.total))
            throw Error(Errc::NonFiniteLoss, "loss became non-finite at step " + std::to_string(step));
        trace.steps.push_back(summarise(step, value));
        adam_left.step(d_left.data(), g.d_dleft.data(), cfg, step);
        adam_right.step(d_right.data(), g.d_dright.data(), cfg, step);
    }
    trace.d_left = std::move(d_left);
    trace.d_right = std::move(d_right);
    return trace;
}

RegionMetrics evaluate_run(const OptimizeTrace& trace, const DisparityMap& d_true, const CameraRig& rig,
                           const ActiveMask& mask) {
    if (!trace.d_left.same_shape(d_true) || !mask.same_shape(d_true))
        throw Error(Errc::DimensionMismatch, "final disparity, ground truth and mask must share a grid");
    const RealGrid depth = disp_to_depth(trace.d_left, rig);
    const RealGrid truth = disp_to_depth(d_true, rig);
    ActiveMask inactive(mask.height(), mask.width());
    for (std::size_t p = 0; p < mask.size(); ++p) inactive[p] = mask[p] ? 0 : 1;

    auto region = [&](const ActiveMask* valid) -> std::optional<DepthMetricsReport> {
        if (valid && valid->active_count() == 0) return std::nullopt;
        return depth_metrics(depth, truth, valid);
    };
    return {region(nullptr), region(&mask), region(&inactive)};
}

}  // namespace fdl
