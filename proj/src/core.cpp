#include "fdl/core.hpp"

#include <algorithm>
#include <cmath>

namespace fdl {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::NonFiniteValue: return "NonFiniteValue";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::WrongChannelCount: return "WrongChannelCount";
        case Errc::ImageTooSmall: return "ImageTooSmall";
        case Errc::NoActivePixels: return "NoActivePixels";
        case Errc::IncompleteFill: return "IncompleteFill";
        case Errc::RowOutOfBounds: return "RowOutOfBounds";
        case Errc::NonFiniteLoss: return "NonFiniteLoss";
        case Errc::ZeroGroundTruthDepth: return "ZeroGroundTruthDepth";
        case Errc::EmptyValidSet: return "EmptyValidSet";
        case Errc::CovariateOutOfRange: return "CovariateOutOfRange";
        case Errc::RegionOutOfBounds: return "RegionOutOfBounds";
        case Errc::UnknownFixture: return "UnknownFixture";
        case Errc::MalformedHeader: return "MalformedHeader";
        case Errc::TruncatedData: return "TruncatedData";
        case Errc::UnsupportedChannelCount: return "UnsupportedChannelCount";
        case Errc::UnsupportedMaxval: return "UnsupportedMaxval";
        case Errc::IoFailure: return "IoFailure";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& what, std::optional<std::size_t> index)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what +
                         (index ? " (index " + std::to_string(*index) + ")" : std::string())),
      code_(code),
      index_(index) {}

std::size_t ActiveMask::active_count() const {
    return static_cast<std::size_t>(
        std::count_if(data().begin(), data().end(), [](std::uint8_t v) { return v != 0; }));
}

ImageField::ImageField(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels),
      data_(static_cast<std::size_t>(std::max(height, 0)) * static_cast<std::size_t>(std::max(width, 0)) *
                static_cast<std::size_t>(std::max(channels, 0)),
            fill) {}

ImageField::ImageField(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {}

RealGrid ImageField::plane(int ch) const {
    RealGrid out(height_, width_);
    for (std::size_t p = 0; p < out.size(); ++p)
        out[p] = data_[p * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(ch)];
    return out;
}

namespace {

void check_dims(int height, int width, std::size_t expected, std::size_t actual, const char* what) {
    if (height <= 0 || width <= 0)
        throw Error(Errc::DimensionMismatch, std::string(what) + " has an empty grid");
    if (expected != actual)
        throw Error(Errc::DimensionMismatch,
                    std::string(what) + " holds " + std::to_string(actual) + " values, grid needs " +
                        std::to_string(expected),
                    std::min(expected, actual));
}

}  // namespace

void validate(const ImageField& img) {
    if (img.channels() != 1 && img.channels() != 3)
        throw Error(Errc::WrongChannelCount, "image has " + std::to_string(img.channels()) + " channels");
    check_dims(img.height(), img.width(), img.pixel_count() * static_cast<std::size_t>(img.channels()),
               img.size(), "image");
    const auto data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) throw Error(Errc::NonFiniteValue, "image value is not finite", i);
        if (data[i] < 0.0 || data[i] > 1.0) throw Error(Errc::OutOfRange, "image value outside [0,1]", i);
    }
}

void validate(const DisparityMap& disp) {
    check_dims(disp.height(), disp.width(), disp.pixel_count(), disp.size(), "disparity map");
    for (std::size_t i = 0; i < disp.size(); ++i) {
        if (!std::isfinite(disp[i])) throw Error(Errc::NonFiniteValue, "disparity is not finite", i);
        if (disp[i] < 0.0) throw Error(Errc::OutOfRange, "disparity is negative", i);
    }
}

void validate(const ActiveMask& mask) {
    check_dims(mask.height(), mask.width(), mask.pixel_count(), mask.size(), "mask");
}

void validate(const StereoPair& pair) {
    validate(pair.left);
    validate(pair.right);
    if (!pair.left.same_shape(pair.right))
        throw Error(Errc::DimensionMismatch, "left and right images differ in shape");
}

void validate(const CameraRig& rig) {
    if (!(rig.baseline_m > 0.0) || !(rig.focal_px > 0.0))
        throw Error(Errc::OutOfRange, "baseline and focal length must be positive");
    if (!(rig.depth_min_m >= 0.0) || !(rig.depth_min_m < rig.depth_max_m) || !std::isfinite(rig.depth_max_m))
        throw Error(Errc::OutOfRange, "depth range must satisfy 0 <= min < max");
}

void validate(const LossWeights& w) {
    for (double a : {w.alpha_ap, w.alpha_ds, w.alpha_lr, w.alpha_fd})
        if (!(a >= 0.0) || !std::isfinite(a)) throw Error(Errc::OutOfRange, "loss weights must be finite and >= 0");
    if (!(w.ssim_alpha >= 0.0 && w.ssim_alpha <= 1.0))
        throw Error(Errc::OutOfRange, "ssim_alpha must lie in [0,1]");
}

ImageField to_grayscale(const ImageField& img) {
    if (img.channels() != 3)
        throw Error(Errc::WrongChannelCount, "grayscale conversion needs 3 channels, got " +
                                                 std::to_string(img.channels()));
    ImageField out(img.height(), img.width(), 1);
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            const double y = 0.299 * img(r, c, 0) + 0.587 * img(r, c, 1) + 0.114 * img(r, c, 2);
            out(r, c) = std::clamp(y, 0.0, 1.0);
        }
    return out;
}

ImageField as_gray(const ImageField& img) {
    if (img.channels() == 1) return img;
    return to_grayscale(img);
}

}  // namespace fdl
