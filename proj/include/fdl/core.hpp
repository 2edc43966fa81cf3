#pragma once

// Shared containers, camera parameters and validation.
//
// Grids are row-major. Pixel (row, col) of a single-channel grid lives at
// index row * width + col; multi-channel images interleave channels.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdl {

enum class Errc {
    DimensionMismatch,
    NonFiniteValue,
    OutOfRange,
    WrongChannelCount,
    ImageTooSmall,
    NoActivePixels,
    IncompleteFill,
    RowOutOfBounds,
    NonFiniteLoss,
    ZeroGroundTruthDepth,
    EmptyValidSet,
    CovariateOutOfRange,
    RegionOutOfBounds,
    UnknownFixture,
    MalformedHeader,
    TruncatedData,
    UnsupportedChannelCount,
    UnsupportedMaxval,
    IoFailure,
    InvalidArgument,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, std::optional<std::size_t> index = std::nullopt);

    Errc code() const noexcept { return code_; }
    /// First offending flat index, when the error is about a specific element.
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    Errc code_;
    std::optional<std::size_t> index_;
};

template <typename T>
class Grid {
public:
    using value_type = T;

    Grid() = default;
    Grid(int height, int width, T fill = T{})
        : height_(height), width_(width),
          data_(static_cast<std::size_t>(height < 0 || width < 0 ? 0 : height) *
                    static_cast<std::size_t>(width < 0 ? 0 : width),
                fill) {}
    Grid(int height, int width, std::vector<T> data)
        : height_(height), width_(width), data_(std::move(data)) {}

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    }

    T& operator()(int row, int col) { return data_[index(row, col)]; }
    const T& operator()(int row, int col) const { return data_[index(row, col)]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }
    std::span<const T> row(int r) const {
        return std::span<const T>(data_).subspan(index(r, 0), static_cast<std::size_t>(width_));
    }

    bool same_shape(int height, int width) const noexcept {
        return height_ == height && width_ == width;
    }
    template <typename U>
    bool same_shape(const Grid<U>& other) const noexcept {
        return same_shape(other.height(), other.width());
    }

    friend bool operator==(const Grid& a, const Grid& b) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<T> data_;
};

/// Signed real-valued grid: depth maps, gradient fields, SSIM maps.
using RealGrid = Grid<double>;

/// Non-negative horizontal pixel shifts.
class DisparityMap : public Grid<double> {
public:
    using Grid<double>::Grid;
    DisparityMap() = default;
    explicit DisparityMap(Grid<double> g) : Grid<double>(std::move(g)) {}
};

/// true (1) marks a textured, "active" pixel.
class ActiveMask : public Grid<std::uint8_t> {
public:
    using Grid<std::uint8_t>::Grid;
    ActiveMask() = default;

    bool active(int row, int col) const { return (*this)(row, col) != 0; }
    std::size_t active_count() const;
};

/// H x W x C intensities in [0,1], channels interleaved.
class ImageField {
public:
    ImageField() = default;
    ImageField(int height, int width, int channels, double fill = 0.0);
    ImageField(int height, int width, int channels, std::vector<double> data);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    }

    double& operator()(int row, int col, int ch = 0) { return data_[index(row, col, ch)]; }
    double operator()(int row, int col, int ch = 0) const { return data_[index(row, col, ch)]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    template <typename U>
    bool same_grid(const Grid<U>& g) const noexcept {
        return g.height() == height_ && g.width() == width_;
    }
    bool same_shape(const ImageField& o) const noexcept {
        return o.height_ == height_ && o.width_ == width_ && o.channels_ == channels_;
    }

    /// Single channel `ch` as a grid.
    RealGrid plane(int ch) const;

    friend bool operator==(const ImageField& a, const ImageField& b) = default;

private:
    std::size_t index(int row, int col, int ch) const noexcept {
        return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(col)) *
                   static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(ch);
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 1;
    std::vector<double> data_;
};

struct StereoPair {
    ImageField left;
    ImageField right;
};

struct CameraRig {
    double baseline_m = 0.2;
    double focal_px = 100.0;
    double depth_min_m = 0.0;
    double depth_max_m = 80.0;
};

struct LossWeights {
    double alpha_ap = 1.0;
    double alpha_ds = 0.1;
    double alpha_lr = 1.0;
    double alpha_fd = 0.5;
    double ssim_alpha = 0.85;
};

// Each validate() throws fdl::Error on the first violated invariant and
// returns normally otherwise.
void validate(const ImageField& img);
void validate(const DisparityMap& disp);
void validate(const ActiveMask& mask);
void validate(const StereoPair& pair);
void validate(const CameraRig& rig);
void validate(const LossWeights& w);

/// Rec. 601 luma of a 3-channel image.
ImageField to_grayscale(const ImageField& img);

/// Luma for 3-channel input, a copy for single-channel input.
ImageField as_gray(const ImageField& img);

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace fdl
