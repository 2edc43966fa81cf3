#pragma once

// Synthetic rectified stereo scenes with exact ground-truth disparity.

#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fdl/core.hpp"

namespace fdl {

struct SurfaceLayer {
    double disparity = 0.0;          // pixels, >= 0
    double texture_amplitude = 0.5;  // 0 gives a flat mid-gray surface
    double texture_cell = 8.0;       // coarsest noise cell, pixels
    double base = 0.5;               // gray level the texture is centred on
};

/// Axis-aligned rectangle in left-view coordinates.
struct SceneRegion {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
    SurfaceLayer surface;
};

struct SceneSpec {
    int width = 256;
    int height = 128;
    SurfaceLayer background;
    std::vector<SceneRegion> regions;  // painted in order, later regions on top
    std::uint64_t seed = 1;
};

enum class RotationDataset { N, R, P, PR };

RotationDataset parse_dataset(std::string_view name);
const char* dataset_name(RotationDataset d);

struct RotationSample {
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
};

inline constexpr double kRotationSigmaDeg = 10.0;

/// Draws pitch and/or roll from N(0, sigma) according to the dataset regime.
RotationSample sample_rotation(RotationDataset dataset, std::mt19937_64& rng, double sigma_deg = kRotationSigmaDeg);

struct RenderedScene {
    StereoPair pair;
    DisparityMap disparity_left;
    DisparityMap disparity_right;
    RotationSample rotation;
};

void validate(const SceneSpec& spec);

/// Paints both views from the same procedural textures: the right view shows
/// each surface shifted left by its disparity. A nonzero rotation then rolls
/// the views about the image centre and stretches rows away from the centre
/// row by tan(pitch), identically for images (bilinear) and disparities
/// (nearest), with edge replication.
RenderedScene render_stereo(const SceneSpec& spec, const RotationSample& rotation = {});

/// Presets: textured_shift, untextured_wall, framed_hole, multi_plane.
SceneSpec fixture(std::string_view name);
std::vector<std::string> fixture_names();

/// Plain-text form: `key = value` lines under [scene], [background] and one
/// [region] block per region.
std::string format_scene(const SceneSpec& spec);
SceneSpec parse_scene(std::string_view text);

}  // namespace fdl
