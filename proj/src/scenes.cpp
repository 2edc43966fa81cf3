#include "fdl/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fdl {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finaliser
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double lattice_value(std::uint64_t key, std::int64_t row, std::int64_t col) {
    std::uint64_t h = mix64(key ^ mix64(static_cast<std::uint64_t>(row) * 0x632be59bd9b4e019ULL));
    h = mix64(h ^ static_cast<std::uint64_t>(col));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double value_noise(std::uint64_t key, double y, double x, double cell) {
    const double fy = y / cell;
    const double fx = x / cell;
    const double y0 = std::floor(fy);
    const double x0 = std::floor(fx);
    const double ty = fy - y0;
    const double tx = fx - x0;
    const auto r = static_cast<std::int64_t>(y0);
    const auto c = static_cast<std::int64_t>(x0);
    const double top = (1 - tx) * lattice_value(key, r, c) + tx * lattice_value(key, r, c + 1);
    const double bottom = (1 - tx) * lattice_value(key, r + 1, c) + tx * lattice_value(key, r + 1, c + 1);
    return (1 - ty) * top + ty * bottom;
}

// Three octaves of value noise around the base gray; amplitude a spans [base - a/2, base + a/2].
double surface_value(const SurfaceLayer& s, std::uint64_t key, double y, double x) {
    if (s.texture_amplitude == 0.0) return s.base;
    double acc = 0.0;
    double norm = 0.0;
    double cell = s.texture_cell;
    double amp = 1.0;
    for (std::uint64_t octave = 0; octave < 3; ++octave) {
        acc += amp * value_noise(mix64(key + octave), y, x, std::max(cell, 1.0));
        norm += amp;
        cell *= 0.5;
        amp *= 0.5;
    }
    return s.base + s.texture_amplitude * (acc / norm - 0.5);
}

struct Layer {
    int x0, y0, x1, y1;  // left-view rectangle, half-open
    SurfaceLayer surface;
    std::uint64_t key;
};

std::vector<Layer> layers_of(const SceneSpec& spec) {
    std::vector<Layer> layers;
    layers.push_back({std::numeric_limits<int>::min() / 2, 0, std::numeric_limits<int>::max() / 2, spec.height,
                      spec.background, mix64(spec.seed)});
    for (std::size_t i = 0; i < spec.regions.size(); ++i) {
        const SceneRegion& r = spec.regions[i];
        layers.push_back({r.x, r.y, r.x + r.width, r.y + r.height, r.surface, mix64(spec.seed + 0x1000 * (i + 1))});
    }
    return layers;
}

// Topmost layer covering (row, col) when every layer is shifted by `direction * disparity`.
const Layer& top_layer(const std::vector<Layer>& layers, int row, double col, double direction) {
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
        const double shift = direction * it->surface.disparity;
        if (row >= it->y0 && row < it->y1 && col >= it->x0 + shift && col < it->x1 + shift) return *it;
    }
    return layers.front();
}

double bilinear(const ImageField& img, double y, double x, int ch) {
    y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
    x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
    const int r0 = static_cast<int>(std::floor(y));
    const int c0 = static_cast<int>(std::floor(x));
    const int r1 = std::min(r0 + 1, img.height() - 1);
    const int c1 = std::min(c0 + 1, img.width() - 1);
    const double ty = y - r0;
    const double tx = x - c0;
    const double top = (1 - tx) * img(r0, c0, ch) + tx * img(r0, c1, ch);
    const double bottom = (1 - tx) * img(r1, c0, ch) + tx * img(r1, c1, ch);
    return std::clamp((1 - ty) * top + ty * bottom, 0.0, 1.0);
}

struct SourceMap {
    double cy, cx, cos_r, sin_r, stretch;
    void source(int row, int col, double& y, double& x) const {
        const double v = row - cy;
        const double u = col - cx;
        const double ru = cos_r * u + sin_r * v;
        const double rv = -sin_r * u + cos_r * v;
        x = cx + ru;
        y = cy + rv + stretch * rv;
    }
};

ImageField resample(const ImageField& img, const SourceMap& map) {
    ImageField out(img.height(), img.width(), img.channels());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            double y, x;
            map.source(r, c, y, x);
            for (int k = 0; k < img.channels(); ++k) out(r, c, k) = bilinear(img, y, x, k);
        }
    return out;
}

DisparityMap resample(const DisparityMap& disp, const SourceMap& map) {
    DisparityMap out(disp.height(), disp.width());
    for (int r = 0; r < disp.height(); ++r)
        for (int c = 0; c < disp.width(); ++c) {
            double y, x;
            map.source(r, c, y, x);
            out(r, c) = disp(clamp_index(static_cast<int>(std::lround(y)), disp.height()),
                             clamp_index(static_cast<int>(std::lround(x)), disp.width()));
        }
    return out;
}

void validate_surface(const SurfaceLayer& s, const std::string& what) {
    if (!(s.disparity >= 0.0) || !std::isfinite(s.disparity))
        throw Error(Errc::OutOfRange, what + " disparity must be finite and >= 0");
    if (!(s.texture_amplitude >= 0.0 && s.texture_amplitude <= 1.0))
        throw Error(Errc::OutOfRange, what + " texture amplitude must lie in [0,1]");
    if (!(s.texture_cell > 0.0) || !std::isfinite(s.texture_cell))
        throw Error(Errc::OutOfRange, what + " texture cell must be positive");
    if (!(s.base - 0.5 * s.texture_amplitude >= 0.0 && s.base + 0.5 * s.texture_amplitude <= 1.0))
        throw Error(Errc::OutOfRange, what + " base gray +- amplitude/2 must stay within [0,1]");
}

}  // namespace

RotationDataset parse_dataset(std::string_view name) {
    if (name == "N") return RotationDataset::N;
    if (name == "R") return RotationDataset::R;
    if (name == "P") return RotationDataset::P;
    if (name == "PR") return RotationDataset::PR;
    throw Error(Errc::InvalidArgument, "unknown dataset '" + std::string(name) + "' (expected N, R, P or PR)");
}

const char* dataset_name(RotationDataset d) {
    switch (d) {
        case RotationDataset::N: return "N";
        case RotationDataset::R: return "R";
        case RotationDataset::P: return "P";
        case RotationDataset::PR: return "PR";
    }
    return "?";
}

RotationSample sample_rotation(RotationDataset dataset, std::mt19937_64& rng, double sigma_deg) {
    if (!(sigma_deg >= 0.0)) throw Error(Errc::OutOfRange, "rotation sigma must be >= 0");
    auto draw = [&] {
        if (sigma_deg == 0.0) return 0.0;
        std::normal_distribution<double> normal(0.0, sigma_deg);
        return normal(rng);
    };
    RotationSample s;
    switch (dataset) {
        case RotationDataset::N: break;
        case RotationDataset::R: s.roll_deg = draw(); break;
        case RotationDataset::P: s.pitch_deg = draw(); break;
        case RotationDataset::PR:
            s.pitch_deg = draw();
            s.roll_deg = draw();
            break;
    }
    return s;
}

void validate(const SceneSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0) throw Error(Errc::DimensionMismatch, "scene must have a positive size");
    validate_surface(spec.background, "background");
    for (std::size_t i = 0; i < spec.regions.size(); ++i) {
        const SceneRegion& r = spec.regions[i];
        if (r.width <= 0 || r.height <= 0 || r.x < 0 || r.y < 0 || r.x + r.width > spec.width ||
            r.y + r.height > spec.height)
            throw Error(Errc::RegionOutOfBounds, "region " + std::to_string(i) + " does not lie within the image", i);
        validate_surface(r.surface, "region " + std::to_string(i));
    }
}

RenderedScene render_stereo(const SceneSpec& spec, const RotationSample& rotation) {
    validate(spec);
    if (!std::isfinite(rotation.pitch_deg) || !std::isfinite(rotation.roll_deg))
        throw Error(Errc::NonFiniteValue, "rotation angles must be finite");
    const std::vector<Layer> layers = layers_of(spec);

    RenderedScene out;
    out.rotation = rotation;
    out.pair.left = ImageField(spec.height, spec.width, 1);
    out.pair.right = ImageField(spec.height, spec.width, 1);
    out.disparity_left = DisparityMap(spec.height, spec.width);
    out.disparity_right = DisparityMap(spec.height, spec.width);
    for (int r = 0; r < spec.height; ++r)
        for (int c = 0; c < spec.width; ++c) {
            const Layer& l = top_layer(layers, r, c, 0.0);
            out.pair.left(r, c) = surface_value(l.surface, l.key, r, c);
            out.disparity_left(r, c) = l.surface.disparity;

            const Layer& rl = top_layer(layers, r, c, -1.0);
            out.pair.right(r, c) = surface_value(rl.surface, rl.key, r, c + rl.surface.disparity);
            out.disparity_right(r, c) = rl.surface.disparity;
        }

    if (rotation.pitch_deg == 0.0 && rotation.roll_deg == 0.0) return out;

    const double roll = rotation.roll_deg * std::numbers::pi / 180.0;
    const SourceMap map{(spec.height - 1) * 0.5, (spec.width - 1) * 0.5, std::cos(roll), std::sin(roll),
                        std::tan(rotation.pitch_deg * std::numbers::pi / 180.0)};
    out.pair.left = resample(out.pair.left, map);
    out.pair.right = resample(out.pair.right, map);
    out.disparity_left = resample(out.disparity_left, map);
    out.disparity_right = resample(out.disparity_right, map);
    return out;
}

SceneSpec fixture(std::string_view name) {
    SceneSpec s;
    s.background = {2.0, 0.5, 8.0};
    if (name == "textured_shift") {
        s.background.disparity = 4.0;
    } else if (name == "untextured_wall") {
        s.regions.push_back({48, 0, 160, 128, {6.0, 0.0, 8.0, 0.85}});
    } else if (name == "framed_hole") {
        s.background.disparity = 5.0;
        s.regions.push_back({48, 24, 160, 80, {5.0, 0.0, 8.0}});
    } else if (name == "multi_plane") {
        s.regions.push_back({0, 43, 256, 43, {4.0, 0.25, 12.0}});
        s.regions.push_back({0, 86, 256, 42, {8.0, 0.0, 8.0}});
    } else {
        throw Error(Errc::UnknownFixture, "unknown fixture '" + std::string(name) + "'");
    }
    return s;
}

std::vector<std::string> fixture_names() {
    return {"textured_shift", "untextured_wall", "framed_hole", "multi_plane"};
}

namespace {

void put_surface(std::ostringstream& os, const SurfaceLayer& s) {
    os << "disparity = " << s.disparity << "\n"
       << "amplitude = " << s.texture_amplitude << "\n"
       << "cell = " << s.texture_cell << "\n"
       << "base = " << s.base << "\n";
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_number(const std::string& key, const std::string& value, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error(Errc::MalformedHeader, "line " + std::to_string(line) + ": bad value for '" + key + "'");
    }
}

}  // namespace

std::string format_scene(const SceneSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    os << "[scene]\nwidth = " << spec.width << "\nheight = " << spec.height << "\nseed = " << spec.seed << "\n";
    os << "\n[background]\n";
    put_surface(os, spec.background);
    for (const SceneRegion& r : spec.regions) {
        os << "\n[region]\nx = " << r.x << "\ny = " << r.y << "\nwidth = " << r.width << "\nheight = " << r.height
           << "\n";
        put_surface(os, r.surface);
    }
    return os.str();
}

SceneSpec parse_scene(std::string_view text) {
    SceneSpec spec;
    spec.background = {};
    enum class Section { None, Scene, Background, Region } section = Section::None;
    std::istringstream is{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line == "[scene]") {
            section = Section::Scene;
            continue;
        }
        if (line == "[background]") {
            section = Section::Background;
            continue;
        }
        if (line == "[region]") {
            section = Section::Region;
            spec.regions.emplace_back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || section == Section::None)
            throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const double v = to_number(key, value, line_no);

        auto set_surface = [&](SurfaceLayer& s) {
            if (key == "disparity") s.disparity = v;
            else if (key == "amplitude") s.texture_amplitude = v;
            else if (key == "cell") s.texture_cell = v;
            else if (key == "base") s.base = v;
            else return false;
            return true;
        };
        bool known = false;
        switch (section) {
            case Section::Scene:
                known = true;
                if (key == "width") spec.width = static_cast<int>(v);
                else if (key == "height") spec.height = static_cast<int>(v);
                else if (key == "seed") spec.seed = std::stoull(value);
                else known = false;
                break;
            case Section::Background: known = set_surface(spec.background); break;
            case Section::Region: {
                SceneRegion& r = spec.regions.back();
                known = true;
                if (key == "x") r.x = static_cast<int>(v);
                else if (key == "y") r.y = static_cast<int>(v);
                else if (key == "width") r.width = static_cast<int>(v);
                else if (key == "height") r.height = static_cast<int>(v);
                else known = set_surface(r.surface);
                break;
            }
            case Section::None: break;
        }
        if (!known) throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    validate(spec);
    return spec;
}

}  // namespace fdl
