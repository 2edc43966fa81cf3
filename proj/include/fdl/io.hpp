#pragma once

// File formats: PFM for float maps, binary PGM/PPM for images, CSV reports.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fdl/core.hpp"
#include "fdl/losses.hpp"
#include "fdl/metrics.hpp"
#include "fdl/optimize.hpp"

namespace fdl {

namespace fs = std::filesystem;

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
void write_file_atomic(const fs::path& path, std::string_view bytes);
std::string read_file(const fs::path& path);

// PFM stores 32-bit floats, so values are rounded to float on encode. Any
// field decoded from a PFM re-encodes to the same bytes.
std::string encode_pfm(const ImageField& field);
std::string encode_pfm(const RealGrid& grid);
ImageField decode_pfm(std::string_view bytes);

void write_pfm(const ImageField& field, const fs::path& path);
void write_pfm(const RealGrid& grid, const fs::path& path);
ImageField read_pfm(const fs::path& path);
/// Single-channel PFM as a validated disparity map.
DisparityMap read_disparity(const fs::path& path);

// P5 (1 channel) or P6 (3 channels) with maxval 255. Samples map to v / 255 on
// read and floor(v * 255 + 0.5) on write, after clamping to [0,1].
std::string encode_pnm(const ImageField& img);
ImageField decode_pnm(std::string_view bytes);

void write_pnm(const ImageField& img, const fs::path& path);
ImageField read_pnm(const fs::path& path);
/// Active pixels as 255, inactive as 0.
void write_mask(const ActiveMask& mask, const fs::path& path);

/// Picks the reader from the extension: .pfm, otherwise PGM/PPM.
ImageField read_image(const fs::path& path);

/// Reals formatted with 17 significant digits.
std::string format_real(double v);

// CSV layouts
//   LossBreakdown:     scale,ir_left,ir_right,ds_left,ds_right,lr_left,lr_right,fd_left,fd_right,total
//                      one row per scale (total = weighted scale sum) plus a final "all" row
//   DepthMetricsReport: abs_rel,sq_rel,rmse,rmse_log,delta_1,delta_2,delta_3,pixel_count
//   RegionMetrics:     region,<metrics columns>; regions without pixels are omitted
//   BinnedReport:      covariate,lower,upper,samples,<pooled metrics>,mean_<metric>...,abs_rel_p25,p50,p75
//   OptimizeTrace:     step,ir,ds,lr,fd,total
std::string format_csv(const LossBreakdown& b, const LossWeights& w);
std::string format_csv(const DepthMetricsReport& r);
std::string format_csv(const RegionMetrics& r);
std::string format_csv(const BinnedReport& r);
std::string format_csv(const OptimizeTrace& t);

template <typename... Args>
void write_csv(const fs::path& path, const Args&... report) {
    write_file_atomic(path, format_csv(report...));
}

/// Comma-separated table with a header row; no quoting.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name` in the header, or throws InvalidArgument.
    std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const fs::path& path);

}  // namespace fdl
