#include "fdl/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace fdl {

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::IoFailure, "cannot open '" + tmp.string() + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw Error(Errc::IoFailure, "failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(Errc::IoFailure, "cannot move output into place at '" + path.string() + "'");
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoFailure, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

// Cursor over a binary header: whitespace-separated tokens, optional comments.
class HeaderReader {
public:
    HeaderReader(std::string_view bytes, bool comments) : bytes_(bytes), comments_(comments) {}

    std::string token(const char* what) {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && !is_space(bytes_[pos_])) ++pos_;
        if (pos_ == start) throw Error(Errc::MalformedHeader, std::string("missing ") + what);
        return std::string(bytes_.substr(start, pos_ - start));
    }

    long long integer(const char* what) {
        const std::string t = token(what);
        if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
            t.size() > 9)
            throw Error(Errc::MalformedHeader, std::string("bad ") + what + " '" + t + "'");
        return std::stoll(t);
    }

    // Exactly one whitespace byte separates the header from the payload.
    std::size_t payload_start() {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
            throw Error(Errc::MalformedHeader, "header must end with a single whitespace byte");
        return pos_ + 1;
    }

private:
    static bool is_space(char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; }

    void skip_space() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (comments_ && bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    bool comments_;
    std::size_t pos_ = 0;
};

std::uint32_t byteswap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

void check_dims(long long h, long long w) {
    if (h < 1 || w < 1) throw Error(Errc::MalformedHeader, "image dimensions must be positive");
}

std::string pfm_bytes(int height, int width, int channels, std::span<const double> data) {
    std::string out = std::string(channels == 3 ? "PF" : "Pf") + "\n" + std::to_string(width) + " " +
                      std::to_string(height) + "\n-1.0\n";
    const std::size_t header = out.size();
    const std::size_t row_values = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
    out.resize(header + 4 * data.size());
    char* dst = out.data() + header;
    for (int r = height - 1; r >= 0; --r) {
        for (std::size_t k = 0; k < row_values; ++k) {
            std::uint32_t bits = std::bit_cast<std::uint32_t>(
                static_cast<float>(data[static_cast<std::size_t>(r) * row_values + k]));
            if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
            std::memcpy(dst, &bits, 4);
            dst += 4;
        }
    }
    return out;
}

}  // namespace

std::string encode_pfm(const ImageField& field) {
    if (field.channels() != 1 && field.channels() != 3)
        throw Error(Errc::UnsupportedChannelCount, "PFM holds 1 or 3 channels, got " + std::to_string(field.channels()));
    return pfm_bytes(field.height(), field.width(), field.channels(), field.data());
}

std::string encode_pfm(const RealGrid& grid) {
    return pfm_bytes(grid.height(), grid.width(), 1, grid.data());
}

ImageField decode_pfm(std::string_view bytes) {
    HeaderReader header(bytes, false);
    const std::string magic = header.token("PFM magic");
    int channels = 0;
    if (magic == "Pf") channels = 1;
    else if (magic == "PF") channels = 3;
    else throw Error(Errc::MalformedHeader, "not a PFM file (magic '" + magic + "')");
    const long long w = header.integer("width");
    const long long h = header.integer("height");
    check_dims(h, w);
    const std::string scale_text = header.token("scale");
    double scale = 0.0;
    try {
        std::size_t used = 0;
        scale = std::stod(scale_text, &used);
        if (used != scale_text.size()) throw std::invalid_argument(scale_text);
    } catch (const std::exception&) {
        throw Error(Errc::MalformedHeader, "bad PFM scale '" + scale_text + "'");
    }
    if (scale == 0.0 || !std::isfinite(scale)) throw Error(Errc::MalformedHeader, "PFM scale must be nonzero");
    const bool little = scale < 0.0;
    const std::size_t start = header.payload_start();

    const std::size_t row_values = static_cast<std::size_t>(w) * static_cast<std::size_t>(channels);
    const std::size_t count = row_values * static_cast<std::size_t>(h);
    if (bytes.size() - start < 4 * count)
        throw Error(Errc::TruncatedData, "PFM payload holds " + std::to_string(bytes.size() - start) +
                                             " bytes, expected " + std::to_string(4 * count));
    const bool swap = little != (std::endian::native == std::endian::little);
    ImageField out(static_cast<int>(h), static_cast<int>(w), channels);
    const char* src = bytes.data() + start;
    for (long long r = h - 1; r >= 0; --r) {
        for (std::size_t k = 0; k < row_values; ++k) {
            std::uint32_t bits = 0;
            std::memcpy(&bits, src, 4);
            src += 4;
            if (swap) bits = byteswap32(bits);
            out.data()[static_cast<std::size_t>(r) * row_values + k] = std::bit_cast<float>(bits);
        }
    }
    return out;
}

void write_pfm(const ImageField& field, const fs::path& path) { write_file_atomic(path, encode_pfm(field)); }
void write_pfm(const RealGrid& grid, const fs::path& path) { write_file_atomic(path, encode_pfm(grid)); }
ImageField read_pfm(const fs::path& path) { return decode_pfm(read_file(path)); }

DisparityMap read_disparity(const fs::path& path) {
    const ImageField f = read_pfm(path);
    if (f.channels() != 1)
        throw Error(Errc::WrongChannelCount, "disparity PFM '" + path.string() + "' must have one channel");
    DisparityMap d(f.height(), f.width());
    std::copy(f.data().begin(), f.data().end(), d.data().begin());
    validate(d);
    return d;
}

std::string encode_pnm(const ImageField& img) {
    if (img.channels() != 1 && img.channels() != 3)
        throw Error(Errc::UnsupportedChannelCount, "PGM/PPM holds 1 or 3 channels, got " + std::to_string(img.channels()));
    std::string out = std::string(img.channels() == 3 ? "P6" : "P5") + "\n" + std::to_string(img.width()) + " " +
                      std::to_string(img.height()) + "\n255\n";
    out.reserve(out.size() + img.size());
    for (double v : img.data()) {
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteValue, "cannot quantise a non-finite sample");
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5))));
    }
    return out;
}

ImageField decode_pnm(std::string_view bytes) {
    HeaderReader header(bytes, true);
    const std::string magic = header.token("PNM magic");
    int channels = 0;
    if (magic == "P5") channels = 1;
    else if (magic == "P6") channels = 3;
    else throw Error(Errc::MalformedHeader, "not a binary PGM/PPM file (magic '" + magic + "')");
    const long long w = header.integer("width");
    const long long h = header.integer("height");
    check_dims(h, w);
    const long long maxval = header.integer("maxval");
    if (maxval != 255) throw Error(Errc::UnsupportedMaxval, "maxval " + std::to_string(maxval) + " (only 255 is supported)");
    const std::size_t start = header.payload_start();
    ImageField out(static_cast<int>(h), static_cast<int>(w), channels);
    if (bytes.size() - start < out.size())
        throw Error(Errc::TruncatedData, "PGM/PPM payload holds " + std::to_string(bytes.size() - start) +
                                             " bytes, expected " + std::to_string(out.size()));
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<double>(static_cast<unsigned char>(bytes[start + i])) / 255.0;
    return out;
}

void write_pnm(const ImageField& img, const fs::path& path) { write_file_atomic(path, encode_pnm(img)); }
ImageField read_pnm(const fs::path& path) { return decode_pnm(read_file(path)); }

void write_mask(const ActiveMask& mask, const fs::path& path) {
    ImageField img(mask.height(), mask.width(), 1);
    for (std::size_t p = 0; p < mask.size(); ++p) img.data()[p] = mask[p] ? 1.0 : 0.0;
    write_pnm(img, path);
}

ImageField read_image(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".pfm" ? read_pfm(path) : read_pnm(path);
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

constexpr const char* kMetricColumns = "abs_rel,sq_rel,rmse,rmse_log,delta_1,delta_2,delta_3,pixel_count";

std::string metric_fields(const DepthMetricsReport& r) {
    return format_real(r.abs_rel) + "," + format_real(r.sq_rel) + "," + format_real(r.rmse) + "," +
           format_real(r.rmse_log) + "," + format_real(r.delta_1) + "," + format_real(r.delta_2) + "," +
           format_real(r.delta_3) + "," + std::to_string(r.pixel_count);
}

std::string term_fields(const ScaleTerms& t) {
    return format_real(t.ir_left) + "," + format_real(t.ir_right) + "," + format_real(t.ds_left) + "," +
           format_real(t.ds_right) + "," + format_real(t.lr_left) + "," + format_real(t.lr_right) + "," +
           format_real(t.fd_left) + "," + format_real(t.fd_right);
}

}  // namespace

std::string format_csv(const LossBreakdown& b, const LossWeights& w) {
    std::string out = "scale,ir_left,ir_right,ds_left,ds_right,lr_left,lr_right,fd_left,fd_right,total\n";
    ScaleTerms sum;
    for (std::size_t s = 0; s < b.scales.size(); ++s) {
        const ScaleTerms& t = b.scales[s];
        out += std::to_string(s) + "," + term_fields(t) + "," + format_real(t.weighted(w)) + "\n";
        sum.ir_left += t.ir_left;
        sum.ir_right += t.ir_right;
        sum.ds_left += t.ds_left;
        sum.ds_right += t.ds_right;
        sum.lr_left += t.lr_left;
        sum.lr_right += t.lr_right;
        sum.fd_left += t.fd_left;
        sum.fd_right += t.fd_right;
    }
    out += "all," + term_fields(sum) + "," + format_real(b.total) + "\n";
    return out;
}

std::string format_csv(const DepthMetricsReport& r) {
    return std::string(kMetricColumns) + "\n" + metric_fields(r) + "\n";
}

std::string format_csv(const RegionMetrics& r) {
    std::string out = std::string("region,") + kMetricColumns + "\n";
    auto row = [&](const char* name, const std::optional<DepthMetricsReport>& m) {
        if (m) out += std::string(name) + "," + metric_fields(*m) + "\n";
    };
    row("all", r.all);
    row("active", r.active);
    row("inactive", r.inactive);
    return out;
}

std::string format_csv(const BinnedReport& r) {
    std::string out = "covariate,lower,upper,samples," + std::string(kMetricColumns) +
                      ",mean_abs_rel,mean_sq_rel,mean_rmse,mean_rmse_log,mean_delta_1,mean_delta_2,mean_delta_3,"
                      "abs_rel_p25,abs_rel_p50,abs_rel_p75\n";
    for (const BinRow& b : r.bins) {
        out += r.covariate + "," + format_real(b.lower) + "," + format_real(b.upper) + "," + std::to_string(b.samples);
        if (b.pooled && b.per_sample_mean) {
            const DepthMetricsReport& m = *b.per_sample_mean;
            out += "," + metric_fields(*b.pooled) + "," + format_real(m.abs_rel) + "," + format_real(m.sq_rel) + "," +
                   format_real(m.rmse) + "," + format_real(m.rmse_log) + "," + format_real(m.delta_1) + "," +
                   format_real(m.delta_2) + "," + format_real(m.delta_3) + "," + format_real(b.abs_rel_p25) + "," +
                   format_real(b.abs_rel_p50) + "," + format_real(b.abs_rel_p75);
        } else {
            out += std::string(18, ',');  // empty bin: metric cells left blank
        }
        out += "\n";
    }
    return out;
}

std::string format_csv(const OptimizeTrace& t) {
    std::string out = "step,ir,ds,lr,fd,total\n";
    for (const TraceStep& s : t.steps)
        out += std::to_string(s.step) + "," + format_real(s.ir) + "," + format_real(s.ds) + "," + format_real(s.lr) +
               "," + format_real(s.fd) + "," + format_real(s.total) + "\n";
    return out;
}

std::size_t CsvTable::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(Errc::InvalidArgument, "CSV has no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split_row(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
        cells.emplace_back(cell);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        std::vector<std::string> cells = split_row(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
        } else {
            if (cells.size() != table.header.size())
                throw Error(Errc::MalformedHeader, "CSV line " + std::to_string(line_no) + " has " +
                                                       std::to_string(cells.size()) + " cells, expected " +
                                                       std::to_string(table.header.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.header.empty()) throw Error(Errc::MalformedHeader, "CSV has no header row");
    return table;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_file(path)); }

}  // namespace fdl
