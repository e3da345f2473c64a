#include "fpmod/imgio.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>

#include "fpmod/features.hpp"

namespace fpmod {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("input: unreadable");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw InputError("input: unreadable");
    }
    return bytes;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) {
        throw std::runtime_error("output: cannot open " + path.string());
    }
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

double parse_double(std::string_view s) {
    if (s == "nan") {
        return ScalarField::kInvalid;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InputError("input: malformed number '" + std::string(s) + "'");
    }
    return v;
}

long parse_int(std::string_view s) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InputError("input: malformed integer '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

bool is_png(std::span<const std::uint8_t> bytes) {
    static constexpr std::array<std::uint8_t, 8> kSig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return bytes.size() >= kSig.size() && std::equal(kSig.begin(), kSig.end(), bytes.begin());
}

GrayImage decode_png_gray(std::span<const std::uint8_t> bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw InputError("input: unsupported format");
    }
    if (image.format != PNG_FORMAT_GRAY || (image.flags & PNG_IMAGE_FLAG_16BIT_sRGB) != 0) {
        png_image_free(&image);
        throw InputError("input: unsupported format (PNG must be 8-bit grayscale)");
    }
    std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
        png_image_free(&image);
        throw InputError("input: corrupt PNG");
    }
    std::vector<double> px(raw.size());
    std::transform(raw.begin(), raw.end(), px.begin(), [](std::uint8_t v) { return v / 255.0; });
    return GrayImage(static_cast<int>(image.width), static_cast<int>(image.height), std::move(px));
}

void write_png_raw(const std::filesystem::path& path, int width, int height, std::uint32_t format,
                   const void* data) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = format;
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (fp == nullptr) {
        throw std::runtime_error("output: cannot open " + path.string());
    }
    const int ok = png_image_write_to_stdio(&image, fp, 0, data, 0, nullptr);
    const bool closed = std::fclose(fp) == 0;
    if (!ok || !closed) {
        throw std::runtime_error("output: PNG write failed for " + path.string());
    }
}

}  // namespace

GrayImage::GrayImage(int w, int h, std::vector<double> px) : width(w), height(h), pixels(std::move(px)) {
    if (w <= 0 || h <= 0) {
        throw InputError("input: zero dimensions");
    }
    if (pixels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
        throw InputError("input: pixel count does not match dimensions");
    }
    for (double v : pixels) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InputError("input: luminance outside [0,1]");
        }
    }
}

ScalarField::ScalarField(int w, int h)
    : width(w),
      height(h),
      values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), kInvalid),
      valid(values.size(), 0) {
    if (w <= 0 || h <= 0) {
        throw InputError("input: zero dimensions");
    }
}

void ScalarField::set(int x, int y, double v) {
    values[index(x, y)] = v;
    valid[index(x, y)] = 1;
}

void ScalarField::invalidate(int x, int y) {
    values[index(x, y)] = kInvalid;
    valid[index(x, y)] = 0;
}

std::size_t ScalarField::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

bool operator==(const ScalarField& a, const ScalarField& b) {
    if (a.width != b.width || a.height != b.height || a.valid != b.valid) {
        return false;
    }
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.valid[i] && std::memcmp(&a.values[i], &b.values[i], sizeof(double)) != 0) {
            return false;
        }
    }
    return true;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    auto skip_space_and_comments = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_number = [&]() -> long {
        skip_space_and_comments();
        long v = 0;
        std::size_t digits = 0;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
            v = v * 10 + (bytes[pos] - '0');
            ++pos;
            if (++digits > 9) {
                throw InputError("input: PGM header value too large");
            }
        }
        if (digits == 0) {
            throw InputError("input: malformed PGM header");
        }
        return v;
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw InputError("input: unsupported format");
    }
    pos = 2;
    const long w = read_number();
    const long h = read_number();
    const long maxval = read_number();
    if (w <= 0 || h <= 0) {
        throw InputError("input: zero dimensions");
    }
    if (maxval <= 0 || maxval > 255) {
        throw InputError("input: unsupported format (PGM maxval must be in 1..255)");
    }
    // exactly one whitespace byte separates the header from the raster
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw InputError("input: malformed PGM header");
    }
    ++pos;
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (bytes.size() - pos < n) {
        throw InputError("input: truncated PGM raster");
    }
    std::vector<double> px(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long v = bytes[pos + i];
        if (v > maxval) {
            throw InputError("input: PGM sample exceeds maxval");
        }
        px[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

GrayImage load_gray(const std::filesystem::path& path) {
    const auto bytes = read_bytes(path);
    if (is_png(bytes)) {
        return decode_png_gray(bytes);
    }
    return decode_pgm(bytes);
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
    auto out = open_out(path, true);
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    std::vector<char> raw(image.pixels.size());
    std::transform(image.pixels.begin(), image.pixels.end(), raw.begin(), [](double v) {
        return static_cast<char>(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    });
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!out) {
        throw std::runtime_error("output: write failed for " + path.string());
    }
}

void write_scalar_field(const ScalarField& field, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "width,height\n" << field.width << ',' << field.height << "\nx,y,value,valid\n";
    std::string row;
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            const bool ok = field.is_valid(x, y);
            row.clear();
            row += std::to_string(x);
            row += ',';
            row += std::to_string(y);
            row += ',';
            row += ok ? format_double(field.at(x, y)) : "nan";
            row += ok ? ",1\n" : ",0\n";
            out << row;
        }
    }
    if (!out) {
        throw std::runtime_error("output: write failed for " + path.string());
    }
}

ScalarField read_scalar_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("input: unreadable");
    }
    std::string line;
    if (!std::getline(in, line) || line != "width,height") {
        throw InputError("input: scalar field CSV lacks width,height header");
    }
    std::getline(in, line);
    const auto dims = split_commas(line);
    if (dims.size() != 2) {
        throw InputError("input: malformed scalar field dimensions");
    }
    ScalarField field(static_cast<int>(parse_int(dims[0])), static_cast<int>(parse_int(dims[1])));
    if (!std::getline(in, line) || line != "x,y,value,valid") {
        throw InputError("input: scalar field CSV lacks column header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cols = split_commas(line);
        if (cols.size() != 4) {
            throw InputError("input: malformed scalar field row");
        }
        const long x = parse_int(cols[0]);
        const long y = parse_int(cols[1]);
        if (x < 0 || y < 0 || x >= field.width || y >= field.height) {
            throw InputError("input: scalar field row out of range");
        }
        if (parse_int(cols[3]) != 0) {
            field.set(static_cast<int>(x), static_cast<int>(y), parse_double(cols[2]));
        } else {
            field.invalidate(static_cast<int>(x), static_cast<int>(y));
        }
    }
    return field;
}

void write_scalar_field_binary(const ScalarField& field, const std::filesystem::path& path) {
    static_assert(std::endian::native == std::endian::little, "binary raster assumes little-endian host");
    auto out = open_out(path, true);
    const std::int32_t dims[2] = {field.width, field.height};
    out.write("FPSF", 4);
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    std::vector<float> raster(field.values.size());
    for (std::size_t i = 0; i < raster.size(); ++i) {
        raster[i] = field.valid[i] ? static_cast<float>(field.values[i]) : std::numeric_limits<float>::quiet_NaN();
    }
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size() * sizeof(float)));
    if (!out) {
        throw std::runtime_error("output: write failed for " + path.string());
    }
}

ScalarField read_scalar_field_binary(const std::filesystem::path& path) {
    const auto bytes = read_bytes(path);
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "FPSF", 4) != 0) {
        throw InputError("input: unsupported format");
    }
    std::int32_t dims[2];
    std::memcpy(dims, bytes.data() + 4, sizeof(dims));
    ScalarField field(dims[0], dims[1]);
    if (bytes.size() != 12 + field.values.size() * sizeof(float)) {
        throw InputError("input: truncated scalar raster");
    }
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        float v;
        std::memcpy(&v, bytes.data() + 12 + i * sizeof(float), sizeof(float));
        if (!std::isnan(v)) {
            field.values[i] = v;
            field.valid[i] = 1;
        }
    }
    return field;
}

Rgb ramp_color(ColorRamp ramp, double t) {
    t = std::clamp(std::isnan(t) ? 0.0 : t, 0.0, 1.0);
    auto channel = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    if (ramp == ColorRamp::Diverging) {
        if (t < 0.5) {
            const double s = 2.0 * t;
            return {channel(s), channel(s), 255};
        }
        const double s = 2.0 * (1.0 - t);
        return {255, channel(s), channel(s)};
    }
    // hot: red rises over [0,1/3], green over [1/3,2/3], blue over [2/3,1]
    return {channel(3.0 * t), channel(3.0 * t - 1.0), channel(3.0 * t - 2.0)};
}

RgbImage heatmap(const ScalarField& field, double lo, double hi, ColorRamp ramp) {
    if (!(lo < hi)) {
        throw std::invalid_argument("heatmap: lo must be below hi");
    }
    RgbImage img{field.width, field.height, std::vector<Rgb>(field.values.size(), kBackgroundColor)};
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (field.valid[i]) {
            img.pixels[i] = ramp_color(ramp, (std::clamp(field.values[i], lo, hi) - lo) / (hi - lo));
        }
    }
    return img;
}

void render_heatmap(const ScalarField& field, double lo, double hi, const std::filesystem::path& path,
                    ColorRamp ramp) {
    write_png(heatmap(field, lo, hi, ramp), path);
}

GrayImage histogram_image(const Histogram2D& hist) {
    const int side = hist.bins * kHistogramCellSize;
    std::vector<double> px(static_cast<std::size_t>(side) * side, 0.0);
    const double peak = hist.counts.empty() ? 0.0 : *std::max_element(hist.counts.begin(), hist.counts.end());
    if (peak > 0.0) {
        for (int ci = 0; ci < hist.bins; ++ci) {
            for (int ki = 0; ki < hist.bins; ++ki) {
                const double level = hist.at(ci, ki) / peak;
                for (int dy = 0; dy < kHistogramCellSize; ++dy) {
                    const int y = ki * kHistogramCellSize + dy;
                    for (int dx = 0; dx < kHistogramCellSize; ++dx) {
                        px[static_cast<std::size_t>(y) * side + ci * kHistogramCellSize + dx] = level;
                    }
                }
            }
        }
    }
    return GrayImage(side, side, std::move(px));
}

void render_histogram(const Histogram2D& hist, const std::filesystem::path& path) {
    write_png(histogram_image(hist), path);
}

void write_png(const RgbImage& image, const std::filesystem::path& path) {
    static_assert(sizeof(Rgb) == 3);
    write_png_raw(path, image.width, image.height, PNG_FORMAT_RGB, image.pixels.data());
}

void write_png(const GrayImage& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> raw(image.pixels.size());
    std::transform(image.pixels.begin(), image.pixels.end(), raw.begin(), [](double v) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    });
    write_png_raw(path, image.width, image.height, PNG_FORMAT_GRAY, raw.data());
}

}  // namespace fpmod
