#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "fpmod/common.hpp"

namespace fpmod {

/// Grayscale raster, row-major, luminance in [0,1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    /// Throws InputError on zero dimensions, size mismatch or values outside [0,1].
    GrayImage(int w, int h, std::vector<double> px);

    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Per-pixel real values with a validity mask. Invalid cells hold kInvalid.
struct ScalarField {
    static constexpr double kInvalid = std::numeric_limits<double>::quiet_NaN();

    int width = 0;
    int height = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    ScalarField() = default;
    ScalarField(int w, int h);

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool is_valid(int x, int y) const { return valid[index(x, y)] != 0; }
    double at(int x, int y) const { return values[index(x, y)]; }
    void set(int x, int y, double v);
    void invalidate(int x, int y);
    std::size_t valid_count() const;

    /// Equal dimensions, equal validity, bitwise-equal values on valid cells.
    friend bool operator==(const ScalarField& a, const ScalarField& b);
};

GrayImage load_gray(const std::filesystem::path& path);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
/// Quantizes to 8 bits (round to nearest).
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

// CSV layout:
//   width,height
//   <w>,<h>
//   x,y,value,valid
//   one row per cell in raster order; invalid cells carry "nan" and valid=0.
void write_scalar_field(const ScalarField& field, const std::filesystem::path& path);
ScalarField read_scalar_field(const std::filesystem::path& path);

// Binary layout (little-endian): "FPSF", int32 width, int32 height,
// then width*height float32 values; NaN marks an invalid cell.
void write_scalar_field_binary(const ScalarField& field, const std::filesystem::path& path);
ScalarField read_scalar_field_binary(const std::filesystem::path& path);

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Diverging: blue (0,0,255) -> white -> red (255,0,0), for signed quantities.
/// Sequential: black -> red -> yellow -> white ("hot"), for non-negative ones.
enum class ColorRamp { Diverging, Sequential };

/// Color for invalid cells; lies on neither ramp.
inline constexpr Rgb kBackgroundColor{96, 96, 96};

/// t is clamped to [0,1].
Rgb ramp_color(ColorRamp ramp, double t);

/// Pure function of its arguments. Throws std::invalid_argument if lo >= hi.
RgbImage heatmap(const ScalarField& field, double lo, double hi, ColorRamp ramp);
void render_heatmap(const ScalarField& field, double lo, double hi, const std::filesystem::path& path,
                    ColorRamp ramp = ColorRamp::Diverging);

struct Histogram2D;
inline constexpr int kHistogramCellSize = 16;
/// One kHistogramCellSize square per bin; conformality runs left to right,
/// curvature top (zero) to bottom. Gray level is mass / max mass.
GrayImage histogram_image(const Histogram2D& hist);
void render_histogram(const Histogram2D& hist, const std::filesystem::path& path);

void write_png(const RgbImage& image, const std::filesystem::path& path);
void write_png(const GrayImage& image, const std::filesystem::path& path);

}  // namespace fpmod
