#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <vector>

#include "fpmod/common.hpp"
#include "fpmod/imgio.hpp"
#include "fpmod/segment.hpp"

namespace fpmod {

/// Undirected orientation per pixel, stored as coherence * e^{2i*theta}.
///
/// theta is the ridge direction measured in pixel coordinates (x right,
/// y down), so theta = 0 runs along +x and theta = pi/2 along +y.
struct OrientationField {
    int width = 0;
    int height = 0;
    std::vector<Complex> doubled;
    RegionMask mask;

    OrientationField() = default;
    /// Zero-coherence field with a full-frame mask.
    OrientationField(int w, int h);

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    Complex at(int x, int y) const { return doubled[index(x, y)]; }
    void set(int x, int y, double theta, double coherence);
    /// Canonical representative in (-pi/2, pi/2]; meaningless where coherence is 0.
    double theta(int x, int y) const;
    double coherence(int x, int y) const { return std::abs(at(x, y)); }
};

/// Reduces an orientation to the canonical interval (-pi/2, pi/2].
double canonical_orientation(double theta);

struct OrientConfig {
    double sigma = 7.0;  // Gaussian window of the structure tensor, pixels
};

/// Sobel gradients, doubled-angle structure tensor averaged over a Gaussian
/// window, rotated a quarter turn so the result follows the ridges.
/// Throws InputError if image and mask sizes differ.
OrientationField estimate_orientation(const GrayImage& image, const RegionMask& mask, const OrientConfig& cfg = {});

/// Gaussian smoothing of the doubled representation. sigma 0 is the identity.
OrientationField smooth_field(const OrientationField& field, double sigma);

/// Bilinear interpolation of the doubled vector. nullopt when p is outside
/// [0, width-1] x [0, height-1]. Does not consult the mask.
inline std::optional<Complex> sample_doubled(const OrientationField& field, Point p) {
    const double x = p.real();
    const double y = p.imag();
    if (!(x >= 0.0 && y >= 0.0 && x <= field.width - 1 && y <= field.height - 1)) {
        return std::nullopt;
    }
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    if (x0 == field.width - 1 && x0 > 0) {
        --x0;
    }
    if (y0 == field.height - 1 && y0 > 0) {
        --y0;
    }
    const double fx = x - x0;
    const double fy = y - y0;
    const int x1 = field.width > 1 ? x0 + 1 : x0;
    const int y1 = field.height > 1 ? y0 + 1 : y0;
    const Complex top = (1.0 - fx) * field.at(x0, y0) + fx * field.at(x1, y0);
    const Complex bottom = (1.0 - fx) * field.at(x0, y1) + fx * field.at(x1, y1);
    return (1.0 - fy) * top + fy * bottom;
}

/// Interpolated doubled vector at p; the caller resolves the 180 degree
/// ambiguity. Throws std::out_of_range outside the raster and
/// std::domain_error where the interpolated vector vanishes.
Complex sample_orientation(const OrientationField& field, Point p);

enum class SingularType { Core, Delta };

struct SingularPoint {
    Point location;
    SingularType type;
    double index;  // +0.5 core, -0.5 delta
};

using SingularPointSet = std::vector<SingularPoint>;

inline constexpr double kSingularMergeRadius = 8.0;

/// Poincare index on every 2x2 pixel loop inside the mask. Detections within
/// kSingularMergeRadius are clustered; a cluster with total index k/2 yields
/// |k| points of the matching type at its centroid (a whorl becomes two
/// coincident cores, a core/delta pair cancels).
SingularPointSet locate_singular_points(const OrientationField& field);

/// Total rotation of the orientation along the raster frame, in units of a
/// full turn (a half-integer). Equals the sum of enclosed Poincare indices.
double frame_winding(const OrientationField& field);

// CSV layout:
//   width,height
//   <w>,<h>
//   x,y,theta_radians,coherence
//   one row per foreground pixel in raster order
void write_orientation_csv(const OrientationField& field, const std::filesystem::path& path);
OrientationField read_orientation_csv(const std::filesystem::path& path);

}  // namespace fpmod
