#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fpmod/common.hpp"
#include "fpmod/orient.hpp"

namespace fpmod {

/// Orientation theta(z) = rotation + (sum arg(z - core) - sum arg(z - delta)) / 2.
///
/// A locus listed twice counts with multiplicity two; a whorl (concentric
/// circles, index +1) is a core listed twice.
struct ZeroPoleModel {
    std::vector<Point> cores;
    std::vector<Point> deltas;
    double rotation = 0.0;
};

struct WeightedLocus {
    Point where;
    int multiplicity = 1;
};

/// Quadratic differential Q(z) dz^2 with Q = scale * prod (z - zero)^m / prod (z - pole)^n.
/// Trajectories satisfy Q(z) dz^2 > 0, i.e. theta = -arg Q / 2.
struct QdField {
    Complex scale{1.0, 0.0};
    std::vector<WeightedLocus> zeros;
    std::vector<WeightedLocus> poles;

    /// arg Q(z), accumulated factor by factor (not reduced).
    double arg(Point z) const;
    std::vector<Point> loci() const;
};

/// The quadratic differential whose trajectories reproduce the zero-pole
/// orientation: cores become simple poles, deltas simple zeros.
QdField to_quadratic_differential(const ZeroPoleModel& model);

/// Throws std::domain_error when z coincides with a locus.
double zero_pole_orientation(const ZeroPoleModel& model, Point z);
double qd_orientation(const QdField& field, Point z);

/// Pixel (x, y) samples the model at origin + scale * (x + i y).
struct RasterFrame {
    int width = 256;
    int height = 256;
    Point origin{0.0, 0.0};
    double scale = 1.0;

    Point to_model(double x, double y) const { return origin + scale * Point(x, y); }
};

/// Cells closer than this many pixels to a locus get coherence 0.
inline constexpr double kSingularExclusion = 2.0;

/// Coherence 1 everywhere except near loci; full-frame mask.
OrientationField rasterize(const ZeroPoleModel& model, const RasterFrame& frame);
OrientationField rasterize(const QdField& field, const RasterFrame& frame);

/// Compactly supported smooth bump: exp(1 - 1/(1 - (d/R)^2)) for d < R, else 0.
double bump(double distance, double radius);

/// Rotates orientations by amplitude * bump(|p - locus|, radius). Pixel units.
/// amplitude 0 returns an identical field.
OrientationField perturb_nonconformal(const OrientationField& field, double amplitude, Point locus, double radius);

struct Perturbation {
    double amplitude = 0.0;  // radians
    Point locus;             // pixels
    double radius = 0.0;     // pixels
};

OrientationField apply_perturbations(OrientationField field, const std::vector<Perturbation>& perturbations);

/// Deterministic uniform draws from a 64-bit Mersenne twister.
class SeededRandom {
public:
    explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi);
    std::uint64_t below(std::uint64_t n);  // in [0, n)

private:
    std::mt19937_64 engine_;
};

/// One synthetic finger: a zero-pole pattern, optionally with
/// non-conformal bumps near its most curved region.
struct SyntheticFinger {
    std::string kind;  // "loop", "whorl" or "arch"
    ZeroPoleModel model;
    std::vector<Perturbation> perturbations;
    bool real_like = false;
    int finger = 0;
};

struct CorpusConfig {
    int fingers_per_class = 40;
    int width = 256;
    int height = 256;
    std::uint64_t seed = 1;
    double amplitude_min = 0.25;
    double amplitude_max = 0.40;
    double radius_min = 40.0;
    double radius_max = 60.0;
};

/// fingers_per_class model-like fingers followed by as many real-like ones.
/// Both classes draw their patterns from the same distribution.
std::vector<SyntheticFinger> make_corpus(const CorpusConfig& cfg);

OrientationField render(const SyntheticFinger& finger, const RasterFrame& frame);

}  // namespace fpmod
