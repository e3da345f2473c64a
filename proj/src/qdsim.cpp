#include "fpmod/qdsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fpmod {

namespace {

double nearest_locus_distance(const std::vector<Point>& loci, Point z) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& l : loci) {
        best = std::min(best, std::abs(z - l));
    }
    return best;
}

template <class Orientation>
OrientationField rasterize_with(const RasterFrame& frame, const std::vector<Point>& loci, Orientation&& theta_at) {
    if (frame.width <= 0 || frame.height <= 0 || !(frame.scale > 0.0)) {
        throw std::invalid_argument("rasterize: dimensions and scale must be positive");
    }
    OrientationField field(frame.width, frame.height);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            const Point z = frame.to_model(x, y);
            if (nearest_locus_distance(loci, z) / frame.scale <= kSingularExclusion) {
                field.doubled[field.index(x, y)] = Complex{};
                continue;
            }
            field.set(x, y, theta_at(z), 1.0);
        }
    }
    return field;
}

}  // namespace

double QdField::arg(Point z) const {
    double a = std::arg(scale);
    for (const auto& w : zeros) {
        a += w.multiplicity * std::arg(z - w.where);
    }
    for (const auto& w : poles) {
        a -= w.multiplicity * std::arg(z - w.where);
    }
    return a;
}

std::vector<Point> QdField::loci() const {
    std::vector<Point> out;
    for (const auto& w : zeros) {
        out.push_back(w.where);
    }
    for (const auto& w : poles) {
        out.push_back(w.where);
    }
    return out;
}

QdField to_quadratic_differential(const ZeroPoleModel& model) {
    QdField q;
    q.scale = std::polar(1.0, -2.0 * model.rotation);
    for (const Point& d : model.deltas) {
        q.zeros.push_back({d, 1});
    }
    for (const Point& c : model.cores) {
        q.poles.push_back({c, 1});
    }
    return q;
}

double zero_pole_orientation(const ZeroPoleModel& model, Point z) {
    double sum = 0.0;
    for (const Point& c : model.cores) {
        if (z == c) {
            throw std::domain_error("zero_pole_orientation: z is a core");
        }
        sum += std::arg(z - c);
    }
    for (const Point& d : model.deltas) {
        if (z == d) {
            throw std::domain_error("zero_pole_orientation: z is a delta");
        }
        sum -= std::arg(z - d);
    }
    return canonical_orientation(model.rotation + 0.5 * sum);
}

double qd_orientation(const QdField& field, Point z) {
    for (const Point& l : field.loci()) {
        if (z == l) {
            throw std::domain_error("qd_orientation: z is a zero or pole");
        }
    }
    return canonical_orientation(-0.5 * field.arg(z));
}

OrientationField rasterize(const ZeroPoleModel& model, const RasterFrame& frame) {
    std::vector<Point> loci = model.cores;
    loci.insert(loci.end(), model.deltas.begin(), model.deltas.end());
    return rasterize_with(frame, loci, [&](Point z) { return zero_pole_orientation(model, z); });
}

OrientationField rasterize(const QdField& field, const RasterFrame& frame) {
    return rasterize_with(frame, field.loci(), [&](Point z) { return qd_orientation(field, z); });
}

double bump(double distance, double radius) {
    if (!(radius > 0.0) || distance >= radius) {
        return 0.0;
    }
    const double s = distance / radius;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

OrientationField perturb_nonconformal(const OrientationField& field, double amplitude, Point locus, double radius) {
    if (amplitude < 0.0) {
        throw std::invalid_argument("perturb_nonconformal: negative amplitude");
    }
    OrientationField out = field;
    if (amplitude == 0.0) {
        return out;
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(locus.real() - radius)));
    const int x1 = std::min(field.width - 1, static_cast<int>(std::ceil(locus.real() + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(locus.imag() - radius)));
    const int y1 = std::min(field.height - 1, static_cast<int>(std::ceil(locus.imag() + radius)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double g = bump(std::abs(Point(x, y) - locus), radius);
            if (g > 0.0) {
                // rotating theta by a rotates the doubled vector by 2a
                out.doubled[out.index(x, y)] *= std::polar(1.0, 2.0 * amplitude * g);
            }
        }
    }
    return out;
}

OrientationField apply_perturbations(OrientationField field, const std::vector<Perturbation>& perturbations) {
    for (const auto& p : perturbations) {
        field = perturb_nonconformal(field, p.amplitude, p.locus, p.radius);
    }
    return field;
}

double SeededRandom::uniform(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

std::uint64_t SeededRandom::below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

namespace {

// Pattern centered in the frame with the core region well inside it. The
// returned direction points from the core toward the most curved ridges.
SyntheticFinger draw_pattern(SeededRandom& rng, const CorpusConfig& cfg, Point& bend_locus, Point& bend_axis) {
    SyntheticFinger f;
    const Point center(0.5 * cfg.width + rng.uniform(-12.0, 12.0), 0.45 * cfg.height + rng.uniform(-12.0, 12.0));
    const double tilt = rng.uniform(-0.3, 0.3);
    const Point down = std::polar(1.0, kPi / 2 + tilt);  // from core toward delta
    switch (rng.below(3)) {
        case 0: {
            f.kind = "loop";
            const double sep = rng.uniform(80.0, 110.0);
            f.model.cores = {center};
            f.model.deltas = {center + sep * down};
            f.model.rotation = tilt + rng.uniform(-0.2, 0.2);
            bend_locus = center;
            bend_axis = -down;
            break;
        }
        case 1: {
            f.kind = "whorl";
            const double half = rng.uniform(6.0, 14.0);
            const Point across = down * Point(0.0, 1.0);
            const double spread = rng.uniform(90.0, 120.0);
            f.model.cores = {center - half * across, center + half * across};
            f.model.deltas = {center + spread * down - spread * across, center + spread * down + spread * across};
            f.model.rotation = tilt + rng.uniform(-0.2, 0.2);
            bend_locus = center;
            bend_axis = -down;
            break;
        }
        default: {
            f.kind = "arch";
            // a core/delta pair below the window bends the ridges into an arch
            const Point base = center + rng.uniform(0.55, 0.7) * cfg.height * down;
            const double sep = rng.uniform(20.0, 40.0);
            f.model.cores = {base - 0.5 * sep * down};
            f.model.deltas = {base + 0.5 * sep * down};
            f.model.rotation = tilt + rng.uniform(-0.1, 0.1);
            bend_locus = f.model.cores.front();
            bend_axis = -down;
            break;
        }
    }
    return f;
}

}  // namespace

std::vector<SyntheticFinger> make_corpus(const CorpusConfig& cfg) {
    std::vector<SyntheticFinger> out;
    SeededRandom rng(cfg.seed);
    for (int cls = 0; cls < 2; ++cls) {
        for (int i = 0; i < cfg.fingers_per_class; ++i) {
            Point locus;
            Point axis;
            SyntheticFinger f = draw_pattern(rng, cfg, locus, axis);
            f.real_like = cls == 1;
            f.finger = cls * cfg.fingers_per_class + i;
            // draws happen for both classes so the patterns stay identically distributed
            const double amp = rng.uniform(cfg.amplitude_min, cfg.amplitude_max);
            const double radius = rng.uniform(cfg.radius_min, cfg.radius_max);
            const double offset = rng.uniform(60.0, 80.0);
            const double side = rng.uniform(-0.6, 0.6);
            const double arch_reach = 0.55 * cfg.height + rng.uniform(-10.0, 10.0);
            if (f.real_like) {
                const Point dir = axis * std::polar(1.0, side);
                const Point where = f.kind == "arch" ? locus + arch_reach * dir : locus + offset * dir;
                f.perturbations.push_back({amp, where, radius});
            }
            out.push_back(std::move(f));
        }
    }
    return out;
}

OrientationField render(const SyntheticFinger& finger, const RasterFrame& frame) {
    return apply_perturbations(rasterize(finger.model, frame), finger.perturbations);
}

}  // namespace fpmod
