#include "fpmod/trace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

namespace fpmod {

namespace {

inline double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(Point a, Point b) { return a.real() * b.real() + a.imag() * b.imag(); }
// multiplication by i
inline Point quarter_turn(Point d) { return {-d.imag(), d.real()}; }

struct Box {
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = std::numeric_limits<double>::infinity();
    double x1 = -std::numeric_limits<double>::infinity();
    double y1 = -std::numeric_limits<double>::infinity();

    void add(Point p) {
        x0 = std::min(x0, p.real());
        y0 = std::min(y0, p.imag());
        x1 = std::max(x1, p.real());
        y1 = std::max(y1, p.imag());
    }
    bool overlaps(const Box& o) const { return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1; }
};

inline Box segment_box(Point a, Point b) {
    Box box;
    box.add(a);
    box.add(b);
    return box;
}

Box polyline_box(const Polyline& line) {
    Box box;
    for (const Point& p : line.points) {
        box.add(p);
    }
    return box;
}

// crossings this close to the point two adjacent curves share are the shared point
constexpr double kSharedPointTolerance = 1e-6;

struct SegmentCrossing {
    double t;  // parameter on the first segment
    double u;  // parameter on the second segment
};

// Endpoint-inclusive crossing test. Collinear overlaps report the overlap
// point closest to a0.
std::optional<SegmentCrossing> segment_crossing(Point a0, Point a1, Point b0, Point b1) {
    constexpr double kEps = 1e-12;
    const Point r = a1 - a0;
    const Point s = b1 - b0;
    const Point qp = b0 - a0;
    const double rr = dot(r, r);
    const double ss = dot(s, s);
    if (rr == 0.0 || ss == 0.0) {
        return std::nullopt;
    }
    const double den = cross(r, s);
    if (std::abs(den) > kEps * std::sqrt(rr * ss)) {
        const double t = cross(qp, s) / den;
        const double u = cross(qp, r) / den;
        if (t < -kEps || t > 1.0 + kEps || u < -kEps || u > 1.0 + kEps) {
            return std::nullopt;
        }
        return SegmentCrossing{std::clamp(t, 0.0, 1.0), std::clamp(u, 0.0, 1.0)};
    }
    // parallel: only collinear overlaps count
    if (std::abs(cross(qp, r)) > 1e-9 * std::sqrt(rr)) {
        return std::nullopt;
    }
    const double tb0 = dot(qp, r) / rr;
    const double tb1 = dot(b1 - a0, r) / rr;
    const double lo = std::max(0.0, std::min(tb0, tb1));
    const double hi = std::min(1.0, std::max(tb0, tb1));
    if (lo > hi) {
        return std::nullopt;
    }
    const Point at = a0 + lo * r;
    return SegmentCrossing{lo, std::clamp(dot(at - b0, s) / ss, 0.0, 1.0)};
}

struct Hit {
    std::size_t seg_a;
    std::size_t seg_b;
    Point at;
    double arc_a;
    double arc_b;
};

bool better(const Hit& x, const Hit& y) {
    return x.arc_a < y.arc_a || (x.arc_a == y.arc_a && x.arc_b < y.arc_b);
}

// Crossings of segment `seg` of `mover` with every segment of `other`;
// keeps the best under `better` with `mover` playing role a (mover_is_a) or b.
void collect_hits(const Polyline& mover, std::size_t seg, const Polyline& other, const Box& other_box,
                  bool mover_is_a, std::optional<Hit>& best) {
    const Point m0 = mover.points[seg];
    const Point m1 = mover.points[seg + 1];
    const Box mb = segment_box(m0, m1);
    if (!mb.overlaps(other_box)) {
        return;
    }
    for (std::size_t j = 0; j + 1 < other.points.size(); ++j) {
        const Point o0 = other.points[j];
        const Point o1 = other.points[j + 1];
        if (!mb.overlaps(segment_box(o0, o1))) {
            continue;
        }
        const auto x = segment_crossing(m0, m1, o0, o1);
        if (!x) {
            continue;
        }
        const Point at = m0 + x->t * (m1 - m0);
        const double arc_m = mover.arc[seg] + x->t * (mover.arc[seg + 1] - mover.arc[seg]);
        const double arc_o = other.arc[j] + x->u * (other.arc[j + 1] - other.arc[j]);
        const Hit h = mover_is_a ? Hit{seg, j, at, arc_m, arc_o} : Hit{j, seg, at, arc_o, arc_m};
        if (!best || better(h, *best)) {
            best = h;
        }
    }
}

// True if any segment pair crosses somewhere other than `shared`, the point
// where two adjacent curves are allowed to touch.
bool polylines_cross(const Polyline& a, const Polyline& b, std::optional<Point> shared = std::nullopt) {
    const Box ab = polyline_box(a);
    const Box bb = polyline_box(b);
    if (!ab.overlaps(bb)) {
        return false;
    }
    for (std::size_t i = 0; i + 1 < a.points.size(); ++i) {
        const Box sa = segment_box(a.points[i], a.points[i + 1]);
        if (!sa.overlaps(bb)) {
            continue;
        }
        for (std::size_t j = 0; j + 1 < b.points.size(); ++j) {
            if (!sa.overlaps(segment_box(b.points[j], b.points[j + 1]))) {
                continue;
            }
            const auto x = segment_crossing(a.points[i], a.points[i + 1], b.points[j], b.points[j + 1]);
            if (!x) {
                continue;
            }
            const Point at = a.points[i] + x->t * (a.points[i + 1] - a.points[i]);
            if (shared && std::abs(at - *shared) < kSharedPointTolerance) {
                continue;
            }
            return true;
        }
    }
    return false;
}

double turning(const Polyline& line) {
    double total = 0.0;
    for (std::size_t i = 1; i + 1 < line.points.size(); ++i) {
        const Point s0 = line.points[i] - line.points[i - 1];
        const Point s1 = line.points[i + 1] - line.points[i];
        total += std::abs(std::atan2(cross(s0, s1), dot(s0, s1)));
    }
    return total;
}

// A curve must turn by at least pi before it can meet itself.
bool self_crosses(const Polyline& line) {
    if (line.points.size() < 4 || turning(line) < kPi) {
        return false;
    }
    for (std::size_t i = 0; i + 1 < line.points.size(); ++i) {
        for (std::size_t j = i + 2; j + 1 < line.points.size(); ++j) {
            if (segment_crossing(line.points[i], line.points[i + 1], line.points[j], line.points[j + 1])) {
                return true;
            }
        }
    }
    return false;
}

std::size_t last_segment(const Polyline& line) { return line.segment_count() - 1; }

}  // namespace

void Polyline::append(Point p) {
    const double len = points.empty() ? 0.0 : std::sqrt(std::norm(p - points.back()));
    arc.push_back(arc.empty() ? 0.0 : arc.back() + len);
    points.push_back(p);
}

void Polyline::cut(std::size_t segment, Point at) {
    points.resize(segment + 1);
    arc.resize(segment + 1);
    if (at != points.back()) {
        append(at);
    }
}

std::string_view to_string(FailureCause cause) {
    switch (cause) {
        case FailureCause::ExitsRoi:
            return "exits-roi";
        case FailureCause::DivergingTrajectories:
            return "diverging-trajectories";
        case FailureCause::SelfIntersection:
            return "self-intersection";
        case FailureCause::LowCoherence:
            return "low-coherence";
        case FailureCause::StepLimit:
            return "step-limit";
    }
    return "unknown";
}

std::optional<Point> canonical_direction(const OrientationField& field, Point p, double min_coherence) {
    const auto v = sample_doubled(field, p);
    if (!v) {
        return std::nullopt;
    }
    const double mag = std::sqrt(std::norm(*v));
    if (!(mag >= min_coherence) || mag == 0.0) {
        return std::nullopt;
    }
    const double c = v->real() / mag;
    const double s = v->imag() / mag;
    // half angle with cos >= 0; sin(theta) takes the sign of sin(2 theta)
    const double hc = std::sqrt(std::max(0.0, 0.5 * (1.0 + c)));
    double hs = std::sqrt(std::max(0.0, 0.5 * (1.0 - c)));
    if (s < 0.0) {
        hs = -hs;
    }
    if (hc == 0.0) {
        hs = 1.0;  // theta = pi/2
    }
    return Point(hc, hs);
}

Tracer::Tracer(const OrientationField& field, Point start, Point reference, TraceMode mode, const TraceLimits& limits)
    : field_(&field), mode_(mode), limits_(limits), path_(start), direction_(reference) {
    Point dir;
    start_status_ = resolve(start, reference, dir);
    if (!start_status_) {
        direction_ = dir;
        cached_at_ = start;
        cached_dir_ = dir;
    }
}

std::optional<FailureCause> Tracer::resolve(Point p, Point reference, Point& dir) const {
    if (!(p.real() >= 0.0 && p.imag() >= 0.0 && p.real() <= field_->width - 1 && p.imag() <= field_->height - 1)) {
        return FailureCause::ExitsRoi;
    }
    // nonnegative here, so this rounds half away from zero like lround
    if (!field_->mask.contains(static_cast<int>(p.real() + 0.5), static_cast<int>(p.imag() + 0.5))) {
        return FailureCause::ExitsRoi;
    }
    const auto d = canonical_direction(*field_, p, limits_.min_coherence);
    if (!d) {
        return FailureCause::LowCoherence;
    }
    dir = mode_ == TraceMode::Along ? *d : quarter_turn(*d);
    if (dot(dir, reference) < 0.0) {
        dir = -dir;
    }
    return std::nullopt;
}

std::optional<FailureCause> Tracer::step(double max_length) {
    if (start_status_) {
        return start_status_;
    }
    if (steps_ >= limits_.max_steps) {
        return FailureCause::StepLimit;
    }
    const double h = std::min(limits_.step, max_length);
    const Point p = path_.back();
    Point d1;
    if (cached_at_ && *cached_at_ == p) {
        // resolved at the end of the previous step against the same reference
        d1 = cached_dir_;
    } else if (auto f = resolve(p, direction_, d1)) {
        return f;
    }
    Point d2;
    if (auto f = resolve(p + 0.5 * h * d1, d1, d2)) {
        return f;
    }
    const Point next = p + h * d2;
    Point probe;
    if (auto f = resolve(next, d2, probe)) {
        return f;
    }
    path_.append(next);
    direction_ = d2;
    cached_at_ = next;
    cached_dir_ = probe;
    ++steps_;
    return std::nullopt;
}

std::variant<Polyline, TqlFailure> trace(const OrientationField& field, Point start, TraceMode mode, Heading heading,
                                         const StopRule& stop, const TraceLimits& limits) {
    const auto d0 = canonical_direction(field, start, limits.min_coherence);
    if (!d0) {
        const bool inside = sample_doubled(field, start).has_value() &&
                            field.mask.contains(static_cast<int>(std::lround(start.real())),
                                                static_cast<int>(std::lround(start.imag())));
        return TqlFailure{inside ? FailureCause::LowCoherence : FailureCause::ExitsRoi};
    }
    Point reference = mode == TraceMode::Along ? *d0 : quarter_turn(*d0);
    if (heading == Heading::Backward) {
        reference = -reference;
    }
    Tracer tracer(field, start, reference, mode, limits);
    if (auto f = tracer.start_status()) {
        return TqlFailure{*f};
    }
    const Box target_box = stop.target ? polyline_box(*stop.target) : Box{};
    while (true) {
        double remaining = limits.step;
        if (stop.length > 0.0) {
            remaining = stop.length - tracer.path().length();
            if (remaining <= 1e-9) {
                return tracer.path();
            }
        }
        if (auto f = tracer.step(remaining)) {
            return TqlFailure{*f};
        }
        if (stop.target) {
            std::optional<Hit> hit;
            collect_hits(tracer.path(), last_segment(tracer.path()), *stop.target, target_box, true, hit);
            if (hit) {
                Polyline out = tracer.path();
                out.cut(hit->seg_a, hit->at);
                return out;
            }
        }
    }
}

double Tetraquadrilateral::signed_area() const {
    const Point p[4] = {vertices.p1, vertices.p2, vertices.p3, vertices.p4};
    double area = 0.0;
    for (int k = 0; k < 4; ++k) {
        area += cross(p[k], p[(k + 1) % 4]);
    }
    return 0.5 * area;
}

namespace {

struct CornerResult {
    std::optional<FailureCause> failure;
    Point corner;
};

// Steps the orthogonal edge `a` and the along edge `b` alternately until they
// cross, then cuts both at the crossing.
CornerResult meet(Tracer& a, Tracer& b, int budget) {
    if (auto f = a.start_status()) {
        return {f, {}};
    }
    if (auto f = b.start_status()) {
        return {f, {}};
    }
    Box box_a;
    box_a.add(a.path().front());
    Box box_b;
    box_b.add(b.path().front());
    for (int round = 0; round < budget; ++round) {
        std::optional<Hit> hit;
        if (auto f = a.step()) {
            return {f == FailureCause::StepLimit ? FailureCause::DivergingTrajectories : f, {}};
        }
        box_a.add(a.path().back());
        collect_hits(a.path(), last_segment(a.path()), b.path(), box_b, true, hit);
        if (auto f = b.step()) {
            return {f == FailureCause::StepLimit ? FailureCause::DivergingTrajectories : f, {}};
        }
        box_b.add(b.path().back());
        collect_hits(b.path(), last_segment(b.path()), a.path(), box_a, false, hit);
        if (hit) {
            a.path().cut(hit->seg_a, hit->at);
            b.path().cut(hit->seg_b, hit->at);
            if (a.path().segment_count() == 0 || b.path().segment_count() == 0) {
                return {FailureCause::SelfIntersection, {}};
            }
            return {std::nullopt, hit->at};
        }
    }
    return {FailureCause::DivergingTrajectories, {}};
}

std::optional<FailureCause> trace_arm(const OrientationField& field, Point q0, Point reference, TraceMode mode,
                                      const TqlConfig& cfg, Polyline& out, Point& final_direction) {
    Tracer tracer(field, q0, reference, mode, cfg.limits);
    while (tracer.path().length() < cfg.c - 1e-9) {
        if (auto f = tracer.step(cfg.c - tracer.path().length())) {
            return f;
        }
    }
    final_direction = tracer.direction();
    out = std::move(tracer.path());
    return std::nullopt;
}

bool geometry_crosses(const Tetraquadrilateral& t) {
    const auto& arms = t.arms;
    const auto& e = t.edges;
    for (const auto& line : arms) {
        if (self_crosses(line)) {
            return true;
        }
    }
    for (const auto& line : e) {
        if (self_crosses(line)) {
            return true;
        }
    }
    // arms meet only at q0
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            if (polylines_cross(arms[i], arms[j], t.vertices.q0)) {
                return true;
            }
        }
    }
    // edge k starts at the end of arm edge_arm[k]
    static constexpr int kEdgeArm[8] = {1, 1, 2, 2, 3, 3, 0, 0};
    for (int a = 0; a < 4; ++a) {
        for (int k = 0; k < 8; ++k) {
            const bool attached = kEdgeArm[k] == a;
            const bool hit = attached ? polylines_cross(arms[a], e[k], arms[a].back()) : polylines_cross(arms[a], e[k]);
            if (hit) {
                return true;
            }
        }
    }
    // boundary cycle: consecutive edges share q (even k, at their starts) or a corner (odd k, at their ends)
    for (int i = 0; i < 8; ++i) {
        for (int j = i + 1; j < 8; ++j) {
            bool hit = false;
            if (j == i + 1 && i % 2 == 0) {
                hit = polylines_cross(e[i], e[j], e[i].front());
            } else if (j == i + 1 || (i == 0 && j == 7)) {
                hit = polylines_cross(e[i], e[j], e[i].back());
            } else {
                hit = polylines_cross(e[i], e[j]);
            }
            if (hit) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

std::variant<Tetraquadrilateral, TqlFailure> build_tql(const OrientationField& field, Point q0, const TqlConfig& cfg) {
    const auto& lim = cfg.limits;
    {
        const int px = static_cast<int>(std::lround(q0.real()));
        const int py = static_cast<int>(std::lround(q0.imag()));
        if (!sample_doubled(field, q0) || !field.mask.contains(px, py)) {
            return TqlFailure{FailureCause::ExitsRoi};
        }
    }
    const auto d0 = canonical_direction(field, q0, lim.min_coherence);
    if (!d0) {
        return TqlFailure{FailureCause::LowCoherence};
    }
    const Point d = *d0;
    const Point n = quarter_turn(d);

    Tetraquadrilateral t;
    // arms toward q1 (-d), q2 (-n), q3 (+d), q4 (+n)
    const Point arm_ref[4] = {-d, -n, d, n};
    const TraceMode arm_mode[4] = {TraceMode::Along, TraceMode::Orthogonal, TraceMode::Along, TraceMode::Orthogonal};
    Point arm_end_dir[4];
    for (int k = 0; k < 4; ++k) {
        if (auto f = trace_arm(field, q0, arm_ref[k], arm_mode[k], cfg, t.arms[k], arm_end_dir[k])) {
            return TqlFailure{*f};
        }
    }
    const Point q1 = t.arms[0].back();
    const Point q2 = t.arms[1].back();
    const Point q3 = t.arms[2].back();
    const Point q4 = t.arms[3].back();

    // local frames transported to the arm ends
    const Point n_at_q1 = quarter_turn(-arm_end_dir[0]);
    const Point n_at_q3 = quarter_turn(arm_end_dir[2]);
    const Point d_at_q2 = -quarter_turn(-arm_end_dir[1]);
    const Point d_at_q4 = -quarter_turn(arm_end_dir[3]);

    const int budget = static_cast<int>(std::ceil(cfg.edge_budget * cfg.c / lim.step));
    TraceLimits edge_limits = lim;
    edge_limits.max_steps = budget;

    struct CornerPlan {
        Point ortho_start, ortho_ref, along_start, along_ref;
        int ortho_edge, along_edge;
    };
    // p1: q1 toward -n meets q2 toward -d; p2: q3 (-n) meets q2 (+d);
    // p3: q3 (+n) meets q4 (+d); p4: q1 (+n) meets q4 (-d)
    const CornerPlan plans[4] = {
        {q1, -n_at_q1, q2, -d_at_q2, 7, 0},
        {q3, -n_at_q3, q2, d_at_q2, 2, 1},
        {q3, n_at_q3, q4, d_at_q4, 3, 4},
        {q1, n_at_q1, q4, -d_at_q4, 6, 5},
    };
    Point corners[4];
    for (int k = 0; k < 4; ++k) {
        const auto& plan = plans[k];
        Tracer ortho(field, plan.ortho_start, plan.ortho_ref, TraceMode::Orthogonal, edge_limits);
        Tracer along(field, plan.along_start, plan.along_ref, TraceMode::Along, edge_limits);
        const auto r = meet(ortho, along, budget);
        if (r.failure) {
            return TqlFailure{*r.failure};
        }
        corners[k] = r.corner;
        t.edges[plan.ortho_edge] = std::move(ortho.path());
        t.edges[plan.along_edge] = std::move(along.path());
    }

    t.vertices = TqlVertices{corners[0], corners[1], corners[2], corners[3], q0, q1, q2, q3, q4};
    if (!(t.signed_area() > 0.0)) {
        return TqlFailure{FailureCause::SelfIntersection};
    }
    const auto pts = t.vertices.all();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (std::abs(pts[i] - pts[j]) < 1e-6) {
                return TqlFailure{FailureCause::SelfIntersection};
            }
        }
    }
    if (geometry_crosses(t)) {
        return TqlFailure{FailureCause::SelfIntersection};
    }
    return t;
}

double accumulated_turning(const Polyline& backward, const Polyline& forward) {
    std::vector<Point> dirs;
    dirs.reserve(backward.segment_count() + forward.segment_count());
    for (std::size_t i = backward.segment_count(); i-- > 0;) {
        dirs.push_back(backward.points[i] - backward.points[i + 1]);
    }
    for (std::size_t i = 0; i < forward.segment_count(); ++i) {
        dirs.push_back(forward.points[i + 1] - forward.points[i]);
    }
    double total = 0.0;
    for (std::size_t i = 1; i < dirs.size(); ++i) {
        total += std::abs(std::atan2(cross(dirs[i - 1], dirs[i]), dot(dirs[i - 1], dirs[i])));
    }
    return total;
}

std::variant<double, TqlFailure> curvature_score(const OrientationField& field, Point q0, const TqlConfig& cfg) {
    const auto fwd = trace(field, q0, TraceMode::Along, Heading::Forward, StopRule::after_length(cfg.c), cfg.limits);
    if (auto f = std::get_if<TqlFailure>(&fwd)) {
        return *f;
    }
    const auto back = trace(field, q0, TraceMode::Along, Heading::Backward, StopRule::after_length(cfg.c), cfg.limits);
    if (auto f = std::get_if<TqlFailure>(&back)) {
        return *f;
    }
    return accumulated_turning(std::get<Polyline>(back), std::get<Polyline>(fwd));
}

std::size_t FailureCounts::failed() const {
    std::size_t n = 0;
    for (auto c : by_cause) {
        n += c;
    }
    return n;
}

TqlMaps tql_map(const OrientationField& field, const TqlMapConfig& cfg) {
    TqlMaps maps{ScalarField(field.width, field.height), ScalarField(field.width, field.height),
                 ScalarField(field.width, field.height), FailureCounts{},
                 std::vector<std::int8_t>(field.doubled.size(), -1)};
    std::vector<std::uint8_t> attempted(field.doubled.size(), 0);

    if (cfg.stride < 1) {
        throw std::invalid_argument("tql_map: stride must be positive");
    }
    const int stride = cfg.stride;
    std::atomic<int> next_row{0};
    auto worker = [&] {
        for (int y = next_row++; y < field.height; y = next_row++) {
            for (int x = 0; x < field.width; ++x) {
                if (!field.mask.contains(x, y) || x % stride != 0 || y % stride != 0) {
                    continue;
                }
                const std::size_t i = field.index(x, y);
                attempted[i] = 1;
                const auto built = build_tql(field, Point(x, y), cfg.tql);
                if (const auto* f = std::get_if<TqlFailure>(&built)) {
                    maps.cause[i] = static_cast<std::int8_t>(f->cause);
                    continue;
                }
                const auto& tql = std::get<Tetraquadrilateral>(built);
                const auto modulus = try_tql_modulus(tql.vertices);
                if (!modulus) {
                    maps.cause[i] = static_cast<std::int8_t>(FailureCause::SelfIntersection);
                    continue;
                }
                maps.conformality.set(x, y, modulus->log_magnitude);
                maps.argument.set(x, y, modulus->argument);
                maps.curvature.set(x, y, accumulated_turning(tql.arms[0], tql.arms[2]));
            }
        }
    };
    unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(field.height)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    for (std::size_t i = 0; i < attempted.size(); ++i) {
        if (!attempted[i]) {
            continue;
        }
        ++maps.failures.attempted;
        if (maps.cause[i] >= 0) {
            ++maps.failures.by_cause[static_cast<std::size_t>(maps.cause[i])];
        } else {
            ++maps.failures.succeeded;
        }
    }
    return maps;
}

void write_failure_summary(const FailureCounts& counts, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    for (std::size_t k = 0; k < kFailureCauseCount; ++k) {
        j[std::string(to_string(static_cast<FailureCause>(k)))] = counts.by_cause[k];
    }
    j["attempted"] = counts.attempted;
    j["succeeded"] = counts.succeeded;
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("output: cannot open " + path.string());
    }
    out << j.dump(2) << '\n';
}

}  // namespace fpmod
