#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "fpmod/imgio.hpp"
#include "fpmod/moebius.hpp"
#include "fpmod/orient.hpp"

namespace fpmod {

/// Traced curve with cumulative arc length per vertex (arc[0] == 0).
struct Polyline {
    std::vector<Point> points;
    std::vector<double> arc;

    Polyline() = default;
    explicit Polyline(Point start) : points{start}, arc{0.0} {}

    void append(Point p);
    std::size_t segment_count() const { return points.empty() ? 0 : points.size() - 1; }
    double length() const { return arc.empty() ? 0.0 : arc.back(); }
    const Point& front() const { return points.front(); }
    const Point& back() const { return points.back(); }
    /// Keeps vertices [0, segment] and ends the curve at `at`, which must lie on segment `segment`.
    void cut(std::size_t segment, Point at);
};

enum class FailureCause : int {
    ExitsRoi = 0,
    DivergingTrajectories,
    SelfIntersection,
    LowCoherence,
    StepLimit,
};
inline constexpr std::size_t kFailureCauseCount = 5;

std::string_view to_string(FailureCause cause);

struct TqlFailure {
    FailureCause cause;
    friend bool operator==(const TqlFailure&, const TqlFailure&) = default;
};

enum class TraceMode { Along, Orthogonal };
enum class Heading { Forward, Backward };

struct TraceLimits {
    double step = 1.0;            // integration step, pixels
    double min_coherence = 0.05;  // interpolated |doubled| below this fails
    int max_steps = 400;
};

/// Where a trace ends: after a fixed arc length, or at the first crossing
/// with a target polyline.
struct StopRule {
    double length = 0.0;
    const Polyline* target = nullptr;

    static StopRule after_length(double len) { return {len, nullptr}; }
    static StopRule at_crossing(const Polyline& target) { return {0.0, &target}; }
};

/// Second-order (midpoint) integration through an orientation field.
///
/// Each evaluation halves the interpolated doubled angle and keeps the
/// representative within 90 degrees of the previous step direction; in
/// orthogonal mode the quarter turn is applied before that choice.
/// Every evaluated point must lie in the raster and the mask.
class Tracer {
public:
    /// `reference` picks the initial branch; it need not be a unit vector.
    Tracer(const OrientationField& field, Point start, Point reference, TraceMode mode, const TraceLimits& limits);

    /// Advances by min(limits.step, max_length); nullopt on success.
    std::optional<FailureCause> step(double max_length);
    std::optional<FailureCause> step() { return step(limits_.step); }

    const Polyline& path() const { return path_; }
    Polyline& path() { return path_; }
    Point direction() const { return direction_; }
    int steps() const { return steps_; }
    /// Status of the start point (mask, raster, coherence).
    std::optional<FailureCause> start_status() const { return start_status_; }

private:
    std::optional<FailureCause> resolve(Point p, Point reference, Point& dir) const;

    const OrientationField* field_;
    TraceMode mode_;
    TraceLimits limits_;
    Polyline path_;
    Point direction_;
    int steps_ = 0;
    std::optional<FailureCause> start_status_;
    std::optional<Point> cached_at_;
    Point cached_dir_;
};

/// Unit ridge direction at p with canonical orientation in (-pi/2, pi/2].
std::optional<Point> canonical_direction(const OrientationField& field, Point p, double min_coherence);

std::variant<Polyline, TqlFailure> trace(const OrientationField& field, Point start, TraceMode mode, Heading heading,
                                         const StopRule& stop, const TraceLimits& limits = {});

/// Nine labeled points plus the traced geometry.
///
/// arms[k] runs from q0 to q(k+1). edges are traced outward from the cross:
///   [0] q2->p1  [1] q2->p2  [2] q3->p2  [3] q3->p3
///   [4] q4->p3  [5] q4->p4  [6] q1->p4  [7] q1->p1
struct Tetraquadrilateral {
    TqlVertices vertices;
    std::array<Polyline, 4> arms;
    std::array<Polyline, 8> edges;

    /// Shoelace area of p1 p2 p3 p4 (positive for counterclockwise in x + iy).
    double signed_area() const;
};

struct TqlConfig {
    double c = 40.0;            // arm length, pixels
    double edge_budget = 10.0;  // edge traces may run edge_budget * c before giving up
    TraceLimits limits{};
};

std::variant<Tetraquadrilateral, TqlFailure> build_tql(const OrientationField& field, Point q0,
                                                       const TqlConfig& cfg = {});

/// Accumulated absolute turning, in radians, of the trajectory running from
/// the end of `backward` through its start to the end of `forward`.
double accumulated_turning(const Polyline& backward, const Polyline& forward);

/// Accumulated absolute orientation change along the length-2c trajectory through q0.
std::variant<double, TqlFailure> curvature_score(const OrientationField& field, Point q0, const TqlConfig& cfg = {});

struct FailureCounts {
    std::array<std::size_t, kFailureCauseCount> by_cause{};
    std::size_t attempted = 0;
    std::size_t succeeded = 0;

    std::size_t& operator[](FailureCause c) { return by_cause[static_cast<std::size_t>(c)]; }
    std::size_t operator[](FailureCause c) const { return by_cause[static_cast<std::size_t>(c)]; }
    std::size_t failed() const;
};

struct TqlMaps {
    ScalarField conformality;  // log |M|
    ScalarField argument;      // arg M, kept for inspection, not binned
    ScalarField curvature;
    FailureCounts failures;
    /// Per-cell failure cause (-1 where a TQL was built).
    std::vector<std::int8_t> cause;
};

struct TqlMapConfig {
    TqlConfig tql{};
    int threads = 0;  // 0 picks hardware concurrency
    int stride = 1;   // only cells with x and y divisible by stride are evaluated
};

/// Builds a TQL at every mask pixel. Output is independent of thread count.
TqlMaps tql_map(const OrientationField& field, const TqlMapConfig& cfg = {});

/// {"exits-roi": n, ..., "attempted": n, "succeeded": n}
void write_failure_summary(const FailureCounts& counts, const std::filesystem::path& path);

}  // namespace fpmod
