#pragma once

#include <array>
#include <optional>
#include <stdexcept>

#include "fpmod/common.hpp"

namespace fpmod {

/// Point of the Riemann sphere: a finite complex number or infinity.
struct ExtendedComplex {
    Complex value{};
    bool infinite = false;

    static ExtendedComplex infinity() { return {Complex{}, true}; }
    friend bool operator==(const ExtendedComplex&, const ExtendedComplex&) = default;
};

/// Point coincidences that leave a cross-ratio undefined.
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// z -> (az + b) / (cz + d) with ad - bc != 0.
class MoebiusMap {
public:
    /// Throws std::invalid_argument when ad - bc == 0.
    MoebiusMap(Complex a, Complex b, Complex c, Complex d);

    static MoebiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }

    ExtendedComplex operator()(ExtendedComplex z) const;
    ExtendedComplex operator()(Complex z) const { return (*this)(ExtendedComplex{z, false}); }

    Complex a() const { return a_; }
    Complex b() const { return b_; }
    Complex c() const { return c_; }
    Complex d() const { return d_; }

private:
    Complex a_, b_, c_, d_;
};

inline ExtendedComplex apply(const MoebiusMap& map, ExtendedComplex z) { return map(z); }

/// (p1-p2)/(p1-p4) * (p3-p4)/(p3-p2). Throws DegenerateError if p1 == p4 or p3 == p2.
Complex cross_ratio_modulus(Complex p1, Complex p2, Complex p3, Complex p4);

/// M = m e^{i phi}; log m is the conformality index.
struct MoebiusModulus {
    Complex value;
    double log_magnitude = 0.0;
    double argument = 0.0;  // in (-pi, pi]

    /// Throws DegenerateError for value 0.
    static MoebiusModulus from_value(Complex value);
    double conformality_index() const { return log_magnitude; }
};

/// The nine labeled points of a tetraquadrilateral. Corners p1..p4 run
/// counterclockwise; q2 sits on p1p2, q3 on p2p3, q4 on p3p4, q1 on p4p1,
/// and q0 is the crossing of the central trajectory and orthogonal trajectory.
struct TqlVertices {
    Complex p1, p2, p3, p4;
    Complex q0, q1, q2, q3, q4;

    std::array<Complex, 9> all() const { return {p1, p2, p3, p4, q0, q1, q2, q3, q4}; }
    /// Largest pairwise distance among the nine points.
    double diameter() const;
};

/// Relative guard on denominators: below kDegenerateTolerance * diameter the
/// configuration counts as degenerate.
inline constexpr double kDegenerateTolerance = 1e-9;

/// Product of boundary-segment ratios around the tetraquadrilateral
///   (p1-q2)/(q2-p2) * (p2-q3)/(q3-p3) * (p3-q4)/(q4-p4) * (p4-q1)/(q1-p1).
/// q0 does not enter. nullopt on degenerate geometry.
std::optional<MoebiusModulus> try_tql_modulus(const TqlVertices& t) noexcept;
/// As try_tql_modulus, throwing DegenerateError instead.
MoebiusModulus tql_modulus(const TqlVertices& t);

/// Cross-ratio moduli of the four sub-quadrilaterals
///   (p1,q2,q0,q1), (q2,p2,q3,q0), (q0,q3,p3,q4), (q1,q0,q4,p4).
std::array<Complex, 4> subquadrilateral_moduli(const TqlVertices& t);

/// m[0]/m[1] * m[2]/m[3]; algebraically identical to tql_modulus.
Complex combine_subquadrilateral_moduli(const std::array<Complex, 4>& m);

}  // namespace fpmod
