#include "fpmod/moebius.hpp"

#include <algorithm>
#include <cmath>

namespace fpmod {

MoebiusMap::MoebiusMap(Complex a, Complex b, Complex c, Complex d) : a_(a), b_(b), c_(c), d_(d) {
    if (a * d - b * c == Complex{}) {
        throw std::invalid_argument("MoebiusMap: ad - bc must be nonzero");
    }
}

ExtendedComplex MoebiusMap::operator()(ExtendedComplex z) const {
    if (z.infinite) {
        if (c_ == Complex{}) {
            return ExtendedComplex::infinity();
        }
        return {a_ / c_, false};
    }
    const Complex den = c_ * z.value + d_;
    if (den == Complex{}) {
        return ExtendedComplex::infinity();
    }
    return {(a_ * z.value + b_) / den, false};
}

Complex cross_ratio_modulus(Complex p1, Complex p2, Complex p3, Complex p4) {
    if (p1 == p4 || p3 == p2) {
        throw DegenerateError("cross_ratio_modulus: coincident points");
    }
    return (p1 - p2) / (p1 - p4) * ((p3 - p4) / (p3 - p2));
}

MoebiusModulus MoebiusModulus::from_value(Complex value) {
    if (value == Complex{}) {
        throw DegenerateError("MoebiusModulus: zero value");
    }
    return {value, std::log(std::abs(value)), std::arg(value)};
}

double TqlVertices::diameter() const {
    const auto pts = all();
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            d = std::max(d, std::abs(pts[i] - pts[j]));
        }
    }
    return d;
}

std::optional<MoebiusModulus> try_tql_modulus(const TqlVertices& t) noexcept {
    const Complex num[4] = {t.p1 - t.q2, t.p2 - t.q3, t.p3 - t.q4, t.p4 - t.q1};
    const Complex den[4] = {t.q2 - t.p2, t.q3 - t.p3, t.q4 - t.p4, t.q1 - t.p1};
    const double guard = kDegenerateTolerance * t.diameter();
    if (!(guard > 0.0)) {
        return std::nullopt;
    }
    Complex m{1.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        if (std::abs(num[k]) < guard || std::abs(den[k]) < guard) {
            return std::nullopt;
        }
        m *= num[k] / den[k];
    }
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) {
        return std::nullopt;
    }
    return MoebiusModulus{m, std::log(std::abs(m)), std::arg(m)};
}

MoebiusModulus tql_modulus(const TqlVertices& t) {
    if (auto m = try_tql_modulus(t)) {
        return *m;
    }
    throw DegenerateError("tql_modulus: degenerate tetraquadrilateral");
}

std::array<Complex, 4> subquadrilateral_moduli(const TqlVertices& t) {
    return {cross_ratio_modulus(t.p1, t.q2, t.q0, t.q1), cross_ratio_modulus(t.q2, t.p2, t.q3, t.q0),
            cross_ratio_modulus(t.q0, t.q3, t.p3, t.q4), cross_ratio_modulus(t.q1, t.q0, t.q4, t.p4)};
}

Complex combine_subquadrilateral_moduli(const std::array<Complex, 4>& m) {
    if (m[1] == Complex{} || m[3] == Complex{}) {
        throw DegenerateError("combine_subquadrilateral_moduli: vanishing modulus");
    }
    return m[0] / m[1] * (m[2] / m[3]);
}

}  // namespace fpmod
