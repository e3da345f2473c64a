#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fpmod/moebius.hpp"
#include "oracles.hpp"

using namespace fpmod;

namespace {

TqlVertices square_tql() {
    TqlVertices t;
    t.p1 = {0, 0};
    t.p2 = {2, 0};
    t.p3 = {2, 2};
    t.p4 = {0, 2};
    t.q0 = {1, 1};
    t.q1 = {0, 1};
    t.q2 = {1, 0};
    t.q3 = {2, 1};
    t.q4 = {1, 2};
    return t;
}

oracle::Nine to_nine(const TqlVertices& t) {
    oracle::Nine n;
    n.p[0] = t.p1;
    n.p[1] = t.p2;
    n.p[2] = t.p3;
    n.p[3] = t.p4;
    n.q[0] = t.q0;
    n.q[1] = t.q1;
    n.q[2] = t.q2;
    n.q[3] = t.q3;
    n.q[4] = t.q4;
    return n;
}

TqlVertices from_nine(const oracle::Nine& n) {
    TqlVertices t;
    t.p1 = n.p[0];
    t.p2 = n.p[1];
    t.p3 = n.p[2];
    t.p4 = n.p[3];
    t.q0 = n.q[0];
    t.q1 = n.q[1];
    t.q2 = n.q[2];
    t.q3 = n.q[3];
    t.q4 = n.q[4];
    return t;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(MoebiusMapApply, IdentityAndInversion) {
    const auto id = MoebiusMap::identity();
    const Complex z(3.5, -1.25);
    EXPECT_EQ(id(z).value, z);
    EXPECT_FALSE(id(z).infinite);
    EXPECT_TRUE(id(ExtendedComplex::infinity()).infinite);

    const MoebiusMap inv(0.0, 1.0, 1.0, 0.0);
    EXPECT_EQ(inv(Complex(2.0, 0.0)).value, Complex(0.5, 0.0));
    EXPECT_TRUE(inv(Complex(0.0, 0.0)).infinite);
    const auto back = inv(ExtendedComplex::infinity());
    EXPECT_FALSE(back.infinite);
    EXPECT_EQ(back.value, Complex(0.0, 0.0));
}

TEST(MoebiusMapApply, RejectsDegenerateCoefficients) {
    EXPECT_THROW(MoebiusMap(1.0, 2.0, 2.0, 4.0), std::invalid_argument);
}

TEST(CrossRatio, PrintedExamples) {
    EXPECT_LT(std::abs(cross_ratio_modulus({0, 0}, {1, 0}, {1, 1}, {0, 1}) - Complex(-1, 0)), 1e-15);
    const Complex v = cross_ratio_modulus({0, 0}, {2, 0}, {2, 1}, {0, 1});
    EXPECT_LT(std::abs(v - oracle::cross_ratio({0, 0}, {2, 0}, {2, 1}, {0, 1})), 1e-15);
    EXPECT_LT(std::abs(v - Complex(-4, 0)), 1e-15);
}

TEST(CrossRatio, DegenerateThrows) {
    EXPECT_THROW(cross_ratio_modulus({1, 1}, {2, 0}, {3, 0}, {1, 1}), DegenerateError);
    EXPECT_THROW(cross_ratio_modulus({0, 0}, {2, 0}, {2, 0}, {1, 1}), DegenerateError);
}

TEST(CrossRatio, MoebiusInvariance) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    auto rc = [&] { return Complex(u(rng), u(rng)); };
    int checked = 0;
    while (checked < 200) {
        const Complex a = rc(), b = rc(), c = rc(), d = rc();
        if (std::abs(a * d - b * c) < 0.5) {
            continue;
        }
        const MoebiusMap m(a, b, c, d);
        const Complex p[4] = {rc(), rc(), rc(), rc()};
        Complex q[4];
        bool ok = true;
        for (int k = 0; k < 4; ++k) {
            const auto w = m(p[k]);
            ok = ok && !w.infinite && std::abs(c * p[k] + d) > 0.2;
            q[k] = w.value;
        }
        if (!ok) {
            continue;
        }
        const Complex before = cross_ratio_modulus(p[0], p[1], p[2], p[3]);
        const Complex after = cross_ratio_modulus(q[0], q[1], q[2], q[3]);
        EXPECT_LT(rel(after, before), 1e-9);
        ++checked;
    }
}

TEST(TqlModulus, SquareWithMidpoints) {
    const auto m = tql_modulus(square_tql());
    EXPECT_LT(std::abs(m.value - Complex(1, 0)), 1e-15);
    EXPECT_EQ(m.conformality_index(), 0.0);
}

TEST(TqlModulus, OffCenterRectangle) {
    TqlVertices t;
    t.p1 = {0, 0};
    t.p2 = {4, 0};
    t.p3 = {4, 4};
    t.p4 = {0, 4};
    t.q0 = {1, 1};
    t.q2 = {1, 0};
    t.q3 = {4, 1};
    t.q4 = {1, 4};
    t.q1 = {0, 1};
    EXPECT_LT(std::abs(tql_modulus(t).value - Complex(1, 0)), 1e-14);
}

TEST(TqlModulus, AnnularSectorIsOne) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> radius(1.0, 100.0);
    std::uniform_real_distribution<double> angle(0.05, 3.0);
    for (int i = 0; i < 100; ++i) {
        double r[3] = {radius(rng), radius(rng), radius(rng)};
        std::sort(r, r + 3);
        const double alpha = angle(rng);
        const double beta = alpha * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
        const double r1 = r[0], r0 = r[1], r2 = r[2];
        TqlVertices t;
        t.p1 = r1;
        t.p2 = std::polar(r1, alpha);
        t.p3 = std::polar(r2, alpha);
        t.p4 = r2;
        t.q2 = std::polar(r1, beta);
        t.q3 = std::polar(r0, alpha);
        t.q4 = std::polar(r2, beta);
        t.q1 = r0;
        t.q0 = std::polar(r0, beta);
        EXPECT_LT(std::abs(tql_modulus(t).value - Complex(1, 0)), 1e-12);
    }
}

TEST(TqlModulus, PerturbedSquareMatchesOracle) {
    auto t = square_tql();
    t.q4 = {1.2, 2.0};
    const auto m = tql_modulus(t);
    const Complex want = oracle::boundary_product(to_nine(t));
    EXPECT_LT(rel(m.value, want), 1e-15);
    EXPECT_NE(m.conformality_index(), 0.0);
    EXPECT_NEAR(m.conformality_index(), std::log(std::abs(want)), 1e-15);
    EXPECT_NEAR(m.argument, std::arg(want), 1e-15);
}

TEST(TqlModulus, RelabelingInverts) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto t = from_nine(oracle::random_nine(rng, 0.3));
        TqlVertices s = t;
        std::swap(s.p1, s.p2);
        std::swap(s.p3, s.p4);
        std::swap(s.q1, s.q3);
        const double a = tql_modulus(t).conformality_index();
        const double b = tql_modulus(s).conformality_index();
        EXPECT_NEAR(a, -b, 1e-12);
    }
}

TEST(TqlModulus, MoebiusInvariance) {
    std::mt19937_64 rng(9);
    const MoebiusMap m({1.0, 0.5}, {2.0, -1.0}, {0.01, 0.002}, {1.0, 0.0});
    for (int i = 0; i < 100; ++i) {
        const auto t = from_nine(oracle::random_nine(rng, 0.3));
        TqlVertices s;
        auto f = [&](Complex z) { return m(z).value; };
        s.p1 = f(t.p1);
        s.p2 = f(t.p2);
        s.p3 = f(t.p3);
        s.p4 = f(t.p4);
        s.q0 = f(t.q0);
        s.q1 = f(t.q1);
        s.q2 = f(t.q2);
        s.q3 = f(t.q3);
        s.q4 = f(t.q4);
        EXPECT_LT(rel(tql_modulus(s).value, tql_modulus(t).value), 1e-10);
    }
}

TEST(TqlModulus, DegenerateGeometry) {
    auto t = square_tql();
    t.q2 = t.p2;
    EXPECT_THROW(tql_modulus(t), DegenerateError);
    EXPECT_FALSE(try_tql_modulus(t).has_value());
    TqlVertices zero;
    EXPECT_FALSE(try_tql_modulus(zero).has_value());
    EXPECT_THROW(MoebiusModulus::from_value(0.0), DegenerateError);
}

TEST(Subquadrilaterals, SquareValuesAreEqual) {
    const auto m = subquadrilateral_moduli(square_tql());
    for (int k = 1; k < 4; ++k) {
        EXPECT_LT(std::abs(m[k] - m[0]), 1e-15);
    }
    EXPECT_LT(std::abs(combine_subquadrilateral_moduli(m) - Complex(1, 0)), 1e-15);
}

TEST(Subquadrilaterals, TelescopingIdentity) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 1000; ++i) {
        const auto n = oracle::random_nine(rng, 0.35);
        const auto t = from_nine(n);
        const Complex four = combine_subquadrilateral_moduli(subquadrilateral_moduli(t));
        EXPECT_LT(rel(four, tql_modulus(t).value), 1e-12);
        EXPECT_LT(rel(four, oracle::four_cross_ratios(n)), 1e-12);
    }
}

TEST(Vertices, Diameter) {
    EXPECT_DOUBLE_EQ(square_tql().diameter(), std::sqrt(8.0));
}
