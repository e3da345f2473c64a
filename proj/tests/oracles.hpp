#pragma once

// Reference computations used only by the tests. Nothing here calls into the
// library code it is checking.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;

// (p1-p2)/(p1-p4) * (p3-p4)/(p3-p2), evaluated term by term.
inline C cross_ratio(C p1, C p2, C p3, C p4) {
    const C a = p1 - p2;
    const C b = p1 - p4;
    const C c = p3 - p4;
    const C d = p3 - p2;
    return (a * c) / (b * d);
}

// Nine TQL points in the order p1 p2 p3 p4 q0 q1 q2 q3 q4.
struct Nine {
    C p[4];
    C q[5];
};

// Eight-point boundary product.
inline C boundary_product(const Nine& t) {
    C m = 1.0;
    m *= (t.p[0] - t.q[2]) / (t.q[2] - t.p[1]);
    m *= (t.p[1] - t.q[3]) / (t.q[3] - t.p[2]);
    m *= (t.p[2] - t.q[4]) / (t.q[4] - t.p[3]);
    m *= (t.p[3] - t.q[1]) / (t.q[1] - t.p[0]);
    return m;
}

// Quotient of the four sub-quadrilateral cross-ratios.
inline C four_cross_ratios(const Nine& t) {
    const C m1 = cross_ratio(t.p[0], t.q[2], t.q[0], t.q[1]);
    const C m2 = cross_ratio(t.q[2], t.p[1], t.q[3], t.q[0]);
    const C m3 = cross_ratio(t.q[0], t.q[3], t.p[2], t.q[4]);
    const C m4 = cross_ratio(t.q[1], t.q[0], t.q[4], t.p[3]);
    return m1 / m2 * m3 / m4;
}

// A jittered 3x3 grid, read as a TQL: corners, edge midpoints, center.
inline Nine random_nine(std::mt19937_64& rng, double jitter) {
    std::uniform_real_distribution<double> u(-jitter, jitter);
    std::uniform_real_distribution<double> scale(0.5, 50.0);
    std::uniform_real_distribution<double> shift(-100.0, 100.0);
    std::uniform_real_distribution<double> turn(-3.14159, 3.14159);
    const double s = scale(rng);
    const C origin(shift(rng), shift(rng));
    const C rot = std::polar(1.0, turn(rng));
    auto at = [&](double x, double y) { return origin + s * rot * C(x + u(rng), y + u(rng)); };
    Nine t;
    t.p[0] = at(-1, -1);
    t.p[1] = at(1, -1);
    t.p[2] = at(1, 1);
    t.p[3] = at(-1, 1);
    t.q[0] = at(0, 0);
    t.q[1] = at(-1, 0);
    t.q[2] = at(0, -1);
    t.q[3] = at(1, 0);
    t.q[4] = at(0, 1);
    return t;
}

// SVM dual over augmented features (x, s):
//   max sum(a) - 1/2 a'Qa, 0 <= a <= C, Q_ij = y_i y_j (x_i.x_j + s^2).
struct SvmProblem {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    double C = 1.0;
    double s = 1.0;

    Eigen::MatrixXd Q() const {
        const int n = static_cast<int>(x.size());
        Eigen::MatrixXd q(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double k = s * s;
                for (std::size_t f = 0; f < x[i].size(); ++f) {
                    k += x[i][f] * x[j][f];
                }
                q(i, j) = y[i] * y[j] * k;
            }
        }
        return q;
    }

    double dual(const Eigen::VectorXd& a) const { return a.sum() - 0.5 * a.dot(Q() * a); }
};

// Exact dual optimum by enumerating every assignment of each variable to
// {0, C, free}; the free block solves its stationarity equations and is kept
// when it lands inside the box. Feasible for n <= 8 or so.
inline double svm_dual_optimum(const SvmProblem& p) {
    const int n = static_cast<int>(p.x.size());
    const Eigen::MatrixXd Q = p.Q();
    int faces = 1;
    for (int i = 0; i < n; ++i) {
        faces *= 3;
    }
    double best = 0.0;  // a = 0 is feasible
    for (int code = 0; code < faces; ++code) {
        std::vector<int> state(n);
        int c = code;
        std::vector<int> free_idx;
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            state[i] = c % 3;
            c /= 3;
            if (state[i] == 1) {
                a(i) = p.C;
            } else if (state[i] == 2) {
                free_idx.push_back(i);
            }
        }
        const int f = static_cast<int>(free_idx.size());
        if (f > 0) {
            Eigen::MatrixXd A(f, f);
            Eigen::VectorXd b(f);
            for (int r = 0; r < f; ++r) {
                double rhs = 1.0;
                for (int j = 0; j < n; ++j) {
                    if (state[j] == 1) {
                        rhs -= Q(free_idx[r], j) * p.C;
                    }
                }
                b(r) = rhs;
                for (int k = 0; k < f; ++k) {
                    A(r, k) = Q(free_idx[r], free_idx[k]);
                }
            }
            const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(b);
            if ((A * sol - b).norm() > 1e-8 * (1.0 + b.norm())) {
                continue;
            }
            bool inside = true;
            for (int r = 0; r < f; ++r) {
                if (sol(r) < -1e-12 || sol(r) > p.C + 1e-12) {
                    inside = false;
                }
                a(free_idx[r]) = std::clamp(sol(r), 0.0, p.C);
            }
            if (!inside) {
                continue;
            }
        }
        best = std::max(best, p.dual(a));
    }
    return best;
}

}  // namespace oracle
