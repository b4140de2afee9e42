// Lowest eigenvalue of a real symmetric 3x3 matrix.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace lambdajc {

using Matrix3 = std::array<std::array<double, 3>, 3>;

namespace detail {

inline double lowest_eigenvalue_iterative(const Matrix3& a)
{
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m(i, j) = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

} // namespace detail

/// Smallest eigenvalue of the symmetric matrix `a` (upper triangle is read).
///
/// Trigonometric solution of the shifted characteristic polynomial. When the
/// lowest pair is nearly degenerate the arccos is ill-conditioned there, and
/// the matrix is handed to the iterative symmetric solver instead.
inline double lowest_eigenvalue(const Matrix3& a)
{
    const double a01 = a[0][1];
    const double a02 = a[0][2];
    const double a12 = a[1][2];
    const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    const double b00 = a[0][0] - q;
    const double b11 = a[1][1] - q;
    const double b22 = a[2][2] - q;
    const double off = a01 * a01 + a02 * a02 + a12 * a12;
    const double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * off;
    if (p2 == 0.0)
        return q;

    const double p = std::sqrt(p2 / 6.0);
    const double det = b00 * (b11 * b22 - a12 * a12) - a01 * (a01 * b22 - a12 * a02) +
                       a02 * (a01 * a12 - b11 * a02);
    const double r = det / (2.0 * p * p * p);
    if (r > 1.0 - 1e-6)
        return detail::lowest_eigenvalue_iterative(a);
    const double phi = std::acos(std::max(r, -1.0)) / 3.0;
    return q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
}

} // namespace lambdajc
