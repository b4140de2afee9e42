// Integer-order Bessel functions of the first kind and the sideband
// truncation rule used when expanding exp(i z sin wt) into harmonics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lambdajc {

/// Default tolerance below which a sideband weight |J_p(z)| is dropped.
inline constexpr double default_sideband_eps = 1e-10;

namespace detail {

inline constexpr double bessel_max_argument = 1e3;
inline constexpr double bessel_series_limit = 1.0;

inline void check_bessel_argument(double x)
{
    if (!std::isfinite(x))
        throw std::invalid_argument("bessel_j: argument must be finite");
    if (std::abs(x) > bessel_max_argument)
        throw std::invalid_argument("bessel_j: |x| = " + std::to_string(std::abs(x)) +
                                    " exceeds the supported range 1e3");
}

// Ascending series, x >= 0 small. Leading factor (x/2)^n/n! is built as a
// running product so it underflows to zero instead of overflowing.
inline std::vector<double> bessel_series(int nmax, double x)
{
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    const double h = 0.5 * x;
    const double h2 = h * h;
    double lead = 1.0;
    for (int n = 0; n <= nmax; ++n) {
        if (n > 0)
            lead *= h / n;
        if (lead == 0.0)
            break;
        double term = lead;
        double sum = lead;
        for (int k = 1; k < 100; ++k) {
            term *= -h2 / (static_cast<double>(k) * static_cast<double>(k + n));
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum))
                break;
        }
        out[static_cast<std::size_t>(n)] = sum;
    }
    return out;
}

// Miller's downward recurrence from an order well above max(nmax, x),
// normalised with J_0 + 2 sum_k J_2k = 1. Requires x > 0.
inline std::vector<double> bessel_miller(int nmax, double x)
{
    constexpr double big = 1e150;
    constexpr double small = 1e-150;

    int start = std::max(static_cast<int>(x + std::sqrt(160.0 * x)) + 20, nmax) + 30;
    start += start % 2;

    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    const double two_over_x = 2.0 / x;
    double above = 0.0;   // J_{k+1}
    double current = 1.0; // J_k, unnormalised
    double even_sum = 0.0;
    for (int k = start; k > 0; --k) {
        const double below = k * two_over_x * current - above;
        above = current;
        current = below;
        const int order = k - 1;
        if (std::abs(current) > big) {
            current *= small;
            above *= small;
            even_sum *= small;
            for (int i = order + 1; i <= nmax; ++i)
                out[static_cast<std::size_t>(i)] *= small;
        }
        if (order <= nmax)
            out[static_cast<std::size_t>(order)] = current;
        if (order > 0 && order % 2 == 0)
            even_sum += 2.0 * current;
    }
    const double norm = current + even_sum;
    for (double& v : out)
        v /= norm;
    return out;
}

} // namespace detail

/// J_0(x) .. J_nmax(x) in one pass. nmax >= 0.
inline std::vector<double> bessel_j_range(int nmax, double x)
{
    if (nmax < 0)
        throw std::invalid_argument("bessel_j_range: nmax must be non-negative");
    detail::check_bessel_argument(x);

    const double ax = std::abs(x);
    std::vector<double> out;
    if (ax == 0.0) {
        out.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
        out[0] = 1.0;
        return out;
    }
    out = ax <= detail::bessel_series_limit ? detail::bessel_series(nmax, ax)
                                            : detail::bessel_miller(nmax, ax);
    if (x < 0.0) {
        for (std::size_t n = 1; n < out.size(); n += 2)
            out[n] = -out[n];
    }
    return out;
}

/// Bessel function of the first kind J_n(x) for any integer order.
///
/// Uses the ascending series for |x| <= 1 and normalised downward
/// recurrence otherwise; absolute error stays below 1e-12 for |n| <= 64,
/// |x| <= 50. Negative orders use J_{-n} = (-1)^n J_n.
inline double bessel_j(int n, double x)
{
    detail::check_bessel_argument(x);
    const int order = n < 0 ? -n : n;
    const double value = bessel_j_range(order, x)[static_cast<std::size_t>(order)];
    return (n < 0 && order % 2 == 1) ? -value : value;
}

/// Smallest P such that |J_p(z)| < eps for every |p| > P.
///
/// Past |p| > |z| the weights decay monotonically in |p|, so the scan can
/// stop once that region is reached and the weight has dropped below eps.
inline int sideband_cutoff(double z, double eps = default_sideband_eps)
{
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw std::invalid_argument("sideband_cutoff: eps must be positive");
    detail::check_bessel_argument(z);

    int nmax = static_cast<int>(std::ceil(std::abs(z))) + 32;
    for (;;) {
        const auto weights = bessel_j_range(nmax, z);
        int last = 0;
        for (int p = 1; p <= nmax; ++p) {
            if (std::abs(weights[static_cast<std::size_t>(p)]) >= eps)
                last = p;
        }
        if (last < nmax && std::abs(weights.back()) < eps)
            return last;
        nmax *= 2;
    }
}

} // namespace lambdajc
