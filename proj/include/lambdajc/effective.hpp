// Detunings, sideband selection and drive-renormalised parameters of the
// effective three-level Jaynes-Cummings model.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lambdajc/params.hpp"
#include "lambdajc/specfun.hpp"

namespace lambdajc {

struct Detunings {
    double delta1;
    double delta2;
};

/// delta1 = 2 omega1 + omega2 - Omega1, delta2 = 2 omega2 + omega1 - Omega2.
inline Detunings detunings(const SystemParams& sys)
{
    return {2.0 * sys.omega1 + sys.omega2 - sys.Omega1,
            2.0 * sys.omega2 + sys.omega1 - sys.Omega2};
}

/// Counter-rotating carrier frequencies before sideband shifts:
/// Delta_n = mode1 + n omega_D and Delta_m = mode2 + m omega_D.
struct Carriers {
    double mode1;
    double mode2;
};

inline Carriers counter_rotating_carriers(const SystemParams& sys)
{
    return {2.0 * sys.omega1 + sys.omega2 + sys.Omega1,
            2.0 * sys.omega2 + sys.omega1 + sys.Omega2};
}

/// Resolved sideband orders. Delta_n0/Delta_m0 keep the sign of the
/// minimising expression.
struct SidebandInfo {
    int n0 = 0;
    int m0 = 0;
    double Delta_n0 = 0.0;
    double Delta_m0 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
};

inline constexpr std::int64_t sideband_search_limit = 1'000'000;

namespace detail {

// argmin over integers k in [-limit, limit] of |carrier + k step|; ties go
// to the more negative integer.
inline int nearest_sideband(double carrier, double step)
{
    const double lim = static_cast<double>(sideband_search_limit);
    const double lo = std::clamp(std::floor(-carrier / step), -lim, lim);
    const double hi = std::clamp(lo + 1.0, -lim, lim);
    const double at_lo = std::abs(carrier + lo * step);
    const double at_hi = std::abs(carrier + hi * step);
    return static_cast<int>(at_hi < at_lo ? hi : lo);
}

} // namespace detail

inline SidebandInfo find_sidebands(const SystemParams& sys, const DriveParams& drive)
{
    if (!std::isfinite(drive.frequency) || drive.frequency <= 0.0)
        throw std::invalid_argument("find_sidebands: omega_D must be positive");

    const auto [d1, d2] = detunings(sys);
    const auto carriers = counter_rotating_carriers(sys);
    SidebandInfo sb;
    sb.delta1 = d1;
    sb.delta2 = d2;
    sb.n0 = detail::nearest_sideband(carriers.mode1, drive.frequency);
    sb.m0 = detail::nearest_sideband(carriers.mode2, drive.frequency);
    sb.Delta_n0 = carriers.mode1 + sb.n0 * drive.frequency;
    sb.Delta_m0 = carriers.mode2 + sb.m0 * drive.frequency;
    return sb;
}

/// How the residual counter-rotating detunings enter the effective
/// frequencies.
///
/// `signed_value` feeds Delta_n0, Delta_m0 with their sign; every phase of
/// the transformed Hamiltonian then cancels exactly, including the
/// counter-rotating g_c terms. `magnitude` feeds |Delta_n0|, |Delta_m0|; the
/// effective cavity frequency becomes the V-shaped, everywhere continuous
/// function of omega_D and the rotating-term phases still cancel.
enum class DetuningConvention { signed_value, magnitude };

inline std::string_view to_string(DetuningConvention c)
{
    return c == DetuningConvention::signed_value ? "signed" : "magnitude";
}

inline DetuningConvention parse_detuning_convention(std::string_view s)
{
    if (s == "signed")
        return DetuningConvention::signed_value;
    if (s == "magnitude")
        return DetuningConvention::magnitude;
    throw std::invalid_argument("unknown detuning convention '" + std::string(s) +
                                "' (expected 'signed' or 'magnitude')");
}

struct EffectiveParams {
    double Omega1_eff = 0.0;
    double Omega2_eff = 0.0;
    double omega1_eff = 0.0;
    double omega2_eff = 0.0;
    double gr1 = 0.0;
    double gr2 = 0.0;
    double gc1 = 0.0;
    double gc2 = 0.0;

    /// Set when an effective cavity frequency is not positive; the block
    /// ground state is then pinned to the edge of any finite window.
    bool nonpositive_cavity() const { return Omega1_eff <= 0.0 || Omega2_eff <= 0.0; }

    /// Parameters of the effective JC model in the layout the block engine
    /// expects; the counter-rotating couplings are dropped.
    SystemParams as_jc_params() const
    {
        return SystemParams{omega1_eff, omega2_eff, Omega1_eff, Omega2_eff, gr1, gr2};
    }
};

inline EffectiveParams effective_parameters(const SystemParams& sys, const DriveParams& drive,
                                            const SidebandInfo& sb,
                                            DetuningConvention convention =
                                                DetuningConvention::signed_value)
{
    const double dn = convention == DetuningConvention::magnitude ? std::abs(sb.Delta_n0)
                                                                  : sb.Delta_n0;
    const double dm = convention == DetuningConvention::magnitude ? std::abs(sb.Delta_m0)
                                                                  : sb.Delta_m0;
    const double d1 = sb.delta1;
    const double d2 = sb.delta2;
    const double theta = drive.theta();

    EffectiveParams eff;
    eff.Omega1_eff = (dn - d1) / 2.0;
    eff.Omega2_eff = (dm - d2) / 2.0;
    eff.omega1_eff = ((2.0 * d1 - d2) + (2.0 * dn - dm)) / 6.0;
    eff.omega2_eff = ((2.0 * d2 - d1) + (2.0 * dm - dn)) / 6.0;
    eff.gr1 = sys.g1 * bessel_j(0, theta);
    eff.gr2 = sys.g2 * bessel_j(0, 2.0 * theta);
    eff.gc1 = sys.g1 * bessel_j(sb.n0, theta);
    eff.gc2 = sys.g2 * bessel_j(sb.m0, 2.0 * theta);
    return eff;
}

/// Convenience overload resolving the sidebands first.
inline EffectiveParams effective_parameters(const SystemParams& sys, const DriveParams& drive,
                                            DetuningConvention convention =
                                                DetuningConvention::signed_value)
{
    return effective_parameters(sys, drive, find_sidebands(sys, drive), convention);
}

struct ZeroFrequency {
    int mode;  // 1 or 2
    int order; // n0 for mode 1, m0 for mode 2
    double omega_D;
};

/// Drive frequencies at which the effective cavity frequency of each mode
/// vanishes, omega_D = -2 Omega_i / order, for every order in [first, last].
/// Only positive frequencies are returned. At zero detuning these coincide
/// with -2(2 omega1 + omega2)/n0 and -2(2 omega2 + omega1)/m0.
inline std::vector<ZeroFrequency> omega_zero_frequencies(const SystemParams& sys, int first,
                                                         int last)
{
    if (first > last)
        throw std::invalid_argument("omega_zero_frequencies: empty order range");
    if (first <= 0 && last >= 0)
        throw std::invalid_argument("omega_zero_frequencies: order range must exclude 0");

    std::vector<ZeroFrequency> out;
    for (int mode : {1, 2}) {
        const double cavity = mode == 1 ? sys.Omega1 : sys.Omega2;
        for (int k = first; k <= last; ++k) {
            const double w = -2.0 * cavity / k;
            if (w > 0.0)
                out.push_back({mode, k, w});
        }
    }
    return out;
}

inline constexpr double default_hierarchy_threshold = 0.4;
inline constexpr double rwa_ratio_threshold = 0.01;

struct ValidityRatio {
    std::string_view name;
    double value;
};

/// Audit of the approximations leading to the effective JC model.
struct ValidityReport {
    std::array<ValidityRatio, 8> ratios{};
    bool hierarchy_ok = false;
    bool rwa_ok = false;

    double ratio(std::string_view name) const
    {
        for (const auto& r : ratios)
            if (r.name == name)
                return r.value;
        throw std::out_of_range("unknown validity ratio");
    }
};

inline ValidityReport validity_report(const SystemParams& sys, const DriveParams& drive,
                                      const SidebandInfo& sb, const EffectiveParams& eff,
                                      double hierarchy_threshold = default_hierarchy_threshold)
{
    const double wd = drive.frequency;
    auto counter_ratio = [](double gc, double delta) {
        if (delta == 0.0)
            return std::numeric_limits<double>::infinity();
        return std::abs(gc / delta);
    };

    ValidityReport rep;
    rep.ratios = {{
        {"delta1/omega_D", std::abs(sb.delta1) / wd},
        {"delta2/omega_D", std::abs(sb.delta2) / wd},
        {"Delta_n0/omega_D", std::abs(sb.Delta_n0) / wd},
        {"Delta_m0/omega_D", std::abs(sb.Delta_m0) / wd},
        {"g1/omega_D", sys.g1 / wd},
        {"g2/omega_D", sys.g2 / wd},
        {"gc1/Delta_n0", counter_ratio(eff.gc1, sb.Delta_n0)},
        {"gc2/Delta_m0", counter_ratio(eff.gc2, sb.Delta_m0)},
    }};
    rep.hierarchy_ok = true;
    for (std::size_t i = 0; i < 6; ++i)
        rep.hierarchy_ok = rep.hierarchy_ok && rep.ratios[i].value < hierarchy_threshold;
    rep.rwa_ok = rep.ratios[6].value < rwa_ratio_threshold &&
                 rep.ratios[7].value < rwa_ratio_threshold;
    return rep;
}

/// Smallest theta in (0, theta_max] at which |g_c/Delta| of the given mode
/// reaches `threshold`, located by a scan followed by bisection. Mode 2 is
/// evaluated at 2 theta, like its coupling. Returns nullopt if no crossing.
inline std::optional<double> rwa_crossing_theta(const SystemParams& sys, double omega_D, int mode,
                                                double theta_max,
                                                double threshold = rwa_ratio_threshold)
{
    if (mode != 1 && mode != 2)
        throw std::invalid_argument("rwa_crossing_theta: mode must be 1 or 2");
    const auto sb = find_sidebands(sys, DriveParams{0.0, omega_D});
    const int order = mode == 1 ? sb.n0 : sb.m0;
    const double g = mode == 1 ? sys.g1 : sys.g2;
    const double delta = mode == 1 ? sb.Delta_n0 : sb.Delta_m0;
    const double scale = mode == 1 ? 1.0 : 2.0;
    auto excess = [&](double theta) {
        if (delta == 0.0)
            return std::numeric_limits<double>::infinity();
        return std::abs(g * bessel_j(order, scale * theta) / delta) - threshold;
    };

    if (excess(0.0) >= 0.0)
        return 0.0;
    constexpr int scan_points = 4000;
    double prev = 0.0;
    for (int i = 1; i <= scan_points; ++i) {
        const double theta = theta_max * i / scan_points;
        if (excess(theta) >= 0.0) {
            double lo = prev;
            double hi = theta;
            while (hi - lo > 1e-12 * std::max(1.0, hi)) {
                const double mid = 0.5 * (lo + hi);
                (excess(mid) >= 0.0 ? hi : lo) = mid;
            }
            return hi;
        }
        prev = theta;
    }
    return std::nullopt;
}

} // namespace lambdajc
