// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Deviations are echoed to stdout and acceptance_deviations.log.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lambdajc/lambdajc.hpp"

using namespace lambdajc;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::vector<std::string> deviations;

void deviation(const std::string& s)
{
    deviations.push_back(s);
    std::printf("  deviation: %s\n", s.c_str());
}

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string show(const std::vector<BlockLabel>& seq)
{
    std::string s;
    for (const auto& l : seq)
        s += (s.empty() ? "" : " ") + to_string(l);
    return s;
}

std::vector<BlockLabel> labels(std::initializer_list<std::pair<int, int>> l)
{
    std::vector<BlockLabel> out;
    for (auto [n, m] : l)
        out.push_back({n, m});
    return out;
}

const auto y1_chain = labels({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
const auto y2_chain = labels({{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});

// Echo runs shared between criteria 7, 8 and 10.
std::vector<double> echo_norm_drifts;

EchoResult echo(const HamiltonianSpec& a, const HamiltonianSpec& b, AtomicState atom,
                const EchoOptions& opt = {})
{
    const HilbertSpace space(6, 6);
    const auto psi = coherent_state(space, 0.01, 0.01, atom);
    auto r = loschmidt_echo(a, b, psi, 200.0, 2000, opt);
    echo_norm_drifts.push_back(r.norm_drift);
    return r;
}

HamiltonianSpec variant_at(Variant v, double theta, double omega_D)
{
    HamiltonianSpec s;
    s.variant = v;
    s.drive = DriveParams::from_theta(theta, omega_D);
    return s;
}

// Half the smaller counter-rotating crossing theta of the two modes.
double echo_theta(double omega_D)
{
    const SystemParams sys;
    const double c1 = rwa_crossing_theta(sys, omega_D, 1, 20.0).value_or(20.0);
    const double c2 = rwa_crossing_theta(sys, omega_D, 2, 20.0).value_or(20.0);
    return 0.5 * std::min(c1, c2);
}

const double echo_frequencies[] = {0.14, 0.18, 0.33, 0.49};

std::vector<BlockLabel> static_scan(const std::function<SystemParams(double)>& line, double lo,
                                    double hi, int points)
{
    std::vector<PhasePoint> pts;
    for (int i = 0; i < points; ++i)
        pts.push_back(ground_search(line(lo + (hi - lo) * i / (points - 1)), 8));
    return label_sequence(pts);
}

std::vector<BlockLabel> path_scan(double tt0, double tt1, double d0, double d1,
                                   DetuningConvention conv)
{
    DrivenOptions opt;
    opt.convention = conv;
    opt.block_window = 5;
    std::vector<PhasePoint> pts;
    const int n = 2001;
    for (int i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / (n - 1);
        DriveParams d{0.0, 0.18};
        set_two_theta(tt0 + (tt1 - tt0) * f, d);
        SystemParams s;
        set_delta2_ratio(d0 + (d1 - d0) * f, s);
        pts.push_back(driven_phase_point(s, d, opt).point);
    }
    return label_sequence(pts);
}

Outcome y1_critical()
{
    const SystemParams base;
    const auto t = locate_transition(
        [&](double x) {
            SystemParams s = base;
            s.g1 = x * s.Omega1;
            s.g2 = 0.05;
            return s;
        },
        8, 0.0, 5.0);
    const bool labels_ok = t.before == BlockLabel{0, 0} && t.after == BlockLabel{1, 0};
    return {labels_ok && std::abs(t.at - 2.4142) <= 0.005,
            fmt("g1/Omega1 = %.6f (closed form %.6f)", t.at, 1.0 / (std::sqrt(2.0) - 1.0))};
}

Outcome y2_critical()
{
    const SystemParams base;
    const auto t = locate_transition(
        [&](double x) {
            SystemParams s = base;
            s.g1 = 0.0;
            s.g2 = x * s.Omega2;
            return s;
        },
        8, 0.0, 4.6);
    const bool labels_ok = t.before == BlockLabel{0, 0} && t.after == BlockLabel{0, 1};
    return {labels_ok && std::abs(t.at - 1.0) <= 0.005, fmt("g2/Omega2 = %.6f", t.at)};
}

Outcome triple()
{
    const SystemParams base;
    const auto tp = triple_point(
        [&](double x, double y) {
            SystemParams s = base;
            s.g1 = x * s.Omega1;
            s.g2 = y * s.Omega2;
            return s;
        },
        {0, 0}, {1, 0}, {0, 1}, 2.0, 3.0, 2.0, 3.5);
    return {std::abs(tp.x - 2.414) <= 0.02 && std::abs(tp.y - 2.653) <= 0.02,
            fmt("(g1/Omega1, g2/Omega2) = (%.6f, %.6f)", tp.x, tp.y)};
}

Outcome static_sequences()
{
    const SystemParams base;
    Outcome out;
    auto along_g2 = [&](double g1r) {
        return static_scan(
            [&](double x) {
                SystemParams s = base;
                s.g1 = g1r * s.Omega1;
                s.g2 = x * s.Omega2;
                return s;
            },
            0.0, 4.65, 1000);
    };
    auto along_g1 = [&](double g2r) {
        return static_scan(
            [&](double x) {
                SystemParams s = base;
                s.g2 = g2r * s.Omega2;
                s.g1 = x * s.Omega1;
                return s;
            },
            0.0, 4.9, 1000);
    };
    const auto y2 = along_g2(1.0);
    const auto y1 = along_g1(0.5);
    const auto combined = along_g1(1.5);
    const auto combined2 = along_g1(2.6);
    const auto want_combined = labels({{0, 1}, {0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
    const auto want_combined2 =
        labels({{0, 2}, {0, 1}, {0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
    out.pass = y2 == y2_chain && y1 == y1_chain && combined == want_combined &&
               combined2 == want_combined2;
    out.detail = "y2: " + show(y2) + "; y1: " + show(y1) + "; combined: " + show(combined) +
                 "; combined at g2/Omega2 = 2.6: " + show(combined2);
    return out;
}

Outcome sideband_table()
{
    const SystemParams sys;
    const auto c = counter_rotating_carriers(sys);
    auto at = [&](double w) { return find_sidebands(sys, DriveParams{0.0, w}); };
    auto brute = [](double carrier, double step) {
        int best = 0;
        double best_val = std::abs(carrier);
        for (int n = -5000; n <= 5000; ++n) {
            const double v = std::abs(carrier + n * step);
            if (v < best_val || (v == best_val && n < best)) {
                best_val = v;
                best = n;
            }
        }
        return best;
    };
    const auto a = at(0.18);
    const auto b = at(0.49);
    bool pass = a.n0 == -14 && a.m0 == -11 && b.n0 == -5 && b.m0 == -4;
    std::string detail = "0.18 -> (" + std::to_string(a.n0) + ", " + std::to_string(a.m0) +
                         "), 0.49 -> (" + std::to_string(b.n0) + ", " + std::to_string(b.m0) + ")";
    const std::map<double, std::pair<int, int>> reference_orders = {{0.14, {-17, -14}}, {0.33, {-7, -6}}};
    for (const auto& [w, quoted] : reference_orders) {
        const auto s = at(w);
        pass = pass && s.n0 == brute(c.mode1, w) && s.m0 == brute(c.mode2, w);
        detail += fmt(", %.2f", w) + " -> (" + std::to_string(s.n0) + ", " +
                  std::to_string(s.m0) + ")";
        if (s.n0 != quoted.first || s.m0 != quoted.second)
            deviation(fmt("sidebands at omega_D = %.2f: argmin gives (", w) +
                      std::to_string(s.n0) + ", " + std::to_string(s.m0) +
                      "), the reference table lists (" + std::to_string(quoted.first) + ", " +
                      std::to_string(quoted.second) + ")");
    }
    return {pass, detail};
}

Outcome valleys()
{
    const SystemParams sys;
    double worst_zero = 0.0;
    for (int k = 1; k <= 60; ++k)
        worst_zero = std::max(
            worst_zero,
            std::abs(effective_parameters(sys, DriveParams{0.0, 2.0 * sys.Omega1 / k}).Omega1_eff));

    // n0 = 0 (saturation) requires omega_D > 2 (2 omega1 + omega2 + Omega1)
    const double saturation = 2.0 * counter_rotating_carriers(sys).mode1;
    bool saturated = true;
    for (int i = 1; i <= 2000; ++i) {
        const double w = saturation + 35.0 * i / 2000;
        for (auto conv : {DetuningConvention::signed_value, DetuningConvention::magnitude})
            saturated = saturated &&
                        effective_parameters(sys, DriveParams{0.0, w}, conv).Omega1_eff == sys.Omega1;
    }
    int unsaturated = 0;
    const double quoted = 2.0 * (2.0 * sys.omega1 + sys.omega2);
    for (int i = 1; i <= 1000; ++i) {
        const double w = quoted + (saturation - quoted) * i / 1001;
        unsaturated += effective_parameters(sys, DriveParams{0.0, w}).Omega1_eff != sys.Omega1;
    }
    if (unsaturated > 0)
        deviation(fmt("saturation Omega1_eff = Omega1 sets in above omega_D = %.3f", saturation) +
                  fmt(", not above 2(2 omega1 + omega2) = %.3f", quoted) + "; " +
                  std::to_string(unsaturated) + " of 1000 frequencies between them are unsaturated");

    const int n = 10000;
    double worst_slope = 0.0;
    std::vector<double> w(n), v(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        w[i] = 0.05 + (6.0 - 0.05) * i / (n - 1);
        const auto sb = find_sidebands(sys, DriveParams{0.0, w[i]});
        order[i] = sb.n0;
        v[i] = effective_parameters(sys, DriveParams{0.0, w[i]}, sb).Omega1_eff;
    }
    for (int i = 1; i < n; ++i)
        if (order[i] == order[i - 1])
            worst_slope = std::max(
                worst_slope, std::abs((v[i] - v[i - 1]) / (w[i] - w[i - 1]) - 0.5 * order[i]));
    return {worst_zero <= 1e-12 && saturated && worst_slope <= 1e-7,
            fmt("max |Omega1_eff| at zeros %.2e", worst_zero) +
                fmt(", saturated above %.3f: ", saturation) + (saturated ? "yes" : "no") +
                fmt(", max slope error %.2e", worst_slope)};
}

Outcome echo_rot_eff()
{
    Outcome out;
    for (double w : echo_frequencies) {
        const double theta = echo_theta(w);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = echo(variant_at(Variant::rotating, theta, w),
                            variant_at(Variant::effective, theta, w), AtomicState::level2,
                            EchoOptions{{}, 2});
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = r.min_fidelity() >= 0.99 && secs < 300.0 && r.warnings.empty();
        out.pass = out.pass && ok;
        out.detail += fmt("%.2f: ", w) + fmt("theta %.4f min F %.6f", theta, r.min_fidelity()) +
                      fmt(" (%.1f s); ", secs);
    }
    return out;
}

Outcome echo_tilde_and_superpositions()
{
    Outcome out;
    for (double w : echo_frequencies) {
        const double theta = echo_theta(w);
        const auto r = echo(variant_at(Variant::effective1_tilde, theta, w),
                            variant_at(Variant::jc3_tilde, theta, w), AtomicState::level2);
        out.pass = out.pass && r.min_fidelity() >= 0.9;
        out.detail += fmt("tilde %.2f: min F %.6f; ", w, r.min_fidelity());
    }
    double worst = 1.0;
    for (double w : echo_frequencies)
        for (auto atom : {AtomicState::minus12, AtomicState::plus13, AtomicState::plus23}) {
            const auto r = echo(variant_at(Variant::rotating, 0.01, w),
                                variant_at(Variant::effective, 0.01, w), atom, EchoOptions{{}, 2});
            worst = std::min(worst, r.min_fidelity());
        }
    out.pass = out.pass && worst >= 0.99;
    out.detail += fmt("superpositions at theta 0.01: min F %.6f", worst);
    return out;
}

Outcome sector_equivalence()
{
    const HilbertSpace space(6, 6);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.05, 2.5);
    double worst = 0.0;
    std::size_t sectors_checked = 0;
    for (int draw = 0; draw < 50; ++draw) {
        HamiltonianSpec s;
        s.sys = SystemParams{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        const Eigen::MatrixXcd h(assemble_terms(s, space).at(0.0));
        std::map<std::pair<int, int>, std::vector<Eigen::Index>> sectors;
        for (std::size_t i = 0; i < space.dim(); ++i) {
            const auto b = space.state(i);
            sectors[{b.n1 - (b.atom == 1), b.n2 - (b.atom == 2)}].push_back(
                static_cast<Eigen::Index>(i));
        }
        for (const auto& [key, idx] : sectors) {
            if (idx.size() != 3)
                continue;
            Eigen::MatrixXcd sub(3, 3);
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    sub(r, c) = h(idx[r], idx[c]);
            const double lowest =
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(sub).eigenvalues()(0);
            worst = std::max(worst,
                             std::abs(lowest - block_ground_energy(s.sys, {key.first, key.second + 1})));
            ++sectors_checked;
        }
    }
    return {worst <= 1e-10 && sectors_checked == 50u * 36u,
            fmt("%.0f sectors, max difference %.2e", static_cast<double>(sectors_checked), worst)};
}

Outcome integrity()
{
    Outcome out;
    const double drift =
        echo_norm_drifts.empty()
            ? 0.0
            : *std::max_element(echo_norm_drifts.begin(), echo_norm_drifts.end());
    const bool drift_ok = !echo_norm_drifts.empty() && drift <= 1e-8;

    const double w = 0.18;
    const double theta = echo_theta(w);
    const auto a = variant_at(Variant::rotating, theta, w);
    const auto b = variant_at(Variant::effective, theta, w);
    const HilbertSpace space(6, 6);
    const double dt = default_step(assemble_terms(a, space));
    EchoOptions coarse{{dt, default_leakage_threshold}, 2};
    EchoOptions fine{{0.5 * dt, default_leakage_threshold}, 2};
    const auto rc = echo(a, b, AtomicState::level2, coarse);
    const auto rf = echo(a, b, AtomicState::level2, fine);
    double halving = 0.0;
    for (std::size_t k = 0; k < rc.fidelity.size(); ++k)
        halving = std::max(halving, std::abs(rc.fidelity[k] - rf.fidelity[k]));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> t(0.0, 1000.0);
    double herm = 0.0;
    for (auto v : {Variant::jc_static, Variant::rotating, Variant::effective,
                   Variant::effective1_tilde, Variant::jc3_tilde}) {
        const auto tl = assemble_terms(variant_at(v, 0.7, 0.33), space);
        for (int i = 0; i < 20; ++i) {
            const Eigen::MatrixXcd m(tl.at(t(rng)));
            herm = std::max(herm, (m - m.adjoint()).cwiseAbs().maxCoeff());
        }
    }

    std::uniform_real_distribution<double> p(0.05, 2.0);
    std::uniform_real_distribution<double> wd(0.05, 6.0);
    double frame = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const SystemParams s{p(rng), p(rng), p(rng), p(rng), 0.05, 0.05};
        const DriveParams d = DriveParams::from_theta(p(rng), wd(rng));
        const auto sb = find_sidebands(s, d);
        const auto e = effective_parameters(s, d, sb);
        frame = std::max({frame, std::abs(sb.delta1 + e.Omega1_eff - 2 * e.omega1_eff - e.omega2_eff),
                          std::abs(sb.Delta_n0 - e.Omega1_eff - 2 * e.omega1_eff - e.omega2_eff),
                          std::abs(sb.delta2 + e.Omega2_eff - e.omega1_eff - 2 * e.omega2_eff),
                          std::abs(sb.Delta_m0 - e.Omega2_eff - e.omega1_eff - 2 * e.omega2_eff)});
    }

    double norm_err = 0.0;
    double rec_err = 0.0;
    double refl_err = 0.0;
    for (double x : {0.1, 1.0, 2.4048, 5.0, 12.5, 30.0, 80.0}) {
        const int nmax = static_cast<int>(x) + 60;
        const auto j = bessel_j_range(nmax, x);
        double sum = j[0] * j[0];
        double even = j[0];
        for (int n = 1; n <= nmax; ++n) {
            sum += 2.0 * j[n] * j[n];
            if (n % 2 == 0)
                even += 2.0 * j[n];
        }
        norm_err = std::max({norm_err, std::abs(sum - 1.0), std::abs(even - 1.0)});
        for (int n = 1; n < nmax; ++n) {
            const double lhs = j[n - 1] + j[n + 1];
            const double rhs = 2.0 * n / x * j[n];
            const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
            if (scale > 1e-250)
                rec_err = std::max(rec_err, std::abs(lhs - rhs) / std::max(scale, 1e-12));
        }
        for (int n = 0; n <= 40; ++n)
            refl_err = std::max(refl_err, std::abs(bessel_j(-n, x) - (n % 2 ? -1 : 1) * bessel_j(n, x)));
    }

    out.pass = drift_ok && halving <= 1e-6 && herm <= 1e-12 && frame <= 1e-12 &&
               norm_err <= 1e-10 && rec_err <= 1e-9 && refl_err == 0.0;
    out.detail = fmt("norm drift %.2e over ", drift) +
                 std::to_string(echo_norm_drifts.size()) + " echo runs" +
                 fmt(", dt halving %.2e", halving) + fmt(", Hermiticity %.2e", herm) +
                 fmt(", frame identities %.2e", frame) +
                 fmt(", Bessel normalization %.2e recurrence %.2e", norm_err, rec_err) +
                 fmt(" reflection %.2e", refl_err);
    return out;
}

Outcome driven_sequences()
{
    const auto mag = DetuningConvention::magnitude;
    const auto sgn = DetuningConvention::signed_value;
    const auto y1_path = path_scan(3.4, 0.7, 0.0, 0.0, mag);
    const auto y2_path = path_scan(5.0, 3.9, 0.0, 0.015, mag);
    const auto mixed_path = path_scan(6.0, 0.7, 0.0, 0.0, mag);
    const auto reference_mixed =
        labels({{0, 0}, {0, 1}, {0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
    if (mixed_path != reference_mixed)
        deviation("magnitude convention, 2theta 6 -> 0.7 at delta2 = 0: " + show(mixed_path) +
                  "; the reference sequence is " + show(reference_mixed));
    const auto s_y1_path = path_scan(3.4, 0.7, 0.0, 0.0, sgn);
    const auto s_y2_path = path_scan(5.0, 3.9, 0.0, 0.015, sgn);
    if (s_y1_path != y1_chain)
        deviation("signed convention, y1 path (2theta 3.4 -> 0.7): " + show(s_y1_path) +
                  " (effective cavity frequency <= 0, label pinned to the window edge)");
    if (s_y2_path != y2_chain)
        deviation("signed convention, y2 path (2theta 5 -> 3.9, delta2/Omega2 0 -> 0.015): " + show(s_y2_path) +
                  " (effective cavity frequency <= 0, label pinned to the window edge)");
    return {y1_path == y1_chain && y2_path == y2_chain,
            "magnitude convention: y1 path " + show(y1_path) + "; y2 path " + show(y2_path) +
                "; 2theta 6 -> 0.7 " + show(mixed_path)};
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "static y1 critical coupling", 1.0, y1_critical},
        {2, "static y2 critical coupling", 1.0, y2_critical},
        {3, "triple point", 5.0, triple},
        {4, "static phase sequences", 10.0, static_sequences},
        {5, "sideband table", 1.0, sideband_table},
        {6, "effective cavity frequency valleys", 1.0, valleys},
        {7, "echo, rotating vs effective", 1200.0, echo_rot_eff},
        {8, "echo, effective with counter terms vs effective JC", 600.0,
         echo_tilde_and_superpositions},
        {9, "sector spectrum equivalence", 30.0, sector_equivalence},
        {10, "numerical integrity", 600.0, integrity},
        {11, "driven phase sequences", 120.0, driven_sequences},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            o.pass = false;
            o.detail += fmt("; runtime %.1f s exceeds the budget", secs);
        }
        failures += !o.pass;
        std::printf("%s %2d %s [%.2f s]: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }

    std::ofstream log("acceptance_deviations.log");
    for (const auto& d : deviations)
        log << d << '\n';
    std::printf("%d of %zu criteria passed; %zu deviations logged to acceptance_deviations.log\n",
                static_cast<int>(criteria.size()) - failures, criteria.size(), deviations.size());
    return failures == 0 ? 0 : 1;
}
