// Dressed-state blocks of the two-mode Lambda JC Hamiltonian, global
// ground-state search and static phase diagrams.
#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lambdajc/eigen3x3.hpp"
#include "lambdajc/parallel.hpp"
#include "lambdajc/params.hpp"

namespace lambdajc {

/// Block label (n_ph, m_ph).
struct BlockLabel {
    int n = 0;
    int m = 0;
    friend auto operator<=>(const BlockLabel&, const BlockLabel&) = default;
};

inline std::string to_string(BlockLabel l)
{
    return "|" + std::to_string(l.n) + "," + std::to_string(l.m) + ">";
}

/// 3x3 block in the basis {|3,n,m-1>, |1,n+1,m-1>, |2,n,m>}.
///
/// Entries are taken literally for every n, m >= 0. For m = 0 that keeps the
/// Omega2 (m - 1) offset and the g1 coupling between the two formal m - 1 = -1
/// states; the physical one-dimensional sector |2,n,0> is not represented.
struct DressedBlock {
    int n_ph = 0;
    int m_ph = 0;
    Matrix3 matrix{};
};

inline DressedBlock block_matrix(const SystemParams& sys, int n_ph, int m_ph)
{
    if (n_ph < 0 || m_ph < 0)
        throw std::invalid_argument("block_matrix: photon indices must be non-negative");
    const double n = n_ph;
    const double m = m_ph;
    DressedBlock b{n_ph, m_ph, {}};
    auto& h = b.matrix;
    h[0][0] = sys.omega1 + sys.omega2 + sys.Omega1 * n + sys.Omega2 * (m - 1.0);
    h[1][1] = -sys.omega1 + sys.Omega1 * (n + 1.0) + sys.Omega2 * (m - 1.0);
    h[2][2] = -sys.omega2 + sys.Omega1 * n + sys.Omega2 * m;
    h[0][1] = h[1][0] = sys.g1 * std::sqrt(n + 1.0);
    h[0][2] = h[2][0] = sys.g2 * std::sqrt(m);
    h[1][2] = h[2][1] = 0.0;
    return b;
}

inline double block_ground_energy(const DressedBlock& block)
{
    return lowest_eigenvalue(block.matrix);
}

inline double block_ground_energy(const SystemParams& sys, BlockLabel l)
{
    return block_ground_energy(block_matrix(sys, l.n, l.m));
}

enum class PhaseCategory { normal, y1, y2, mixed };

inline std::string_view to_string(PhaseCategory c)
{
    switch (c) {
    case PhaseCategory::normal: return "normal";
    case PhaseCategory::y1: return "y1";
    case PhaseCategory::y2: return "y2";
    case PhaseCategory::mixed: return "mixed";
    }
    return "?";
}

inline PhaseCategory classify(BlockLabel l)
{
    if (l.n == 0 && l.m == 0)
        return PhaseCategory::normal;
    if (l.m == 0)
        return PhaseCategory::y1;
    if (l.n == 0)
        return PhaseCategory::y2;
    return PhaseCategory::mixed;
}

struct PhasePoint {
    BlockLabel label;
    PhaseCategory category = PhaseCategory::normal;
    double energy = 0.0;
    double gap = 0.0;            // distance to the runner-up block minimum
    bool on_window_edge = false; // label touches the search window boundary
    bool window_capped = false;  // a cavity frequency <= 0 pins the argmin to the edge
};

inline constexpr int default_static_block_window = 8;
inline constexpr int default_driven_block_window = 5;

/// Global minimum of the block ground energies over [0, window]^2.
/// Ties resolve to the lexicographically smallest (n, m).
inline PhasePoint ground_search(const SystemParams& sys, int block_window)
{
    if (block_window < 1)
        throw std::invalid_argument("ground_search: block_window must be >= 1");

    double best = std::numeric_limits<double>::infinity();
    double runner_up = std::numeric_limits<double>::infinity();
    BlockLabel arg{};
    for (int n = 0; n <= block_window; ++n) {
        for (int m = 0; m <= block_window; ++m) {
            const double e = block_ground_energy(block_matrix(sys, n, m));
            if (e < best) {
                runner_up = best;
                best = e;
                arg = {n, m};
            } else if (e < runner_up) {
                runner_up = e;
            }
        }
    }

    PhasePoint p;
    p.label = arg;
    p.category = classify(arg);
    p.energy = best;
    p.gap = runner_up - best;
    p.on_window_edge = arg.n == block_window || arg.m == block_window;
    p.window_capped = sys.Omega1 <= 0.0 || sys.Omega2 <= 0.0;
    return p;
}

struct PhotonNumbers {
    double mode1;
    double mode2;
};

/// <a1^dag a1>, <a2^dag a2> of the lowest eigenvector of block (n, m), with the
/// basis photon numbers taken formally (m - 1 = -1 for m = 0).
inline PhotonNumbers block_photon_numbers(const SystemParams& sys, BlockLabel l)
{
    const auto block = block_matrix(sys, l.n, l.m);
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m(i, j) = block.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m);
    const Eigen::Vector3d w = solver.eigenvectors().col(0).cwiseAbs2();
    const double n = l.n;
    const double mm = l.m;
    return {w(0) * n + w(1) * (n + 1.0) + w(2) * n,
            w(0) * (mm - 1.0) + w(1) * (mm - 1.0) + w(2) * mm};
}

/// Named, strictly increasing coordinate axis.
struct Axis {
    std::string name;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    static Axis linspace(std::string name, double start, double stop, std::size_t points)
    {
        Axis a{std::move(name), {}};
        if (points == 0)
            return a;
        a.values.resize(points);
        if (points == 1) {
            a.values[0] = start;
            return a;
        }
        for (std::size_t i = 0; i < points; ++i)
            a.values[i] = start + (stop - start) * static_cast<double>(i) /
                                      static_cast<double>(points - 1);
        return a;
    }

    void validate() const
    {
        if (values.empty())
            throw std::invalid_argument("axis '" + name + "' is empty");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i] > values[i - 1]))
                throw std::invalid_argument("axis '" + name + "' must be strictly increasing");
    }
};

/// Row-major grid of phase points: cell (i, j) sits at axis1[i], axis2[j].
struct PhaseGrid {
    Axis axis1;
    Axis axis2;
    std::vector<PhasePoint> cells;
    int block_window = default_static_block_window;

    const PhasePoint& at(std::size_t i, std::size_t j) const
    {
        return cells[i * axis2.size() + j];
    }
};

/// Evaluates cell(i, j) for every grid cell; results are stored by index so
/// the grid does not depend on the worker count.
template <typename CellFn>
std::vector<PhasePoint> evaluate_cells(std::size_t rows, std::size_t cols, unsigned workers,
                                       CellFn&& cell)
{
    std::vector<PhasePoint> out(rows * cols);
    parallel_for(out.size(), workers,
                 [&](std::size_t k) { out[k] = cell(k / cols, k % cols); });
    return out;
}

/// Static phase diagram over g1/Omega1 (axis1) and g2/Omega2 (axis2).
inline PhaseGrid phase_grid(const SystemParams& sys_template, const Axis& g1_over_Omega1,
                            const Axis& g2_over_Omega2,
                            int block_window = default_static_block_window,
                            unsigned workers = 1)
{
    g1_over_Omega1.validate();
    g2_over_Omega2.validate();
    PhaseGrid grid{g1_over_Omega1, g2_over_Omega2, {}, block_window};
    grid.cells = evaluate_cells(
        g1_over_Omega1.size(), g2_over_Omega2.size(), workers,
        [&](std::size_t i, std::size_t j) {
            SystemParams sys = sys_template;
            sys.g1 = g1_over_Omega1.values[i] * sys_template.Omega1;
            sys.g2 = g2_over_Omega2.values[j] * sys_template.Omega2;
            return ground_search(sys, block_window);
        });
    return grid;
}

/// Ordered list of distinct consecutive labels.
inline std::vector<BlockLabel> label_sequence(const std::vector<PhasePoint>& points)
{
    std::vector<BlockLabel> out;
    for (const auto& p : points)
        if (out.empty() || out.back() != p.label)
            out.push_back(p.label);
    return out;
}

using ParamLine = std::function<SystemParams(double)>;
using ParamPlane = std::function<SystemParams(double, double)>;

inline constexpr double default_boundary_tolerance = 1e-4;

/// Coordinate on [lo, hi] where the ground energies of blocks a and b cross,
/// by bisection on the sign of E_a - E_b.
inline double block_crossing(const ParamLine& line, BlockLabel a, BlockLabel b, double lo,
                             double hi, double tol = default_boundary_tolerance)
{
    auto diff = [&](double x) {
        const SystemParams sys = line(x);
        return block_ground_energy(sys, a) - block_ground_energy(sys, b);
    };
    double flo = diff(lo);
    const double fhi = diff(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("block_crossing: no sign change of E" + to_string(a) +
                                    " - E" + to_string(b) + " on the interval");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = diff(mid);
        if (fm == 0.0)
            return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct Transition {
    double at;
    BlockLabel before;
    BlockLabel after;
};

/// First ground-label change when moving from lo to hi along `line`.
/// The bracketing interval is narrowed on the label, then the crossing of
/// the two adjacent block energies is refined to `tol`.
inline Transition locate_transition(const ParamLine& line, int block_window, double lo, double hi,
                                    double tol = default_boundary_tolerance)
{
    const BlockLabel start = ground_search(line(lo), block_window).label;
    BlockLabel after = ground_search(line(hi), block_window).label;
    if (start == after)
        throw std::invalid_argument("locate_transition: no label change on the interval");
    const double narrow = std::min(tol, 1e-3 * (hi - lo));
    while (hi - lo > narrow) {
        const double mid = 0.5 * (lo + hi);
        const BlockLabel l = ground_search(line(mid), block_window).label;
        if (l == start) {
            lo = mid;
        } else {
            hi = mid;
            after = l;
        }
    }
    return {block_crossing(line, start, after, lo, hi, tol * 1e-3), start, after};
}

/// All label changes between adjacent samples of xs, each refined.
inline std::vector<Transition> transitions_along(const ParamLine& line, int block_window,
                                                 const std::vector<double>& xs,
                                                 double tol = default_boundary_tolerance)
{
    std::vector<Transition> out;
    if (xs.empty())
        return out;
    BlockLabel prev = ground_search(line(xs.front()), block_window).label;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const BlockLabel cur = ground_search(line(xs[i]), block_window).label;
        if (cur != prev) {
            out.push_back(locate_transition(line, block_window, xs[i - 1], xs[i], tol));
            prev = cur;
        }
    }
    return out;
}

struct PlanePoint {
    double x;
    double y;
};

/// Point where blocks a, b and c are simultaneously degenerate.
///
/// For each x the a/c crossing y(x) is found by bisection in y, then x is
/// bisected on the sign of E_a - E_b at (x, y(x)). Both crossings must be
/// bracketed by the supplied box.
inline PlanePoint triple_point(const ParamPlane& plane, BlockLabel a, BlockLabel b, BlockLabel c,
                               double x_lo, double x_hi, double y_lo, double y_hi,
                               double tol = 1e-10)
{
    auto y_of = [&](double x) {
        return block_crossing([&](double y) { return plane(x, y); }, a, c, y_lo, y_hi, tol);
    };
    auto diff_ab = [&](double x) {
        const SystemParams sys = plane(x, y_of(x));
        return block_ground_energy(sys, a) - block_ground_energy(sys, b);
    };
    double flo = diff_ab(x_lo);
    const double fhi = diff_ab(x_hi);
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("triple_point: a/b crossing not bracketed in x");
    while (x_hi - x_lo > tol) {
        const double mid = 0.5 * (x_lo + x_hi);
        const double fm = diff_ab(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            x_lo = mid;
            flo = fm;
        } else {
            x_hi = mid;
        }
    }
    const double x = 0.5 * (x_lo + x_hi);
    return {x, y_of(x)};
}

} // namespace lambdajc
