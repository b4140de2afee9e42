// Phase diagrams of the driven system: the block engine evaluated with the
// drive-renormalised parameters.
#pragma once

#include <cstddef>
#include <functional>

#include "lambdajc/effective.hpp"
#include "lambdajc/spectrum.hpp"

namespace lambdajc {

struct DrivenOptions {
    int block_window = default_driven_block_window;
    DetuningConvention convention = DetuningConvention::signed_value;
    double hierarchy_threshold = default_hierarchy_threshold;
};

struct DrivenPhasePoint {
    PhasePoint point;
    SidebandInfo sidebands;
    EffectiveParams effective;
    ValidityReport validity;
};

inline DrivenPhasePoint driven_phase_point(const SystemParams& sys, const DriveParams& drive,
                                           const DrivenOptions& opt = {})
{
    DrivenPhasePoint out;
    out.sidebands = find_sidebands(sys, drive);
    out.effective = effective_parameters(sys, drive, out.sidebands, opt.convention);
    out.validity =
        validity_report(sys, drive, out.sidebands, out.effective, opt.hierarchy_threshold);
    out.point = ground_search(out.effective.as_jc_params(), opt.block_window);
    out.point.window_capped = out.effective.nonpositive_cavity();
    return out;
}

struct DrivenPhaseGrid {
    PhaseGrid grid;
    std::vector<ValidityReport> validity; // same indexing as grid.cells
};

/// Maps axis coordinates (x1, x2) onto the static and drive parameters.
using DrivenCellMap =
    std::function<void(double x1, double x2, SystemParams& sys, DriveParams& drive)>;

/// Driven phase diagram over two arbitrary coordinates.
inline DrivenPhaseGrid driven_phase_grid(const SystemParams& sys_template,
                                         const DriveParams& drive_template, const Axis& axis1,
                                         const Axis& axis2, const DrivenCellMap& map,
                                         const DrivenOptions& opt = {}, unsigned workers = 1)
{
    axis1.validate();
    axis2.validate();
    DrivenPhaseGrid out;
    out.grid = PhaseGrid{axis1, axis2, {}, opt.block_window};
    out.grid.cells.resize(axis1.size() * axis2.size());
    out.validity.resize(out.grid.cells.size());
    parallel_for(out.grid.cells.size(), workers, [&](std::size_t k) {
        SystemParams sys = sys_template;
        DriveParams drive = drive_template;
        map(axis1.values[k / axis2.size()], axis2.values[k % axis2.size()], sys, drive);
        const auto p = driven_phase_point(sys, drive, opt);
        out.grid.cells[k] = p.point;
        out.validity[k] = p.validity;
    });
    return out;
}

/// Realises a 2 theta coordinate through the amplitude at fixed omega_D.
inline void set_two_theta(double two_theta, DriveParams& drive)
{
    drive.amplitude = 0.5 * two_theta * drive.frequency;
}

/// Realises delta2/Omega2 = x by moving Omega2 at fixed atomic frequencies.
inline void set_delta2_ratio(double x, SystemParams& sys)
{
    sys.Omega2 = (2.0 * sys.omega2 + sys.omega1) / (1.0 + x);
}

/// Realises delta1/Omega1 = x by moving Omega1 at fixed atomic frequencies.
inline void set_delta1_ratio(double x, SystemParams& sys)
{
    sys.Omega1 = (2.0 * sys.omega1 + sys.omega2) / (1.0 + x);
}

} // namespace lambdajc
