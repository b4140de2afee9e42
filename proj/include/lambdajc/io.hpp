// CSV rows and files for phase grids, effective parameters and echoes.
#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lambdajc/driven.hpp"
#include "lambdajc/effective.hpp"
#include "lambdajc/propagate.hpp"
#include "lambdajc/spectrum.hpp"

namespace lambdajc {

/// 17 significant digits, round-trip exact.
inline std::string format_double(double v)
{
    if (v == 0.0)
        v = 0.0; // drop the sign of negative zero
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (res.ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

inline std::string csv_join(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out += ',';
        out += fields[i];
    }
    return out;
}

inline const std::vector<std::string>& grid_columns()
{
    static const std::vector<std::string> c = {
        "axis1_name", "axis1_value", "axis2_name", "axis2_value", "energy",  "n_label",
        "m_label",    "category",    "gap",        "window_capped", "rwa_ok", "hierarchy_ok"};
    return c;
}

inline const std::vector<std::string>& echo_columns()
{
    static const std::vector<std::string> c = {"t", "fidelity", "norm_a", "norm_b", "leakage"};
    return c;
}

inline const std::vector<std::string>& effective_columns()
{
    static const std::vector<std::string> c = {
        "omega_D",    "theta",      "n0",         "m0",         "Delta_n0",
        "Delta_m0",   "Omega1_eff", "Omega2_eff", "omega1_eff", "omega2_eff",
        "gr1",        "gr2",        "gc1",        "gc2",        "rwa_ok"};
    return c;
}

/// One grid row. A missing second axis leaves its two fields empty.
inline std::string grid_row(const std::string& axis1_name, double x1, const std::string* axis2_name,
                            double x2, const PhasePoint& p, bool rwa_ok, bool hierarchy_ok)
{
    return csv_join({axis1_name, format_double(x1), axis2_name ? *axis2_name : std::string(),
                     axis2_name ? format_double(x2) : std::string(), format_double(p.energy),
                     std::to_string(p.label.n), std::to_string(p.label.m),
                     std::string(to_string(p.category)), format_double(p.gap),
                     format_bool(p.window_capped), format_bool(rwa_ok),
                     format_bool(hierarchy_ok)});
}

inline std::string effective_row(const DriveParams& drive, const SidebandInfo& sb,
                                 const EffectiveParams& e, bool rwa_ok)
{
    return csv_join({format_double(drive.frequency), format_double(drive.theta()),
                     std::to_string(sb.n0), std::to_string(sb.m0), format_double(sb.Delta_n0),
                     format_double(sb.Delta_m0), format_double(e.Omega1_eff),
                     format_double(e.Omega2_eff), format_double(e.omega1_eff),
                     format_double(e.omega2_eff), format_double(e.gr1), format_double(e.gr2),
                     format_double(e.gc1), format_double(e.gc2), format_bool(rwa_ok)});
}

inline std::string echo_row(const EchoResult& echo, std::size_t k)
{
    return csv_join({format_double(echo.times[k]), format_double(echo.fidelity[k]),
                     format_double(echo.norm_a[k]), format_double(echo.norm_b[k]),
                     format_double(echo.leakage[k])});
}

/// Writes header and rows, replacing the file atomically.
inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::string>& rows)
{
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << csv_join(header) << '\n';
        for (const auto& r : rows)
            out << r << '\n';
        if (!out)
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw std::runtime_error("cannot move '" + tmp.string() + "' to '" + path.string() +
                                 "': " + ec.message());
}

/// Grid CSV of a phase grid; validity columns default to true for static
/// grids.
inline void write_grid_csv(const PhaseGrid& grid, const std::filesystem::path& path,
                           const std::vector<ValidityReport>* validity = nullptr)
{
    std::vector<std::string> rows;
    rows.reserve(grid.cells.size());
    for (std::size_t i = 0; i < grid.axis1.size(); ++i)
        for (std::size_t j = 0; j < grid.axis2.size(); ++j) {
            const std::size_t k = i * grid.axis2.size() + j;
            const bool rwa = validity ? (*validity)[k].rwa_ok : true;
            const bool hier = validity ? (*validity)[k].hierarchy_ok : true;
            rows.push_back(grid_row(grid.axis1.name, grid.axis1.values[i], &grid.axis2.name,
                                    grid.axis2.values[j], grid.cells[k], rwa, hier));
        }
    write_csv(path, grid_columns(), rows);
}

inline void write_grid_csv(const DrivenPhaseGrid& grid, const std::filesystem::path& path)
{
    write_grid_csv(grid.grid, path, &grid.validity);
}

inline void write_echo_csv(const EchoResult& echo, const std::filesystem::path& path)
{
    std::vector<std::string> rows;
    rows.reserve(echo.times.size());
    for (std::size_t k = 0; k < echo.times.size(); ++k)
        rows.push_back(echo_row(echo, k));
    write_csv(path, echo_columns(), rows);
}

} // namespace lambdajc
