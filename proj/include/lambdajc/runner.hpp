// Sweep orchestration: cell evaluation in batches, append-only completion
// ledger, manifest-based caching and resume.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lambdajc/config.hpp"
#include "lambdajc/driven.hpp"
#include "lambdajc/effective.hpp"
#include "lambdajc/hilbert.hpp"
#include "lambdajc/io.hpp"
#include "lambdajc/parallel.hpp"
#include "lambdajc/propagate.hpp"
#include "lambdajc/spectrum.hpp"

namespace lambdajc {

enum class Command { static_phase, driven_phase, effective_params, echo };

inline std::string_view to_string(Command c)
{
    switch (c) {
    case Command::static_phase: return "static-phase";
    case Command::driven_phase: return "driven-phase";
    case Command::effective_params: return "effective-params";
    case Command::echo: return "echo";
    }
    return "?";
}

inline Command parse_command(std::string_view s)
{
    for (auto c : {Command::static_phase, Command::driven_phase, Command::effective_params,
                   Command::echo})
        if (to_string(c) == s)
            return c;
    throw ConfigError("unknown command '" + std::string(s) + "'");
}

/// Environment variable overriding the configured output directory.
inline constexpr const char* output_env_var = "LAMBDAJC_OUT";

enum ExitCode { exit_ok = 0, exit_config = 1, exit_runtime = 2 };

struct RunOptions {
    std::optional<std::filesystem::path> out_dir; // beats the environment and the config
    std::optional<unsigned> workers;              // beats the config
    bool strict = false;
    std::optional<std::size_t> stop_after;        // stop after computing this many cells
    std::size_t batch = 256;
};

struct RunReport {
    int exit_code = exit_ok;
    bool cache_hit = false;
    bool interrupted = false;
    std::size_t cells_total = 0;
    std::size_t cells_resumed = 0;
    std::size_t cells_computed = 0;
    std::vector<std::string> deviations;
    std::filesystem::path csv_path;
    std::filesystem::path manifest_path;
    std::string config_hash;
};

/// Sweep used when the config does not name one.
inline std::vector<SweepAxis> default_sweep(Command c)
{
    switch (c) {
    case Command::static_phase:
        return {{"g1/Omega1", 0.0, 5.0, 101, "g1"}, {"g2/Omega2", 0.0, 5.0, 101, "g2"}};
    case Command::driven_phase:
        return {{"2theta", 0.0, 6.0, 121, "A_D"}, {"delta2/Omega2", 0.0, 0.02, 81, "Omega2"}};
    case Command::effective_params: return {{"omega_D", 0.05, 6.0, 1191, "omega_D"}};
    case Command::echo: return {};
    }
    return {};
}

/// Resolves the output directory: options, then environment, then config.
inline std::filesystem::path resolve_output_dir(const RunConfig& cfg, const RunOptions& opt)
{
    if (opt.out_dir)
        return *opt.out_dir;
    if (const char* env = std::getenv(output_env_var); env != nullptr && *env != '\0')
        return env;
    return cfg.output;
}

namespace detail {

struct Manifest {
    std::string config_hash;
    std::string version;
    std::size_t cells_total = 0;
    std::size_t cells_done = 0;
    std::vector<std::string> deviations;
};

inline std::optional<Manifest> read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    try {
        const json j = json::parse(in);
        Manifest m;
        m.config_hash = j.at("config_hash").get<std::string>();
        m.version = j.at("version").get<std::string>();
        m.cells_total = j.at("cells_total").get<std::size_t>();
        m.cells_done = j.at("cells_done").get<std::size_t>();
        m.deviations = j.at("deviations").get<std::vector<std::string>>();
        return m;
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

inline void write_manifest(const std::filesystem::path& path, const Manifest& m)
{
    json j = {{"config_hash", m.config_hash},
              {"version", m.version},
              {"cells_total", m.cells_total},
              {"cells_done", m.cells_done},
              {"deviations", m.deviations}};
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

// Complete "index<TAB>row" lines; a torn trailing line is ignored.
inline std::map<std::size_t, std::string> read_ledger(const std::filesystem::path& path,
                                                      std::size_t total)
{
    std::map<std::size_t, std::string> rows;
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return rows;
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos)
            break;
        const std::string_view line(text.data() + pos, eol - pos);
        pos = eol + 1;
        const std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0)
            continue;
        std::size_t idx = 0;
        const auto res = std::from_chars(line.data(), line.data() + tab, idx);
        if (res.ec != std::errc() || res.ptr != line.data() + tab || idx >= total)
            continue;
        rows[idx] = std::string(line.substr(tab + 1));
    }
    return rows;
}

inline std::vector<std::string> split_csv(const std::string& row)
{
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
        const std::size_t c = row.find(',', start);
        f.push_back(row.substr(start, c == std::string::npos ? std::string::npos : c - start));
        if (c == std::string::npos)
            return f;
        start = c + 1;
    }
}

struct CellTask {
    std::size_t total = 0;
    std::vector<std::string> header;
    std::function<std::string(std::size_t)> row;
    std::function<void(const std::vector<std::string>&, std::vector<std::string>&)> summarize;
};

inline std::string count_message(std::size_t k, std::size_t n, const std::string& what)
{
    return std::to_string(k) + " of " + std::to_string(n) + " cells " + what;
}

// Sweep axes for a grid: a single axis gets a one-point placeholder second
// axis so that rows are indexed i1 * N2 + i2 throughout.
struct GridAxes {
    SweepAxis a1;
    std::optional<SweepAxis> a2;
    std::size_t n1() const { return a1.points; }
    std::size_t n2() const { return a2 ? a2->points : 1; }
};

inline GridAxes grid_axes(const std::vector<SweepAxis>& sweep, Command c)
{
    if (sweep.empty())
        throw ConfigError("config: '" + std::string(to_string(c)) + "' needs at least one sweep axis");
    return {sweep[0], sweep.size() > 1 ? std::optional<SweepAxis>(sweep[1]) : std::nullopt};
}

inline void check_cell_params(const SystemParams& sys, const DriveParams& drive, bool driven)
{
    try {
        sys.validate();
        if (driven)
            drive.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sweep produces invalid parameters: ") + e.what());
    }
}

inline CellTask static_task(const RunConfig& cfg)
{
    const GridAxes ax = grid_axes(cfg.sweep, Command::static_phase);
    for (const auto& a : cfg.sweep)
        if (a.parameter == "A_D" || a.parameter == "omega_D")
            throw ConfigError("config: 'static-phase' cannot sweep drive parameter '" +
                              a.parameter + "'");
    const Axis x1 = ax.a1.axis();
    const Axis x2 = ax.a2 ? ax.a2->axis() : Axis{"", {0.0}};
    const int window = cfg.truncation.block_window;
    CellTask t;
    t.total = ax.n1() * ax.n2();
    t.header = grid_columns();
    t.row = [cfg, ax, x1, x2, window](std::size_t k) {
        const std::size_t i = k / ax.n2();
        const std::size_t j = k % ax.n2();
        SystemParams sys = cfg.model;
        DriveParams drive = cfg.drive;
        apply_coordinate(ax.a1, x1.values[i], cfg.model, sys, drive);
        if (ax.a2)
            apply_coordinate(*ax.a2, x2.values[j], cfg.model, sys, drive);
        check_cell_params(sys, drive, false);
        const PhasePoint p = ground_search(sys, window);
        return grid_row(ax.a1.name, x1.values[i], ax.a2 ? &ax.a2->name : nullptr, x2.values[j],
                        p, true, true);
    };
    t.summarize = [window](const std::vector<std::string>& rows, std::vector<std::string>& dev) {
        std::size_t edge = 0;
        const std::string w = std::to_string(window);
        for (const auto& r : rows) {
            const auto f = split_csv(r);
            if (f[5] == w || f[6] == w)
                ++edge;
        }
        if (edge > 0)
            dev.push_back("static-phase: " +
                          count_message(edge, rows.size(),
                                        "have the ground label on the block-window edge (window " +
                                            w + "); enlarge truncation.block_window"));
    };
    return t;
}

inline void summarize_validity(const std::vector<std::string>& rows, std::size_t rwa_col,
                               std::optional<std::size_t> hierarchy_col,
                               std::optional<std::size_t> capped_col, std::string_view cmd,
                               std::vector<std::string>& dev)
{
    std::size_t rwa = 0, hier = 0, capped = 0;
    for (const auto& r : rows) {
        const auto f = split_csv(r);
        rwa += f[rwa_col] == "false";
        if (hierarchy_col)
            hier += f[*hierarchy_col] == "false";
        if (capped_col)
            capped += f[*capped_col] == "true";
    }
    const std::string c(cmd);
    if (rwa > 0)
        dev.push_back("validity: " + c + ": " +
                      count_message(rwa, rows.size(), "violate the 0.01 counter-rotating rule"));
    if (hier > 0)
        dev.push_back("validity: " + c + ": " +
                      count_message(hier, rows.size(), "violate the frequency hierarchy"));
    if (capped > 0)
        dev.push_back(c + ": " + count_message(capped, rows.size(),
                                               "are window-capped (effective cavity frequency "
                                               "<= 0)"));
}

inline CellTask driven_task(const RunConfig& cfg)
{
    const GridAxes ax = grid_axes(cfg.sweep, Command::driven_phase);
    const Axis x1 = ax.a1.axis();
    const Axis x2 = ax.a2 ? ax.a2->axis() : Axis{"", {0.0}};
    DrivenOptions opt;
    opt.block_window = cfg.truncation.driven_block_window;
    opt.convention = cfg.effective.detuning_convention;
    opt.hierarchy_threshold = cfg.effective.hierarchy_threshold;
    CellTask t;
    t.total = ax.n1() * ax.n2();
    t.header = grid_columns();
    t.row = [cfg, ax, x1, x2, opt](std::size_t k) {
        const std::size_t i = k / ax.n2();
        const std::size_t j = k % ax.n2();
        SystemParams sys = cfg.model;
        DriveParams drive = cfg.drive;
        apply_coordinate(ax.a1, x1.values[i], cfg.model, sys, drive);
        if (ax.a2)
            apply_coordinate(*ax.a2, x2.values[j], cfg.model, sys, drive);
        check_cell_params(sys, drive, true);
        const auto p = driven_phase_point(sys, drive, opt);
        return grid_row(ax.a1.name, x1.values[i], ax.a2 ? &ax.a2->name : nullptr, x2.values[j],
                        p.point, p.validity.rwa_ok, p.validity.hierarchy_ok);
    };
    t.summarize = [](const std::vector<std::string>& rows, std::vector<std::string>& dev) {
        summarize_validity(rows, 10, 11, 9, "driven-phase", dev);
    };
    return t;
}

inline CellTask effective_task(const RunConfig& cfg)
{
    const GridAxes ax = grid_axes(cfg.sweep, Command::effective_params);
    const Axis x1 = ax.a1.axis();
    const Axis x2 = ax.a2 ? ax.a2->axis() : Axis{"", {0.0}};
    CellTask t;
    t.total = ax.n1() * ax.n2();
    t.header = effective_columns();
    t.row = [cfg, ax, x1, x2](std::size_t k) {
        const std::size_t i = k / ax.n2();
        const std::size_t j = k % ax.n2();
        SystemParams sys = cfg.model;
        DriveParams drive = cfg.drive;
        apply_coordinate(ax.a1, x1.values[i], cfg.model, sys, drive);
        if (ax.a2)
            apply_coordinate(*ax.a2, x2.values[j], cfg.model, sys, drive);
        check_cell_params(sys, drive, true);
        const auto sb = find_sidebands(sys, drive);
        const auto eff = effective_parameters(sys, drive, sb, cfg.effective.detuning_convention);
        const auto val =
            validity_report(sys, drive, sb, eff, cfg.effective.hierarchy_threshold);
        return effective_row(drive, sb, eff, val.rwa_ok);
    };
    t.summarize = [](const std::vector<std::string>& rows, std::vector<std::string>& dev) {
        summarize_validity(rows, 14, std::nullopt, std::nullopt, "effective-params", dev);
    };
    return t;
}

// Runs the echo of the configured variant pair and returns its CSV rows.
inline std::vector<std::string> echo_rows(const RunConfig& cfg, unsigned workers,
                                          std::vector<std::string>& dev)
{
    const auto& d = cfg.dynamics;
    HilbertSpace space(cfg.truncation.n_c1, cfg.truncation.n_c2);
    const StateVector psi0 = [&] {
        try {
            return coherent_state(space, d.alpha1, d.alpha2, parse_atomic_state(d.initial_state));
        } catch (const TruncationError& e) {
            throw ConfigError(std::string("config: 'truncation': ") + e.what());
        }
    }();
    HamiltonianSpec a;
    a.variant = parse_variant(d.variants[0]);
    a.sys = cfg.model;
    a.drive = cfg.drive;
    a.sideband_eps = cfg.truncation.sideband_eps;
    a.convention = cfg.effective.detuning_convention;
    HamiltonianSpec b = a;
    b.variant = parse_variant(d.variants[1]);

    EchoOptions opt;
    opt.evolve.dt_max = d.dt_max;
    opt.evolve.leakage_threshold = d.leakage_threshold;
    opt.workers = workers;
    EchoResult echo;
    try {
        echo = loschmidt_echo(a, b, psi0, d.t_max, d.samples, opt);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: 'dynamics': ") + e.what());
    }

    for (const auto& w : echo.warnings)
        dev.push_back("validity: echo: " + w);
    if (echo.norm_drift > 1e-8)
        dev.push_back("validity: echo: norm drift " + format_double(echo.norm_drift) +
                      " exceeds 1e-8");
    std::vector<std::string> rows;
    rows.reserve(echo.times.size());
    for (std::size_t k = 0; k < echo.times.size(); ++k)
        rows.push_back(echo_row(echo, k));
    return rows;
}

inline bool has_validity_violation(const std::vector<std::string>& dev)
{
    return std::any_of(dev.begin(), dev.end(),
                       [](const std::string& s) { return s.rfind("validity:", 0) == 0; });
}

inline void log_line(std::ostream* log, const std::string& s)
{
    if (log)
        *log << s << '\n';
}

} // namespace detail

/// Executes `command`. Throws ConfigError for configuration problems; other
/// exceptions are runtime failures.
inline RunReport run(Command command, RunConfig cfg, const RunOptions& opt = {},
                     std::ostream* log = nullptr)
{
    using namespace detail;
    if (cfg.sweep.empty())
        cfg.sweep = default_sweep(command);
    const unsigned workers = opt.workers.value_or(cfg.workers == 0 ? auto_workers() : cfg.workers);
    const std::string name(to_string(command));
    const std::filesystem::path dir = resolve_output_dir(cfg, opt);
    std::filesystem::create_directories(dir);

    RunReport rep;
    rep.config_hash = config_hash(cfg, name);
    rep.csv_path = dir / (name + ".csv");
    rep.manifest_path = dir / (name + ".manifest.json");
    const auto ledger_path = dir / (name + ".ledger");

    auto finish_code = [&] {
        return opt.strict && has_validity_violation(rep.deviations) ? exit_runtime : exit_ok;
    };

    const auto previous = read_manifest(rep.manifest_path);
    const bool same_config = previous && previous->config_hash == rep.config_hash;
    if (same_config && previous->cells_done == previous->cells_total &&
        std::filesystem::exists(rep.csv_path)) {
        rep.cache_hit = true;
        rep.cells_total = previous->cells_total;
        rep.deviations = previous->deviations;
        rep.exit_code = finish_code();
        log_line(log, name + ": cache hit (" + rep.config_hash + "), nothing recomputed");
        return rep;
    }

    Manifest manifest{rep.config_hash, std::string(version), 0, 0, {}};

    if (command == Command::echo) {
        rep.cells_total = manifest.cells_total = 1;
        write_manifest(rep.manifest_path, manifest);
        const auto rows = echo_rows(cfg, workers, rep.deviations);
        write_csv(rep.csv_path, echo_columns(), rows);
        rep.cells_computed = 1;
        manifest.cells_done = 1;
        manifest.deviations = rep.deviations;
        write_manifest(rep.manifest_path, manifest);
        for (const auto& d : rep.deviations)
            log_line(log, "warning: " + d);
        rep.exit_code = finish_code();
        return rep;
    }

    CellTask task = command == Command::static_phase   ? static_task(cfg)
                    : command == Command::driven_phase ? driven_task(cfg)
                                                       : effective_task(cfg);
    rep.cells_total = manifest.cells_total = task.total;

    std::map<std::size_t, std::string> done;
    if (same_config)
        done = read_ledger(ledger_path, task.total);
    else
        std::filesystem::remove(ledger_path);
    rep.cells_resumed = done.size();
    manifest.cells_done = done.size();
    write_manifest(rep.manifest_path, manifest);
    if (!done.empty())
        log_line(log, name + ": resuming with " + std::to_string(done.size()) + " of " +
                          std::to_string(task.total) + " cells from the ledger");

    // Rewrite the ledger without torn or duplicate lines before appending.
    {
        std::ofstream ledger(ledger_path, std::ios::binary | std::ios::trunc);
        for (const auto& [k, row] : done)
            ledger << k << '\t' << row << '\n';
        if (!ledger)
            throw std::runtime_error("cannot write ledger '" + ledger_path.string() + "'");
    }
    std::ofstream ledger(ledger_path, std::ios::binary | std::ios::app);

    std::vector<std::size_t> pending;
    for (std::size_t k = 0; k < task.total; ++k)
        if (!done.count(k))
            pending.push_back(k);

    std::size_t budget = opt.stop_after.value_or(pending.size());
    const std::size_t batch = std::max<std::size_t>(1, opt.batch);
    for (std::size_t start = 0; start < pending.size() && budget > 0;) {
        const std::size_t n = std::min({batch, pending.size() - start, budget});
        std::vector<std::string> rows(n);
        parallel_for(n, workers, [&](std::size_t i) { rows[i] = task.row(pending[start + i]); });
        for (std::size_t i = 0; i < n; ++i) {
            ledger << pending[start + i] << '\t' << rows[i] << '\n';
            done.emplace(pending[start + i], std::move(rows[i]));
        }
        ledger.flush();
        if (!ledger)
            throw std::runtime_error("cannot append to ledger '" + ledger_path.string() + "'");
        rep.cells_computed += n;
        budget -= n;
        start += n;
    }
    ledger.close();

    manifest.cells_done = done.size();
    if (done.size() < task.total) {
        write_manifest(rep.manifest_path, manifest);
        rep.interrupted = true;
        rep.exit_code = exit_runtime;
        log_line(log, name + ": stopped after " + std::to_string(rep.cells_computed) +
                          " cells; rerun to resume");
        return rep;
    }

    std::vector<std::string> rows;
    rows.reserve(task.total);
    for (auto& [k, row] : done)
        rows.push_back(std::move(row));
    task.summarize(rows, rep.deviations);
    write_csv(rep.csv_path, task.header, rows);
    manifest.deviations = rep.deviations;
    write_manifest(rep.manifest_path, manifest);
    std::filesystem::remove(ledger_path);
    for (const auto& d : rep.deviations)
        log_line(log, "warning: " + d);
    rep.exit_code = finish_code();
    return rep;
}

} // namespace lambdajc
