// JSON run configuration: parsing with defaults, validation, canonical form
// and content hash.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lambdajc/effective.hpp"
#include "lambdajc/hamiltonian.hpp"
#include "lambdajc/hilbert.hpp"
#include "lambdajc/params.hpp"
#include "lambdajc/propagate.hpp"
#include "lambdajc/spectrum.hpp"

#ifndef LAMBDAJC_VERSION
#define LAMBDAJC_VERSION "0.0.0"
#endif

namespace lambdajc {

using json = nlohmann::json;

inline constexpr std::string_view version = LAMBDAJC_VERSION;

/// Invalid or unknown configuration entry.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One swept coordinate. `name` is the plotted coordinate, `parameter` the
/// field it moves.
struct SweepAxis {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    std::size_t points = 1;
    std::string parameter;

    Axis axis() const { return Axis::linspace(name, start, stop, points); }
};

struct TruncationConfig {
    int n_c1 = 6;
    int n_c2 = 6;
    int block_window = default_static_block_window;
    int driven_block_window = default_driven_block_window;
    double sideband_eps = default_sideband_eps;
};

struct DynamicsConfig {
    double t_max = 200.0;
    std::optional<double> dt_max;
    std::size_t samples = 2000;
    std::string initial_state = "2";
    double alpha1 = 0.01;
    double alpha2 = 0.01;
    std::vector<std::string> variants = {"H_rot", "H_eff"};
    double leakage_threshold = default_leakage_threshold;
};

struct EffectiveConfig {
    DetuningConvention detuning_convention = DetuningConvention::signed_value;
    double hierarchy_threshold = default_hierarchy_threshold;
};

struct RunConfig {
    SystemParams model;
    DriveParams drive;
    TruncationConfig truncation;
    std::vector<SweepAxis> sweep; // empty: the command's default sweep
    DynamicsConfig dynamics;
    EffectiveConfig effective;
    std::string output = "out";
    unsigned workers = 0; // 0 = auto
};

/// Coordinate names and the parameter each one may drive.
struct CoordinateRule {
    std::string_view name;
    std::string_view parameter;
};

inline constexpr CoordinateRule coordinate_rules[] = {
    {"g1/Omega1", "g1"},         {"g2/Omega2", "g2"},         {"g1", "g1"},
    {"g2", "g2"},                {"theta", "A_D"},            {"2theta", "A_D"},
    {"A_D", "A_D"},              {"omega_D", "omega_D"},      {"delta1/Omega1", "Omega1"},
    {"delta2/Omega2", "Omega2"}, {"Omega1", "Omega1"},        {"Omega2", "Omega2"},
};

inline constexpr std::string_view sweep_parameters[] = {"g1", "g2", "A_D", "omega_D", "Omega1",
                                                        "Omega2"};

/// Applies coordinate value x of `axis` to the parameters.
///
/// Ratios refer to the template values: g1/Omega1 scales by the unswept
/// Omega1, theta and 2theta hold omega_D fixed, and an omega_D axis holds
/// A_D fixed.
inline void apply_coordinate(const SweepAxis& axis, double x, const SystemParams& base,
                             SystemParams& sys, DriveParams& drive)
{
    const std::string& n = axis.name;
    if (n == "g1/Omega1")
        sys.g1 = x * base.Omega1;
    else if (n == "g2/Omega2")
        sys.g2 = x * base.Omega2;
    else if (n == "g1")
        sys.g1 = x;
    else if (n == "g2")
        sys.g2 = x;
    else if (n == "theta")
        drive.amplitude = x * drive.frequency;
    else if (n == "2theta")
        drive.amplitude = 0.5 * x * drive.frequency;
    else if (n == "A_D")
        drive.amplitude = x;
    else if (n == "omega_D")
        drive.frequency = x;
    else if (n == "delta1/Omega1")
        sys.Omega1 = (2.0 * sys.omega1 + sys.omega2) / (1.0 + x);
    else if (n == "delta2/Omega2")
        sys.Omega2 = (2.0 * sys.omega2 + sys.omega1) / (1.0 + x);
    else if (n == "Omega1")
        sys.Omega1 = x;
    else if (n == "Omega2")
        sys.Omega2 = x;
    else
        throw ConfigError("sweep: unknown coordinate '" + n + "'");
}

namespace detail {

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<std::string_view> allowed)
{
    if (!obj.is_object())
        throw ConfigError("config: '" + (path.empty() ? std::string("<root>") : path) +
                          "' must be an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (auto a : allowed)
            known = known || item.key() == a;
        if (!known)
            throw ConfigError("config: unknown key '" +
                              (path.empty() ? item.key() : path + "." + item.key()) + "'");
    }
}

inline std::string join(const std::string& path, std::string_view key)
{
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline double get_number(const json& obj, const std::string& path, std::string_view key,
                         double fallback)
{
    const auto it = obj.find(std::string(key));
    if (it == obj.end())
        return fallback;
    if (!it->is_number())
        throw ConfigError("config: '" + join(path, key) + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v))
        throw ConfigError("config: '" + join(path, key) + "' must be finite");
    return v;
}

inline long long get_integer(const json& obj, const std::string& path, std::string_view key,
                             long long fallback)
{
    const auto it = obj.find(std::string(key));
    if (it == obj.end())
        return fallback;
    if (it->is_number_integer())
        return it->get<long long>();
    if (it->is_number_float()) {
        const double v = it->get<double>();
        if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15)
            return static_cast<long long>(v);
    }
    throw ConfigError("config: '" + join(path, key) + "' must be an integer");
}

inline std::string get_string(const json& obj, const std::string& path, std::string_view key,
                              const std::string& fallback)
{
    const auto it = obj.find(std::string(key));
    if (it == obj.end())
        return fallback;
    if (!it->is_string())
        throw ConfigError("config: '" + join(path, key) + "' must be a string");
    return it->get<std::string>();
}

inline void require(bool ok, const std::string& field, const std::string& constraint)
{
    if (!ok)
        throw ConfigError("config: '" + field + "': constraint violated: " + constraint);
}

template <typename Fn>
void rethrow_as_config(const std::string& block, Fn&& fn)
{
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: '" + block + "': " + e.what());
    }
}

} // namespace detail

/// Parses a configuration document, applying defaults and validating every
/// field. Unknown keys at any level are rejected.
inline RunConfig parse_config_document(const json& doc)
{
    using namespace detail;
    RunConfig cfg;
    const json root = doc.is_null() ? json::object() : doc;
    reject_unknown(root, "", {"model", "drive", "truncation", "sweep", "dynamics", "effective",
                              "output", "workers"});

    if (root.contains("model")) {
        const auto& m = root["model"];
        reject_unknown(m, "model", {"omega1", "omega2", "Omega1", "Omega2", "g1", "g2"});
        auto& s = cfg.model;
        s.omega1 = get_number(m, "model", "omega1", s.omega1);
        s.omega2 = get_number(m, "model", "omega2", s.omega2);
        s.Omega1 = get_number(m, "model", "Omega1", s.Omega1);
        s.Omega2 = get_number(m, "model", "Omega2", s.Omega2);
        s.g1 = get_number(m, "model", "g1", s.g1);
        s.g2 = get_number(m, "model", "g2", s.g2);
    }
    rethrow_as_config("model", [&] { cfg.model.validate(); });

    if (root.contains("drive")) {
        const auto& d = root["drive"];
        reject_unknown(d, "drive", {"amplitude", "theta", "frequency"});
        if (d.contains("amplitude") && d.contains("theta"))
            throw ConfigError("config: 'drive' takes either 'amplitude' or 'theta', not both");
        cfg.drive.frequency = get_number(d, "drive", "frequency", cfg.drive.frequency);
        require(cfg.drive.frequency > 0.0, "drive.frequency", "frequency > 0");
        if (d.contains("theta"))
            cfg.drive.amplitude = get_number(d, "drive", "theta", 0.0) * cfg.drive.frequency;
        else
            cfg.drive.amplitude = get_number(d, "drive", "amplitude", cfg.drive.amplitude);
    }
    rethrow_as_config("drive", [&] { cfg.drive.validate(); });

    if (root.contains("truncation")) {
        const auto& t = root["truncation"];
        reject_unknown(t, "truncation",
                       {"n_c1", "n_c2", "block_window", "driven_block_window", "sideband_eps"});
        auto& tr = cfg.truncation;
        tr.n_c1 = static_cast<int>(get_integer(t, "truncation", "n_c1", tr.n_c1));
        tr.n_c2 = static_cast<int>(get_integer(t, "truncation", "n_c2", tr.n_c2));
        tr.block_window =
            static_cast<int>(get_integer(t, "truncation", "block_window", tr.block_window));
        tr.driven_block_window = static_cast<int>(
            get_integer(t, "truncation", "driven_block_window", tr.driven_block_window));
        tr.sideband_eps = get_number(t, "truncation", "sideband_eps", tr.sideband_eps);
    }
    require(cfg.truncation.n_c1 >= 1, "truncation.n_c1", "n_c1 >= 1");
    require(cfg.truncation.n_c2 >= 1, "truncation.n_c2", "n_c2 >= 1");
    require(cfg.truncation.block_window >= 1, "truncation.block_window", "block_window >= 1");
    require(cfg.truncation.driven_block_window >= 1, "truncation.driven_block_window",
            "driven_block_window >= 1");
    require(cfg.truncation.sideband_eps > 0.0, "truncation.sideband_eps", "sideband_eps > 0");

    if (root.contains("sweep")) {
        const auto& sw = root["sweep"];
        if (!sw.is_array())
            throw ConfigError("config: 'sweep' must be an array of axis objects");
        if (sw.size() > 2)
            throw ConfigError("config: 'sweep' takes at most two axes");
        for (std::size_t i = 0; i < sw.size(); ++i) {
            const std::string path = "sweep[" + std::to_string(i) + "]";
            const auto& a = sw[i];
            reject_unknown(a, path, {"name", "start", "stop", "points", "parameter"});
            for (auto key : {"name", "start", "stop", "points"})
                if (!a.contains(key))
                    throw ConfigError("config: '" + path + "." + key + "' is required");
            SweepAxis ax;
            ax.name = get_string(a, path, "name", "");
            ax.start = get_number(a, path, "start", 0.0);
            ax.stop = get_number(a, path, "stop", 0.0);
            const long long points = get_integer(a, path, "points", 1);
            require(points >= 1, path + ".points", "points >= 1");
            ax.points = static_cast<std::size_t>(points);
            require(ax.points == 1 || ax.stop > ax.start, path + ".stop", "stop > start");
            const CoordinateRule* rule = nullptr;
            for (const auto& r : coordinate_rules)
                if (r.name == ax.name)
                    rule = &r;
            if (rule == nullptr)
                throw ConfigError("config: '" + path + ".name': unknown coordinate '" + ax.name +
                                  "'");
            ax.parameter = get_string(a, path, "parameter", std::string(rule->parameter));
            bool known = false;
            for (auto p : sweep_parameters)
                known = known || p == ax.parameter;
            if (!known)
                throw ConfigError("config: '" + path + ".parameter': unknown parameter '" +
                                  ax.parameter +
                                  "' (expected g1, g2, A_D, omega_D, Omega1 or Omega2)");
            if (ax.parameter != rule->parameter)
                throw ConfigError("config: '" + path + "': coordinate '" + ax.name +
                                  "' moves parameter '" + std::string(rule->parameter) +
                                  "', not '" + ax.parameter + "'");
            cfg.sweep.push_back(std::move(ax));
        }
        if (cfg.sweep.size() == 2 && cfg.sweep[0].parameter == cfg.sweep[1].parameter)
            throw ConfigError("config: 'sweep' axes must move different parameters");
    }

    if (root.contains("dynamics")) {
        const auto& d = root["dynamics"];
        reject_unknown(d, "dynamics",
                       {"t_max", "dt_max", "samples", "initial_state", "alpha1", "alpha2",
                        "variants", "leakage_threshold"});
        auto& dy = cfg.dynamics;
        dy.t_max = get_number(d, "dynamics", "t_max", dy.t_max);
        if (d.contains("dt_max") && !d["dt_max"].is_null() &&
            !(d["dt_max"].is_string() && d["dt_max"] == "auto"))
            dy.dt_max = get_number(d, "dynamics", "dt_max", 0.0);
        const long long samples =
            get_integer(d, "dynamics", "samples", static_cast<long long>(dy.samples));
        require(samples >= 2, "dynamics.samples", "samples >= 2");
        dy.samples = static_cast<std::size_t>(samples);
        dy.initial_state = get_string(d, "dynamics", "initial_state", dy.initial_state);
        dy.alpha1 = get_number(d, "dynamics", "alpha1", dy.alpha1);
        dy.alpha2 = get_number(d, "dynamics", "alpha2", dy.alpha2);
        dy.leakage_threshold =
            get_number(d, "dynamics", "leakage_threshold", dy.leakage_threshold);
        if (d.contains("variants")) {
            const auto& v = d["variants"];
            if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string())
                throw ConfigError("config: 'dynamics.variants' must list exactly two variant "
                                  "names");
            dy.variants = {v[0].get<std::string>(), v[1].get<std::string>()};
        }
    }
    {
        const auto& dy = cfg.dynamics;
        require(dy.t_max > 0.0, "dynamics.t_max", "t_max > 0");
        require(!dy.dt_max || *dy.dt_max > 0.0, "dynamics.dt_max", "dt_max > 0");
        require(dy.leakage_threshold > 0.0, "dynamics.leakage_threshold",
                "leakage_threshold > 0");
        rethrow_as_config("dynamics.initial_state",
                          [&] { (void)parse_atomic_state(dy.initial_state); });
        Variant v[2];
        for (std::size_t i = 0; i < 2; ++i)
            rethrow_as_config("dynamics.variants",
                              [&] { v[i] = parse_variant(dy.variants[i]); });
        if (frame_of(v[0]) != frame_of(v[1]))
            throw ConfigError("config: 'dynamics.variants': " + dy.variants[0] + " and " +
                              dy.variants[1] + " are written in different frames");
    }

    if (root.contains("effective")) {
        const auto& e = root["effective"];
        reject_unknown(e, "effective", {"detuning_convention", "hierarchy_threshold"});
        rethrow_as_config("effective.detuning_convention", [&] {
            cfg.effective.detuning_convention = parse_detuning_convention(
                get_string(e, "effective", "detuning_convention", "signed"));
        });
        cfg.effective.hierarchy_threshold = get_number(e, "effective", "hierarchy_threshold",
                                                       cfg.effective.hierarchy_threshold);
    }
    require(cfg.effective.hierarchy_threshold > 0.0, "effective.hierarchy_threshold",
            "hierarchy_threshold > 0");

    cfg.output = get_string(root, "", "output", cfg.output);
    require(!cfg.output.empty(), "output", "non-empty path");
    if (root.contains("workers")) {
        const auto& w = root["workers"];
        if (w.is_string() && w == "auto") {
            cfg.workers = 0;
        } else if (w.is_number() && w.get<double>() >= 1 &&
                   w.get<double>() == std::floor(w.get<double>())) {
            cfg.workers = static_cast<unsigned>(w.get<double>());
        } else {
            throw ConfigError("config: 'workers': constraint violated: \"auto\" or integer >= 1");
        }
    }
    return cfg;
}

inline RunConfig parse_config(std::string_view text)
{
    json doc;
    try {
        doc = text.find_first_not_of(" \t\r\n") == std::string_view::npos
                  ? json::object()
                  : json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config_document(doc);
}

/// Fully resolved configuration as JSON. Integers are stored as doubles so
/// that 6 and 6.0 canonicalise identically.
inline json to_json(const RunConfig& cfg)
{
    json j;
    j["model"] = {{"omega1", cfg.model.omega1}, {"omega2", cfg.model.omega2},
                  {"Omega1", cfg.model.Omega1}, {"Omega2", cfg.model.Omega2},
                  {"g1", cfg.model.g1},         {"g2", cfg.model.g2}};
    j["drive"] = {{"amplitude", cfg.drive.amplitude}, {"frequency", cfg.drive.frequency}};
    j["truncation"] = {{"n_c1", static_cast<double>(cfg.truncation.n_c1)},
                       {"n_c2", static_cast<double>(cfg.truncation.n_c2)},
                       {"block_window", static_cast<double>(cfg.truncation.block_window)},
                       {"driven_block_window",
                        static_cast<double>(cfg.truncation.driven_block_window)},
                       {"sideband_eps", cfg.truncation.sideband_eps}};
    j["sweep"] = json::array();
    for (const auto& a : cfg.sweep)
        j["sweep"].push_back({{"name", a.name},
                              {"start", a.start},
                              {"stop", a.stop},
                              {"points", static_cast<double>(a.points)},
                              {"parameter", a.parameter}});
    const auto& d = cfg.dynamics;
    j["dynamics"] = {{"t_max", d.t_max},
                     {"dt_max", d.dt_max ? json(*d.dt_max) : json("auto")},
                     {"samples", static_cast<double>(d.samples)},
                     {"initial_state", d.initial_state},
                     {"alpha1", d.alpha1},
                     {"alpha2", d.alpha2},
                     {"variants", d.variants},
                     {"leakage_threshold", d.leakage_threshold}};
    j["effective"] = {
        {"detuning_convention", std::string(to_string(cfg.effective.detuning_convention))},
        {"hierarchy_threshold", cfg.effective.hierarchy_threshold}};
    j["output"] = cfg.output;
    j["workers"] = cfg.workers == 0 ? json("auto") : json(static_cast<double>(cfg.workers));
    return j;
}

/// Canonical text: sorted keys, no whitespace, shortest round-trip numbers.
inline std::string canonical_text(const json& j)
{
    return j.dump(); // object keys are kept sorted by nlohmann::json
}

/// 64-bit FNV-1a digest.
inline std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Content hash of everything that influences results of `command`.
/// Output location and worker count are excluded.
inline std::string config_hash(const RunConfig& cfg, std::string_view command)
{
    json j = to_json(cfg);
    j.erase("output");
    j.erase("workers");
    j["command"] = std::string(command);
    j["version"] = std::string(version);
    return hex64(fnv1a64(canonical_text(j)));
}

} // namespace lambdajc
