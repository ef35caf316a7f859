#pragma once

// Run configuration: flat `key = value` text, one key per line, `#` starts a
// comment. Unknown keys and malformed values are rejected with the line
// number and key in the message.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinbill/ensemble.hpp"
#include "spinbill/geometry.hpp"
#include "spinbill/io.hpp"
#include "spinbill/observables.hpp"

namespace spinbill {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ShapeTag shape = ShapeTag::rectangle;
    int lx = 30;
    int ly = 20;
    int a = 15;
    int radius = 15;
    std::string mask_file;
    double lambda = 1.0;
    double dt = 0.0; // 0: one swap time
    double t_final_in_tl = 10.0;
    int cgf_n = 3;
    CgfMode cgf_mode = CgfMode::coherent;
    double p_defect = 0.0;
    double epsilon_max = 0.0;
    int n_realizations = 10;
    std::uint64_t base_seed = 1;
    std::string output_dir = "out";
    int excitation_i = 0;
    int excitation_j = 0;
    std::vector<double> snapshot_times;
    double trim_fraction = 0.02;
    int unfold_degree = 7;
    int lss_bins = 40;
    double lss_s_max = 4.0;
    double census_threshold = 0.25;
    double window_fraction = 0.25;
    int revival_n_max = 10;
    bool write_trajectory = false;
    bool write_hamiltonian = false;
};

inline std::string_view to_string(ShapeTag t)
{
    switch (t) {
    case ShapeTag::rectangle:
        return "rectangle";
    case ShapeTag::quarter_stadium:
        return "quarter_stadium";
    case ShapeTag::custom:
        return "custom";
    }
    return "?";
}

inline std::string_view to_string(CgfMode m)
{
    return m == CgfMode::coherent ? "coherent" : "incoherent";
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view v, int line)
{
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw config_error("config line " + std::to_string(line) + ": key '" + std::string(key) +
                           "': cannot parse '" + std::string(v) + "' as a number");
    return out;
}

inline bool parse_bool(std::string_view key, std::string_view v, int line)
{
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw config_error("config line " + std::to_string(line) + ": key '" + std::string(key) +
                       "': expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<double> parse_list(std::string_view key, std::string_view v, int line)
{
    std::vector<double> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        out.push_back(parse_number<double>(key, trim(v.substr(0, comma)), line));
        if (comma == std::string_view::npos)
            break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

} // namespace detail

/// Applies one `key = value` assignment. `line` is only used in messages.
inline void set_config_value(RunConfig& c, std::string_view key, std::string_view value, int line = 0)
{
    using detail::parse_number;
    auto bad = [&](std::string_view what) {
        return config_error("config line " + std::to_string(line) + ": key '" + std::string(key) + "': " +
                            std::string(what));
    };

    if (key == "shape") {
        if (value == "rectangle")
            c.shape = ShapeTag::rectangle;
        else if (value == "quarter_stadium")
            c.shape = ShapeTag::quarter_stadium;
        else if (value == "custom")
            c.shape = ShapeTag::custom;
        else
            throw bad("unknown shape '" + std::string(value) + "' (rectangle, quarter_stadium, custom)");
    } else if (key == "Lx") {
        c.lx = parse_number<int>(key, value, line);
    } else if (key == "Ly") {
        c.ly = parse_number<int>(key, value, line);
    } else if (key == "a") {
        c.a = parse_number<int>(key, value, line);
    } else if (key == "R") {
        c.radius = parse_number<int>(key, value, line);
    } else if (key == "mask_file") {
        c.mask_file = std::string(value);
    } else if (key == "lambda") {
        c.lambda = parse_number<double>(key, value, line);
    } else if (key == "dt") {
        c.dt = parse_number<double>(key, value, line);
    } else if (key == "t_final_in_TL") {
        c.t_final_in_tl = parse_number<double>(key, value, line);
    } else if (key == "cgf_n") {
        c.cgf_n = parse_number<int>(key, value, line);
    } else if (key == "cgf_mode") {
        if (value == "coherent")
            c.cgf_mode = CgfMode::coherent;
        else if (value == "incoherent")
            c.cgf_mode = CgfMode::incoherent;
        else
            throw bad("expected coherent or incoherent");
    } else if (key == "p_defect") {
        c.p_defect = parse_number<double>(key, value, line);
    } else if (key == "epsilon_max") {
        c.epsilon_max = parse_number<double>(key, value, line);
    } else if (key == "n_realizations") {
        c.n_realizations = parse_number<int>(key, value, line);
    } else if (key == "base_seed") {
        c.base_seed = parse_number<std::uint64_t>(key, value, line);
    } else if (key == "output_dir") {
        c.output_dir = std::string(value);
    } else if (key == "excitation_i") {
        c.excitation_i = parse_number<int>(key, value, line);
    } else if (key == "excitation_j") {
        c.excitation_j = parse_number<int>(key, value, line);
    } else if (key == "snapshot_times") {
        c.snapshot_times = detail::parse_list(key, value, line);
    } else if (key == "trim_fraction") {
        c.trim_fraction = parse_number<double>(key, value, line);
    } else if (key == "unfold_degree") {
        c.unfold_degree = parse_number<int>(key, value, line);
    } else if (key == "lss_bins") {
        c.lss_bins = parse_number<int>(key, value, line);
    } else if (key == "lss_s_max") {
        c.lss_s_max = parse_number<double>(key, value, line);
    } else if (key == "census_threshold") {
        c.census_threshold = parse_number<double>(key, value, line);
    } else if (key == "window_fraction") {
        c.window_fraction = parse_number<double>(key, value, line);
    } else if (key == "revival_n_max") {
        c.revival_n_max = parse_number<int>(key, value, line);
    } else if (key == "write_trajectory") {
        c.write_trajectory = detail::parse_bool(key, value, line);
    } else if (key == "write_hamiltonian") {
        c.write_hamiltonian = detail::parse_bool(key, value, line);
    } else {
        throw config_error("config line " + std::to_string(line) + ": unknown key '" + std::string(key) + "'");
    }
}

/// Range checks that do not need the geometry.
inline void validate(const RunConfig& c)
{
    auto fail = [](const std::string& key, const std::string& what) {
        throw config_error("config: key '" + key + "': " + what);
    };
    if (c.shape == ShapeTag::rectangle && (c.lx < 1 || c.ly < 1))
        fail(c.lx < 1 ? "Lx" : "Ly", "must be a positive integer");
    if (c.shape == ShapeTag::quarter_stadium && (c.a < 1 || c.radius < 1))
        fail(c.a < 1 ? "a" : "R", "must be a positive integer");
    if (c.shape == ShapeTag::custom && c.mask_file.empty())
        fail("mask_file", "required for shape = custom");
    if (!(c.lambda > 0.0))
        fail("lambda", "must be positive");
    if (!(c.dt >= 0.0))
        fail("dt", "must be non-negative (0 selects one swap time)");
    if (!(c.t_final_in_tl >= 0.0))
        fail("t_final_in_TL", "must be non-negative");
    if (c.cgf_n < 0)
        fail("cgf_n", "must be non-negative");
    if (!(c.p_defect >= 0.0 && c.p_defect <= 1.0))
        fail("p_defect", "must lie in [0, 1]");
    if (!(c.epsilon_max >= 0.0))
        fail("epsilon_max", "must be non-negative");
    if (c.n_realizations < 1)
        fail("n_realizations", "must be at least 1");
    if (c.output_dir.empty())
        fail("output_dir", "must not be empty");
    for (double t : c.snapshot_times)
        if (!(t >= 0.0))
            fail("snapshot_times", "times must be non-negative");
    if (!(c.trim_fraction >= 0.0 && c.trim_fraction < 0.5))
        fail("trim_fraction", "must lie in [0, 0.5)");
    if (c.unfold_degree < 1)
        fail("unfold_degree", "must be at least 1");
    if (c.lss_bins < 2)
        fail("lss_bins", "must be at least 2");
    if (!(c.lss_s_max > 0.0))
        fail("lss_s_max", "must be positive");
    if (!(c.census_threshold > 0.0 && c.census_threshold < 1.0))
        fail("census_threshold", "must lie in (0, 1)");
    if (!(c.window_fraction > 0.0))
        fail("window_fraction", "must be positive");
    if (c.revival_n_max < 1)
        fail("revival_n_max", "must be at least 1");
}

/// Parses a whole config text. Relative `mask_file` paths are resolved
/// against `base_dir` when it is non-empty.
inline RunConfig parse_config(std::istream& is, const std::filesystem::path& base_dir = {})
{
    RunConfig c;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string_view s = raw;
        if (const auto hash = s.find('#'); hash != std::string_view::npos)
            s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty())
            continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw config_error("config line " + std::to_string(line) + ": expected 'key = value', got '" +
                               std::string(s) + "'");
        const auto key = detail::trim(s.substr(0, eq));
        const auto value = detail::trim(s.substr(eq + 1));
        if (key.empty())
            throw config_error("config line " + std::to_string(line) + ": missing key before '='");
        set_config_value(c, key, value, line);
    }
    if (!c.mask_file.empty() && !base_dir.empty() && std::filesystem::path(c.mask_file).is_relative())
        c.mask_file = (base_dir / c.mask_file).string();
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open '" + path.string() + "'");
    return parse_config(in, path.parent_path());
}

inline BilliardGeometry build_geometry(const RunConfig& c)
{
    switch (c.shape) {
    case ShapeTag::rectangle:
        return build_rectangle(c.lx, c.ly);
    case ShapeTag::quarter_stadium:
        return build_quarter_stadium(c.a, c.radius);
    case ShapeTag::custom: {
        std::ifstream in(c.mask_file);
        if (!in)
            throw config_error("config: key 'mask_file': cannot open '" + c.mask_file + "'");
        try {
            return read_mask(in);
        } catch (const std::invalid_argument& e) {
            throw config_error("config: key 'mask_file': " + std::string(e.what()));
        }
    }
    }
    throw config_error("config: key 'shape': unsupported");
}

inline EnsembleConfig to_ensemble_config(const RunConfig& c)
{
    validate(c);
    EnsembleConfig e{build_geometry(c)};
    e.lambda = c.lambda;
    e.n_realizations = c.n_realizations;
    e.p_defect = c.p_defect;
    e.epsilon_max = c.epsilon_max;
    e.base_seed = c.base_seed;
    e.spectrum = {c.trim_fraction, c.unfold_degree, c.lss_bins, c.lss_s_max};
    e.dynamics.dt = c.dt;
    e.dynamics.t_final_in_tl = c.t_final_in_tl;
    e.dynamics.cgf_n = c.cgf_n;
    e.dynamics.origin = {c.excitation_i, c.excitation_j};
    e.dynamics.snapshot_times = c.snapshot_times;
    e.dynamics.acf_mode = c.cgf_mode;
    e.dynamics.keep_states = c.write_trajectory;
    if (!e.geometry.occupied(e.dynamics.origin))
        throw config_error("config: keys 'excitation_i'/'excitation_j': site (" + std::to_string(c.excitation_i) +
                           "," + std::to_string(c.excitation_j) + ") is not occupied");
    return e;
}

/// Writes `c` back in config syntax; the output parses to an equal config.
inline void write_config(std::ostream& os, const RunConfig& c)
{
    auto kv = [&](std::string_view k, const std::string& v) { os << k << " = " << v << '\n'; };
    auto num = [&](std::string_view k, double v) { kv(k, format_double(v)); };
    kv("shape", std::string(to_string(c.shape)));
    kv("Lx", std::to_string(c.lx));
    kv("Ly", std::to_string(c.ly));
    kv("a", std::to_string(c.a));
    kv("R", std::to_string(c.radius));
    if (!c.mask_file.empty())
        kv("mask_file", c.mask_file);
    num("lambda", c.lambda);
    num("dt", c.dt);
    num("t_final_in_TL", c.t_final_in_tl);
    kv("cgf_n", std::to_string(c.cgf_n));
    kv("cgf_mode", std::string(to_string(c.cgf_mode)));
    num("p_defect", c.p_defect);
    num("epsilon_max", c.epsilon_max);
    kv("n_realizations", std::to_string(c.n_realizations));
    kv("base_seed", std::to_string(c.base_seed));
    kv("output_dir", c.output_dir);
    kv("excitation_i", std::to_string(c.excitation_i));
    kv("excitation_j", std::to_string(c.excitation_j));
    if (!c.snapshot_times.empty()) {
        std::string list;
        for (std::size_t k = 0; k < c.snapshot_times.size(); ++k)
            list += (k ? ", " : "") + format_double(c.snapshot_times[k]);
        kv("snapshot_times", list);
    }
    num("trim_fraction", c.trim_fraction);
    kv("unfold_degree", std::to_string(c.unfold_degree));
    kv("lss_bins", std::to_string(c.lss_bins));
    num("lss_s_max", c.lss_s_max);
    num("census_threshold", c.census_threshold);
    num("window_fraction", c.window_fraction);
    kv("revival_n_max", std::to_string(c.revival_n_max));
    kv("write_trajectory", c.write_trajectory ? "true" : "false");
    kv("write_hamiltonian", c.write_hamiltonian ? "true" : "false");
}

} // namespace spinbill
