#include "hartree/config.hpp"

#include "hartree/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hartree {

namespace {

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "grid_x.n", "grid_x.min", "grid_x.max",
        "grid_y.n", "grid_y.min", "grid_y.max",
        "potentials.preset", "potentials.ell", "potentials.omega",
        "potentials.bump_amplitude", "potentials.bump_support",
        "potentials.slope_mode", "potentials.coupling",
        "potentials.v1_csv", "potentials.v2_csv",
        "initial_x.kind", "initial_x.center", "initial_x.width", "initial_x.momentum",
        "initial_y.kind", "initial_y.center", "initial_y.width", "initial_y.momentum",
        "time.T", "time.dt", "time.record_every",
        "picard.T1", "picard.max_iterates", "picard.tol", "picard.seed",
        "picard.averages", "picard.segments", "picard.storage_limit_mb",
        "compare.enabled", "compare.memory_ack",
        "ground_state.dt_im", "ground_state.tol", "ground_state.max_iter",
        "diagnostics.df_residual",
        "tolerances.boundary_init", "tolerances.boundary_warn",
        "check.offsets",
        "output_dir",
    };
    return keys;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string nearest_key(const std::string& key) {
    std::size_t best = std::string::npos;
    std::string who;
    for (const auto& k : known_keys()) {
        const std::size_t d = levenshtein(key, k);
        if (d < best) {
            best = d;
            who = k;
        }
    }
    return who;
}

std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

struct KeyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw KeyError(key + ": expected a number, got \"" + v + "\"");
    }
}

std::size_t parse_count(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw KeyError(key + ": expected a non-negative integer, got \"" + v + "\"");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw KeyError(key + ": expected true or false, got \"" + v + "\"");
}

[[noreturn]] void bad_enum(const std::string& key, const std::string& v, const char* allowed) {
    throw KeyError(key + ": \"" + v + "\" is not one of {" + allowed + "}");
}

std::vector<double> parse_offsets(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw KeyError(key + ": empty entry in list \"" + v + "\"");
        const double d = parse_double(key, item);
        if (!(d >= 0.0)) throw KeyError(key + ": offsets must be >= 0, got " + item);
        out.push_back(d);
    }
    if (out.empty()) throw KeyError(key + ": expected a comma-separated list of offsets");
    return out;
}

void apply_key(SimulationConfig& c, const std::string& key, const std::string& v) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw KeyError("unknown key \"" + key + "\"; did you mean \"" + nearest_key(key) + "\"?");
    auto grid = [&](GridConfig& g) {
        const auto leaf = key.substr(key.find('.') + 1);
        if (leaf == "n") g.n = parse_count(key, v);
        else if (leaf == "min") g.min = parse_double(key, v);
        else g.max = parse_double(key, v);
    };
    auto initial = [&](InitialConfig& ic) {
        const auto leaf = key.substr(key.find('.') + 1);
        if (leaf == "kind") {
            if (v == "gaussian") ic.kind = InitialKind::gaussian;
            else if (v == "ground_state") ic.kind = InitialKind::ground_state;
            else bad_enum(key, v, "gaussian, ground_state");
        } else if (leaf == "center") ic.center = parse_double(key, v);
        else if (leaf == "width") ic.width = parse_double(key, v);
        else ic.momentum = parse_double(key, v);
    };

    if (key.starts_with("grid_x.")) grid(c.grid_x);
    else if (key.starts_with("grid_y.")) grid(c.grid_y);
    else if (key == "potentials.preset") {
        if (v == "double_well_bump" || v == "example31") c.preset = PotentialPreset::double_well_bump;
        else if (v == "tabulated") c.preset = PotentialPreset::tabulated;
        else bad_enum(key, v, "double_well_bump, tabulated");
    } else if (key == "potentials.ell") c.ell = parse_double(key, v);
    else if (key == "potentials.omega") c.omega = parse_double(key, v);
    else if (key == "potentials.bump_amplitude") c.bump_amplitude = parse_double(key, v);
    else if (key == "potentials.bump_support") c.bump_support = parse_double(key, v);
    else if (key == "potentials.slope_mode") {
        if (v == "pure_bump") c.slope_mode = SlopeMode::pure_bump;
        else if (v == "odd_bump") c.slope_mode = SlopeMode::odd_bump;
        else bad_enum(key, v, "pure_bump, odd_bump");
    } else if (key == "potentials.coupling") {
        if (v == "bump") c.coupling = CouplingMode::bump;
        else if (v == "zero") c.coupling = CouplingMode::zero;
        else bad_enum(key, v, "bump, zero");
    } else if (key == "potentials.v1_csv") c.v1_csv = v;
    else if (key == "potentials.v2_csv") c.v2_csv = v;
    else if (key.starts_with("initial_x.")) initial(c.initial_x);
    else if (key.starts_with("initial_y.")) initial(c.initial_y);
    else if (key == "time.T") c.T = parse_double(key, v);
    else if (key == "time.dt") c.dt = parse_double(key, v);
    else if (key == "time.record_every") c.record_every = parse_count(key, v);
    else if (key == "picard.T1") c.picard_T1 = parse_double(key, v);
    else if (key == "picard.max_iterates") c.picard_max_iterates = parse_count(key, v);
    else if (key == "picard.tol") c.picard_tol = parse_double(key, v);
    else if (key == "picard.seed") {
        if (v == "free") c.picard_seed = PicardSeedMode::free_flow;
        else if (v == "frozen_initial") c.picard_seed = PicardSeedMode::frozen_initial;
        else bad_enum(key, v, "free, frozen_initial");
    } else if (key == "picard.averages") {
        if (v == "left") c.picard_averages = PicardAverages::left;
        else if (v == "midpoint") c.picard_averages = PicardAverages::midpoint;
        else bad_enum(key, v, "left, midpoint");
    } else if (key == "picard.segments") c.picard_segments = parse_count(key, v);
    else if (key == "picard.storage_limit_mb") c.picard_storage_limit_mb = parse_count(key, v);
    else if (key == "compare.enabled") c.compare_enabled = parse_bool(key, v);
    else if (key == "compare.memory_ack") c.compare_memory_ack = parse_bool(key, v);
    else if (key == "ground_state.dt_im") c.gs_dt_im = parse_double(key, v);
    else if (key == "ground_state.tol") c.gs_tol = parse_double(key, v);
    else if (key == "ground_state.max_iter") c.gs_max_iter = parse_count(key, v);
    else if (key == "diagnostics.df_residual") c.df_residual = parse_bool(key, v);
    else if (key == "tolerances.boundary_init") c.boundary_init_tol = parse_double(key, v);
    else if (key == "tolerances.boundary_warn") c.boundary_warn_tol = parse_double(key, v);
    else if (key == "check.offsets") c.check_offsets = parse_offsets(key, v);
    else c.output_dir = v; // "output_dir": last key in the registry
}

bool is_pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error("config: " + msg);
}

void validate(const SimulationConfig& c) {
    auto check_grid = [](const char* name, const GridConfig& g) {
        require(is_pow2(g.n) && g.n >= 8,
                std::string(name) + ".n = " + std::to_string(g.n) +
                    " is not a power of two >= 8");
        require(std::isfinite(g.min) && std::isfinite(g.max) && g.min < g.max,
                std::string(name) + ": min must be < max and finite");
    };
    check_grid("grid_x", c.grid_x);
    check_grid("grid_y", c.grid_y);

    require(std::isfinite(c.ell) && c.ell > 0.0, "potentials.ell must be > 0");
    require(std::isfinite(c.omega) && c.omega > 0.0, "potentials.omega must be > 0");
    require(std::isfinite(c.bump_support) && c.bump_support > 0.0,
            "potentials.bump_support must be > 0");
    require(std::isfinite(c.bump_amplitude), "potentials.bump_amplitude must be finite");
    if (c.preset == PotentialPreset::tabulated) {
        require(!c.v1_csv.empty() && !c.v2_csv.empty(),
                "potentials.v1_csv and potentials.v2_csv are required when "
                "potentials.preset = tabulated");
    }

    auto check_initial = [](const char* name, const InitialConfig& ic) {
        if (ic.kind == InitialKind::gaussian)
            require(std::isfinite(ic.width) && ic.width > 0.0,
                    std::string(name) + ".width must be > 0");
        require(std::isfinite(ic.center) && std::isfinite(ic.momentum),
                std::string(name) + ": center and momentum must be finite");
    };
    check_initial("initial_x", c.initial_x);
    check_initial("initial_y", c.initial_y);

    require(std::isfinite(c.dt) && c.dt > 0.0, "time.dt must be > 0");
    require(std::isfinite(c.T) && c.dt < c.T, "time.dt must be < time.T");
    require(c.record_every >= 1, "time.record_every must be >= 1");

    require(std::isfinite(c.picard_T1) && c.picard_T1 > 0.0, "picard.T1 must be > 0");
    require(c.picard_max_iterates >= 1, "picard.max_iterates must be >= 1");
    require(std::isfinite(c.picard_tol) && c.picard_tol > 0.0, "picard.tol must be > 0");
    require(c.picard_segments >= 1, "picard.segments must be >= 1");
    require(c.picard_storage_limit_mb >= 1, "picard.storage_limit_mb must be >= 1");

    require(std::isfinite(c.gs_dt_im) && c.gs_dt_im > 0.0, "ground_state.dt_im must be > 0");
    require(std::isfinite(c.gs_tol) && c.gs_tol > 0.0, "ground_state.tol must be > 0");
    require(c.gs_max_iter >= 1, "ground_state.max_iter must be >= 1");

    require(c.boundary_init_tol > 0.0, "tolerances.boundary_init must be > 0");
    require(c.boundary_warn_tol > 0.0, "tolerances.boundary_warn must be > 0");
    require(!c.output_dir.empty(), "output_dir must not be empty");
}

std::string render_offsets(const std::vector<double>& offsets) {
    std::string out;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (i) out += ",";
        out += io::format_g17(offsets[i]);
    }
    return out;
}

std::map<std::string, std::string> render_resolved(const SimulationConfig& c) {
    using io::format_g17;
    std::map<std::string, std::string> m;
    auto grid = [&](const std::string& name, const GridConfig& g) {
        m[name + ".n"] = std::to_string(g.n);
        m[name + ".min"] = format_g17(g.min);
        m[name + ".max"] = format_g17(g.max);
    };
    grid("grid_x", c.grid_x);
    grid("grid_y", c.grid_y);
    m["potentials.preset"] =
        c.preset == PotentialPreset::double_well_bump ? "double_well_bump" : "tabulated";
    m["potentials.ell"] = format_g17(c.ell);
    m["potentials.omega"] = format_g17(c.omega);
    m["potentials.bump_amplitude"] = format_g17(c.bump_amplitude);
    m["potentials.bump_support"] = format_g17(c.bump_support);
    m["potentials.slope_mode"] = c.slope_mode == SlopeMode::pure_bump ? "pure_bump" : "odd_bump";
    m["potentials.coupling"] = c.coupling == CouplingMode::bump ? "bump" : "zero";
    m["potentials.v1_csv"] = c.v1_csv;
    m["potentials.v2_csv"] = c.v2_csv;
    auto initial = [&](const std::string& name, const InitialConfig& ic) {
        m[name + ".kind"] = ic.kind == InitialKind::gaussian ? "gaussian" : "ground_state";
        m[name + ".center"] = format_g17(ic.center);
        m[name + ".width"] = format_g17(ic.width);
        m[name + ".momentum"] = format_g17(ic.momentum);
    };
    initial("initial_x", c.initial_x);
    initial("initial_y", c.initial_y);
    m["time.T"] = format_g17(c.T);
    m["time.dt"] = format_g17(c.dt);
    m["time.record_every"] = std::to_string(c.record_every);
    m["picard.T1"] = format_g17(c.picard_T1);
    m["picard.max_iterates"] = std::to_string(c.picard_max_iterates);
    m["picard.tol"] = format_g17(c.picard_tol);
    m["picard.seed"] = c.picard_seed == PicardSeedMode::free_flow ? "free" : "frozen_initial";
    m["picard.averages"] = c.picard_averages == PicardAverages::left ? "left" : "midpoint";
    m["picard.segments"] = std::to_string(c.picard_segments);
    m["picard.storage_limit_mb"] = std::to_string(c.picard_storage_limit_mb);
    m["compare.enabled"] = c.compare_enabled ? "true" : "false";
    m["compare.memory_ack"] = c.compare_memory_ack ? "true" : "false";
    m["ground_state.dt_im"] = format_g17(c.gs_dt_im);
    m["ground_state.tol"] = format_g17(c.gs_tol);
    m["ground_state.max_iter"] = std::to_string(c.gs_max_iter);
    m["diagnostics.df_residual"] = c.df_residual ? "true" : "false";
    m["tolerances.boundary_init"] = format_g17(c.boundary_init_tol);
    m["tolerances.boundary_warn"] = format_g17(c.boundary_warn_tol);
    m["check.offsets"] = render_offsets(c.check_offsets);
    m["output_dir"] = c.output_dir;
    return m;
}

std::string fnv1a_hex(const std::map<std::string, std::string>& resolved) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&h](const std::string& s) {
        for (const unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [k, v] : resolved) {
        if (k == "output_dir") continue;
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void refresh_resolved(SimulationConfig& c) {
    c.resolved = render_resolved(c);
    c.digest = fnv1a_hex(c.resolved);
}

} // namespace

SimulationConfig parse_config(const std::string& text, const std::string& origin) {
    SimulationConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected \"key = value\", got \"" + line + "\"");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
        if (const auto [it, fresh] = seen.emplace(key, lineno); !fresh)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": duplicate key \"" +
                                     key + "\" (first set on line " + std::to_string(it->second) +
                                     ")");
        try {
            apply_key(cfg, key, value);
        } catch (const KeyError& e) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    validate(cfg);
    refresh_resolved(cfg);
    return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str(), path.string());
}

void set_output_dir(SimulationConfig& cfg, const std::string& dir) {
    cfg.output_dir = dir;
    require(!cfg.output_dir.empty(), "output_dir must not be empty");
    refresh_resolved(cfg);
}

std::string manifest_text(const SimulationConfig& cfg) {
    std::string out = "# config digest " + cfg.digest + "\n";
    for (const auto& [k, v] : cfg.resolved) out += k + " = " + v + "\n";
    return out;
}

} // namespace hartree
