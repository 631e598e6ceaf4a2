#include "qmx/config.hpp"

#include <cmath>
#include <sstream>

#include "qmx/io.hpp"
#include "qmx/linalg.hpp"

namespace qmx {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config: " + path + ": " + why);
}

double parse_num(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) fail(path, "trailing characters in number '" + v + "'");
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(path, "expected a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) fail(path, "trailing characters in integer '" + v + "'");
        return i;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(path, "expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& path, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    fail(path, "expected a boolean, got '" + v + "'");
}

std::vector<double> parse_nums(const std::string& path, const std::string& v,
                               std::initializer_list<std::size_t> allowed) {
    const auto toks = split_ws(v);
    bool ok = false;
    for (std::size_t a : allowed) ok = ok || toks.size() == a;
    if (!ok) fail(path, "unexpected list length " + std::to_string(toks.size()));
    std::vector<double> out;
    for (const auto& t : toks) out.push_back(parse_num(path, t));
    return out;
}

std::vector<int> parse_ints(const std::string& path, const std::string& v, std::size_t count) {
    const auto toks = split_ws(v);
    if (toks.size() != count) fail(path, "expected " + std::to_string(count) + " integers");
    std::vector<int> out;
    for (const auto& t : toks) out.push_back(static_cast<int>(parse_int(path, t)));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
    return s;
}
std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}
std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i];
    return s;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;

    auto apply = [&](const std::string& key, const std::string& value) {
        const std::string path = section + "." + key;
        if (section == "scenario") {
            if (key == "name") cfg.name = value;
            else fail(path, "unknown key");
        } else if (section == "law") {
            if (key == "law") cfg.law = value;
            else if (key == "vartheta") cfg.vartheta = parse_nums(path, value, {1, 9});
            else if (key == "conductivity_scale") cfg.conductivity_scale = parse_num(path, value);
            else if (key == "eta") cfg.eta = parse_num(path, value);
            else if (key == "state_domain") cfg.state_domain = value;
            else if (key == "state_radius") cfg.state_radius = parse_num(path, value);
            else if (key == "state_lo") cfg.state_lo = parse_nums(path, value, {6});
            else if (key == "state_hi") cfg.state_hi = parse_nums(path, value, {6});
            else fail(path, "unknown key");
        } else if (section == "grid") {
            if (key == "cells") cfg.cells = parse_ints(path, value, 3);
            else if (key == "spacing") cfg.spacing = parse_nums(path, value, {3});
            else if (key == "origin") cfg.origin = parse_nums(path, value, {3});
            else if (key == "boundary") {
                cfg.boundary = split_ws(value);
                if (cfg.boundary.size() != 3) fail(path, "expected three boundary modes");
            } else if (key == "cell_cap") cfg.cell_cap = parse_int(path, value);
            else fail(path, "unknown key");
        } else if (section == "data") {
            if (key == "preset") cfg.preset = value;
            else if (key == "amplitude") cfg.amplitude = parse_num(path, value);
            else if (key == "center") cfg.center = parse_nums(path, value, {3});
            else if (key == "width") cfg.width = parse_num(path, value);
            else fail(path, "unknown key");
        } else if (section == "solver") {
            if (key == "m") cfg.m = static_cast<int>(parse_int(path, value));
            else if (key == "tau") cfg.tau = parse_num(path, value);
            else if (key == "horizon") cfg.horizon = parse_num(path, value);
            else if (key == "cfl") cfg.cfl = parse_num(path, value);
            else if (key == "penalty") cfg.penalty = parse_num(path, value);
            else if (key == "dissipation") cfg.dissipation = parse_num(path, value);
            else if (key == "fp_tolerance") cfg.fp_tolerance = parse_num(path, value);
            else if (key == "max_iterations") cfg.max_iterations = static_cast<int>(parse_int(path, value));
            else if (key == "contraction_warn") cfg.contraction_warn = parse_num(path, value);
            else if (key == "radius_r") cfg.radius_r = parse_num(path, value);
            else if (key == "kappa_guard") cfg.kappa_guard = parse_num(path, value);
            else if (key == "lipschitz_threshold") cfg.lipschitz_threshold = parse_num(path, value);
            else if (key == "gamma") cfg.gamma = parse_num(path, value);
            else if (key == "max_tau_halvings") cfg.max_tau_halvings = static_cast<int>(parse_int(path, value));
            else if (key == "compat_tolerance") cfg.compat_tolerance = parse_num(path, value);
            else if (key == "compat_relax_c") cfg.compat_relax_c = parse_num(path, value);
            else fail(path, "unknown key");
        } else if (section == "diagnostics") {
            if (key == "divergence") cfg.divergence = parse_bool(path, value);
            else if (key == "energy") cfg.energy = parse_bool(path, value);
            else if (key == "cone") cfg.cone = parse_bool(path, value);
            else if (key == "cone_center") cfg.cone_center = parse_nums(path, value, {3});
            else if (key == "cone_radius") cfg.cone_radius = parse_num(path, value);
            else if (key == "cone_speed") cfg.cone_speed = parse_num(path, value);
            else if (key == "cone_direction") cfg.cone_direction = value;
            else if (key == "cone_tolerance") cfg.cone_tolerance = parse_num(path, value);
            else if (key == "continuity") cfg.continuity = parse_bool(path, value);
            else if (key == "continuity_deltas") cfg.continuity_deltas = parse_nums(path, value, {1, 2, 3, 4, 5, 6});
            else fail(path, "unknown key");
        } else if (section == "output") {
            if (key == "directory") cfg.directory = value;
            else if (key == "dump_every") cfg.dump_every = static_cast<int>(parse_int(path, value));
            else if (key == "seed") cfg.seed = parse_int(path, value);
            else fail(path, "unknown key");
        } else {
            fail(section.empty() ? key : path, "unknown section");
        }
    };

    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + ": expected key = value");
        apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    validate_config(cfg);
    return cfg;
}

void validate_config(const ScenarioConfig& cfg) {
    auto check = [](bool ok, const std::string& path, const std::string& why) {
        if (!ok) fail(path, why);
    };
    check(!cfg.name.empty(), "scenario.name", "must not be empty");
    check(cfg.law == "kerr", "law.law", "unknown law '" + cfg.law + "' (supported: kerr)");
    check(cfg.vartheta.size() == 1 || cfg.vartheta.size() == 9, "law.vartheta", "needs 1 or 9 entries");
    if (cfg.vartheta.size() == 9) {
        Mat3 t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t.m[i][j] = cfg.vartheta[static_cast<std::size_t>(3 * i + j)];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                check(std::abs(t.m[i][j] - t.m[j][i]) <= 1e-12, "law.vartheta", "must be symmetric");
        check(symmetric_eigen_range3(t).min >= -1e-12, "law.vartheta", "must be positive semidefinite");
    } else {
        check(cfg.vartheta[0] >= 0.0, "law.vartheta", "must be nonnegative");
    }
    check(cfg.eta > 0.0, "law.eta", "must be positive");
    check(cfg.state_domain == "all" || cfg.state_domain == "ball" || cfg.state_domain == "box",
          "law.state_domain", "must be one of all, ball, box");
    if (cfg.state_domain == "ball") check(cfg.state_radius > 0.0, "law.state_radius", "must be positive");

    for (int a = 0; a < 3; ++a) {
        check(cfg.cells[static_cast<std::size_t>(a)] >= 3, "grid.cells", "needs >= 3 nodes per axis");
        check(cfg.spacing[static_cast<std::size_t>(a)] > 0.0, "grid.spacing", "must be positive");
    }
    long long total = 1;
    for (int a = 0; a < 3; ++a) total *= cfg.cells[static_cast<std::size_t>(a)];
    check(total <= cfg.cell_cap, "grid.cells", "total cell count exceeds grid.cell_cap");
    for (const auto& b : cfg.boundary)
        check(b == "periodic" || b == "pec_bottom_open_top" || b == "open", "grid.boundary",
              "unknown mode '" + b + "'");
    check(cfg.boundary[0] != "pec_bottom_open_top" && cfg.boundary[1] != "pec_bottom_open_top",
          "grid.boundary", "pec_bottom_open_top is only legal on axis 3");

    check(cfg.m >= 1 && cfg.m <= 3, "solver.m", "must lie in 1..3");
    check(cfg.tau > 0.0, "solver.tau", "must be positive");
    check(cfg.horizon > 0.0, "solver.horizon", "must be positive");
    check(cfg.cfl > 0.0 && cfg.cfl <= 1.0, "solver.cfl", "must lie in (0, 1]");
    check(cfg.penalty >= 1.0, "solver.penalty", "must be >= 1");
    check(cfg.dissipation >= 0.0, "solver.dissipation", "must be >= 0");
    check(cfg.fp_tolerance > 0.0, "solver.fp_tolerance", "must be positive");
    check(cfg.max_iterations >= 1, "solver.max_iterations", "must be >= 1");
    check(cfg.lipschitz_threshold > 0.0, "solver.lipschitz_threshold", "must be positive");
    check(cfg.max_tau_halvings >= 0, "solver.max_tau_halvings", "must be >= 0");
    check(cfg.compat_tolerance > 0.0, "solver.compat_tolerance", "must be positive");

    check(cfg.cone_direction == "forward" || cfg.cone_direction == "backward",
          "diagnostics.cone_direction", "must be forward or backward");
    check(cfg.cone_radius > 0.0, "diagnostics.cone_radius", "must be positive");
    check(cfg.cone_speed >= 0.0, "diagnostics.cone_speed", "must be >= 0 (0 selects 3/eta)");
    check(cfg.cone_tolerance > 0.0, "diagnostics.cone_tolerance", "must be positive");
    for (double d : cfg.continuity_deltas)
        check(d > 0.0, "diagnostics.continuity_deltas", "entries must be positive");

    check(cfg.dump_every >= 0, "output.dump_every", "must be >= 0");
    check(!cfg.directory.empty(), "output.directory", "must not be empty");
}

std::string emit_config(const ScenarioConfig& c) {
    std::ostringstream os;
    os << "[scenario]\n";
    os << "name = " << c.name << "\n\n";
    os << "[law]\n";
    os << "law = " << c.law << "\n";
    os << "vartheta = " << join(c.vartheta) << "\n";
    os << "conductivity_scale = " << format_double(c.conductivity_scale) << "\n";
    os << "eta = " << format_double(c.eta) << "\n";
    os << "state_domain = " << c.state_domain << "\n";
    os << "state_radius = " << format_double(c.state_radius) << "\n";
    os << "state_lo = " << join(c.state_lo) << "\n";
    os << "state_hi = " << join(c.state_hi) << "\n\n";
    os << "[grid]\n";
    os << "cells = " << join(c.cells) << "\n";
    os << "spacing = " << join(c.spacing) << "\n";
    os << "origin = " << join(c.origin) << "\n";
    os << "boundary = " << join(c.boundary) << "\n";
    os << "cell_cap = " << c.cell_cap << "\n\n";
    os << "[data]\n";
    os << "preset = " << c.preset << "\n";
    os << "amplitude = " << format_double(c.amplitude) << "\n";
    os << "center = " << join(c.center) << "\n";
    os << "width = " << format_double(c.width) << "\n\n";
    os << "[solver]\n";
    os << "m = " << c.m << "\n";
    os << "tau = " << format_double(c.tau) << "\n";
    os << "horizon = " << format_double(c.horizon) << "\n";
    os << "cfl = " << format_double(c.cfl) << "\n";
    os << "penalty = " << format_double(c.penalty) << "\n";
    os << "dissipation = " << format_double(c.dissipation) << "\n";
    os << "fp_tolerance = " << format_double(c.fp_tolerance) << "\n";
    os << "max_iterations = " << c.max_iterations << "\n";
    os << "contraction_warn = " << format_double(c.contraction_warn) << "\n";
    os << "radius_r = " << format_double(c.radius_r) << "\n";
    os << "kappa_guard = " << format_double(c.kappa_guard) << "\n";
    os << "lipschitz_threshold = " << format_double(c.lipschitz_threshold) << "\n";
    os << "gamma = " << format_double(c.gamma) << "\n";
    os << "max_tau_halvings = " << c.max_tau_halvings << "\n";
    os << "compat_tolerance = " << format_double(c.compat_tolerance) << "\n";
    os << "compat_relax_c = " << format_double(c.compat_relax_c) << "\n\n";
    os << "[diagnostics]\n";
    os << "divergence = " << (c.divergence ? "true" : "false") << "\n";
    os << "energy = " << (c.energy ? "true" : "false") << "\n";
    os << "cone = " << (c.cone ? "true" : "false") << "\n";
    os << "cone_center = " << join(c.cone_center) << "\n";
    os << "cone_radius = " << format_double(c.cone_radius) << "\n";
    os << "cone_speed = " << format_double(c.cone_speed) << "\n";
    os << "cone_direction = " << c.cone_direction << "\n";
    os << "cone_tolerance = " << format_double(c.cone_tolerance) << "\n";
    os << "continuity = " << (c.continuity ? "true" : "false") << "\n";
    os << "continuity_deltas = " << join(c.continuity_deltas) << "\n\n";
    os << "[output]\n";
    os << "directory = " << c.directory << "\n";
    os << "dump_every = " << c.dump_every << "\n";
    os << "seed = " << c.seed << "\n";
    return os.str();
}

GridSpec grid_from_config(const ScenarioConfig& cfg) {
    GridSpec g;
    for (int a = 0; a < 3; ++a) {
        g.cells_per_axis[a] = cfg.cells[static_cast<std::size_t>(a)];
        g.spacing[a] = cfg.spacing[static_cast<std::size_t>(a)];
        g.origin[a] = cfg.origin[static_cast<std::size_t>(a)];
        const std::string& b = cfg.boundary[static_cast<std::size_t>(a)];
        g.boundary[static_cast<std::size_t>(a)] = b == "periodic" ? BoundaryMode::periodic
                                                  : b == "open"   ? BoundaryMode::open
                                                                  : BoundaryMode::pec_bottom_open_top;
    }
    g.cell_cap = cfg.cell_cap;
    g.validate();
    return g;
}

}  // namespace qmx
