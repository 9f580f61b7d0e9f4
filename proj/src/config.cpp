#include "cavity/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cavity {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::runtime_error("config error at line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& value, int line) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') fail(line, "malformed number '" + value + "'");
    return v;
}

int parse_int(const std::string& value, int line) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0') fail(line, "malformed integer '" + value + "'");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& value, int line) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail(line, "malformed boolean '" + value + "'");
}

/// Split a list value on whitespace and/or commas.
std::vector<std::string> split_list(const std::string& value) {
    std::string s = value;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_strict_double(const std::string& token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0')
        throw std::runtime_error("malformed number '" + token + "'");
    return v;
}

Mat3c parse_tensor(const std::string& value, int line) {
    const std::vector<std::string> toks = split_list(value);
    if (toks.size() != 9) fail(line, "tensor needs 9 complex entries (row-major), got " +
                                         std::to_string(toks.size()));
    Mat3c t;
    for (int i = 0; i < 9; ++i) {
        try {
            t(i / 3, i % 3) = parse_complex(toks[static_cast<size_t>(i)]);
        } catch (const std::exception& e) {
            fail(line, e.what());
        }
    }
    return t;
}

}  // namespace

Complex parse_complex(const std::string& token) {
    std::string t = trim(token);
    if (t.empty()) throw std::runtime_error("malformed complex number ''");
    if (t.back() != 'j') return Complex(parse_strict_double(t), 0.0);
    t.pop_back();
    // Split "a+b" at the last sign that does not follow an exponent mark.
    size_t split = std::string::npos;
    for (size_t i = t.size(); i-- > 1;) {
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    const std::string real_str = split == std::string::npos ? "" : t.substr(0, split);
    std::string imag_str = split == std::string::npos ? t : t.substr(split);
    double imag;
    if (imag_str.empty() || imag_str == "+") {
        imag = 1.0;
    } else if (imag_str == "-") {
        imag = -1.0;
    } else {
        imag = parse_strict_double(imag_str);
    }
    const double real = real_str.empty() ? 0.0 : parse_strict_double(real_str);
    return Complex(real, imag);
}

std::string format_complex(Complex z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.12g%+.12gj", z.real(), z.imag());
    return buf;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool kind_set = false;
    std::set<std::string> seen;

    static const std::set<std::string> known_methods{"unconstrained", "penalty", "augmented",
                                                     "projection"};
    static const std::set<std::string> known_references{
        "none", "analytic-box", "paper-sphere", "paper-cylinder-case2", "paper-cylinder-case4"};

    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(lineno, "empty key");
        if (value.empty()) fail(lineno, "empty value for '" + key + "'");
        if (!seen.insert(key).second) fail(lineno, "duplicate key '" + key + "'");

        if (key == "geometry.kind") {
            if (value == "box") cfg.geometry.kind = RunConfig::GeometryKind::Box;
            else if (value == "ball") cfg.geometry.kind = RunConfig::GeometryKind::Ball;
            else if (value == "cylinder") cfg.geometry.kind = RunConfig::GeometryKind::Cylinder;
            else if (value == "file") cfg.geometry.kind = RunConfig::GeometryKind::File;
            else fail(lineno, "unknown geometry kind '" + value + "'");
            kind_set = true;
        } else if (key == "geometry.a") {
            cfg.geometry.a = parse_double(value, lineno);
        } else if (key == "geometry.b") {
            cfg.geometry.b = parse_double(value, lineno);
        } else if (key == "geometry.c") {
            cfg.geometry.c = parse_double(value, lineno);
        } else if (key == "geometry.nx") {
            cfg.geometry.nx = parse_int(value, lineno);
        } else if (key == "geometry.ny") {
            cfg.geometry.ny = parse_int(value, lineno);
        } else if (key == "geometry.nz") {
            cfg.geometry.nz = parse_int(value, lineno);
        } else if (key == "geometry.r") {
            cfg.geometry.r = parse_double(value, lineno);
        } else if (key == "geometry.height") {
            cfg.geometry.height = parse_double(value, lineno);
        } else if (key == "geometry.level") {
            cfg.geometry.level = parse_int(value, lineno);
        } else if (key == "geometry.path") {
            cfg.geometry.path = value;
        } else if (key == "material.preset") {
            const auto preset = material_preset(value);
            if (!preset) fail(lineno, "unknown material preset '" + value + "'");
            cfg.material = *preset;
            cfg.material_preset_name = value;
        } else if (key == "material.eps_r") {
            cfg.material.eps_r = parse_tensor(value, lineno);
            cfg.material_preset_name = "custom";
        } else if (key == "material.mu_r") {
            cfg.material.mu_r = parse_tensor(value, lineno);
            cfg.material_preset_name = "custom";
        } else if (key == "solver.methods") {
            cfg.solver.methods = split_list(value);
            for (const std::string& m : cfg.solver.methods)
                if (!known_methods.count(m)) fail(lineno, "unknown method '" + m + "'");
        } else if (key == "solver.alpha") {
            cfg.solver.alpha = parse_double(value, lineno);
        } else if (key == "solver.alpha_list") {
            cfg.solver.alpha_list.clear();
            for (const std::string& tok : split_list(value))
                cfg.solver.alpha_list.push_back(parse_double(tok, lineno));
        } else if (key == "solver.k") {
            cfg.solver.k = parse_int(value, lineno);
        } else if (key == "solver.dense_limit") {
            cfg.solver.dense_limit = parse_int(value, lineno);
        } else if (key == "solver.qz_tol") {
            cfg.solver.qz_tol = parse_double(value, lineno);
        } else if (key == "solver.rank_tol_factor") {
            cfg.solver.rank_tol_factor = parse_double(value, lineno);
        } else if (key == "solver.zero_tol_factor") {
            cfg.solver.zero_tol_factor = parse_double(value, lineno);
        } else if (key == "solver.tau") {
            cfg.solver.tau = parse_double(value, lineno);
        } else if (key == "solver.match_tol") {
            cfg.solver.match_tol = parse_double(value, lineno);
        } else if (key == "reference.type") {
            if (!known_references.count(value)) fail(lineno, "unknown reference '" + value + "'");
            cfg.reference.type = value;
        } else if (key == "reference.rel_tol") {
            cfg.reference.rel_tol = parse_double(value, lineno);
        } else if (key == "output.dir") {
            cfg.output.dir = value;
        } else if (key == "output.dump_matrices") {
            cfg.output.dump_matrices = parse_bool(value, lineno);
        } else if (key == "mesh.strict") {
            cfg.strict_mesh_check = parse_bool(value, lineno);
        } else {
            fail(lineno, "unknown key '" + key + "'");
        }
    }

    // Validation.
    if (!kind_set) throw std::runtime_error("config error: geometry.kind is required");
    const bool is_file = cfg.geometry.kind == RunConfig::GeometryKind::File;
    if (is_file && cfg.geometry.path.empty())
        throw std::runtime_error("config error: geometry.kind=file requires geometry.path");
    if (!is_file && !cfg.geometry.path.empty())
        throw std::runtime_error(
            "config error: geometry.path conflicts with a generated geometry (two geometry "
            "sources)");
    if (cfg.solver.methods.empty())
        throw std::runtime_error("config error: solver.methods must name at least one method");
    if (cfg.solver.k < 1) throw std::runtime_error("config error: solver.k must be >= 1");
    if (cfg.solver.alpha_list.size() < 2)
        throw std::runtime_error("config error: solver.alpha_list needs at least two values");
    if (cfg.reference.rel_tol <= 0)
        throw std::runtime_error("config error: reference.rel_tol must be positive");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config(buffer.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace cavity
