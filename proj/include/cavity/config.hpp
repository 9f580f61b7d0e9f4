#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cavity/materials.hpp"
#include "cavity/types.hpp"

namespace cavity {

/// Run configuration parsed from the flat `key = value` file format
/// (dotted sections, '#' comments, complex entries written `a+bj`).
struct RunConfig {
    enum class GeometryKind { Box, Ball, Cylinder, File };

    struct Geometry {
        GeometryKind kind = GeometryKind::Box;
        // box
        double a = 1.0, b = 1.0, c = 1.0;
        int nx = 1, ny = 1, nz = 1;
        // ball / cylinder
        double r = 1.0;
        double height = 1.0;
        int level = 1;
        // file
        std::string path;
    };

    struct Solver {
        std::vector<std::string> methods{"projection"};
        double alpha = 800.0;
        std::vector<double> alpha_list{800.0, 1600.0};
        int k = 20;
        int dense_limit = 4000;
        double qz_tol = 1e-10;
        double rank_tol_factor = 2.220446049250313e-16;
        double zero_tol_factor = 1e-8;
        std::optional<double> tau;  // residual threshold; default 1e-6*|C|_F
        double match_tol = 1e-8;
    };

    struct Reference {
        std::string type = "none";  // none | analytic-box | paper-sphere |
                                    // paper-cylinder-case2 | paper-cylinder-case4
        double rel_tol = 0.05;
    };

    struct Output {
        std::string dir = ".";
        bool dump_matrices = false;
    };

    Geometry geometry;
    MaterialTensors material = vacuum_material();
    std::string material_preset_name = "vacuum";
    Solver solver;
    Reference reference;
    Output output;
    bool strict_mesh_check = false;
};

/// Parse and validate a config from text. Throws std::runtime_error
/// with line context on unknown keys, malformed values, a missing or
/// duplicated geometry, or an empty method list.
RunConfig parse_config(const std::string& text);

/// Read the file at `path` and parse it.
RunConfig load_config(const std::string& path);

/// Parse one complex number in `a+bj` form ("2-1j", "0.375j", "7.5").
Complex parse_complex(const std::string& token);

std::string format_complex(Complex z);

}  // namespace cavity
