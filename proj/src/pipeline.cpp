#include "cavity/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cavity/eigensolvers.hpp"

namespace cavity {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

}  // namespace

TetMesh build_geometry(const RunConfig& config) {
    const auto& g = config.geometry;
    switch (g.kind) {
        case RunConfig::GeometryKind::Box:
            return generate_box_mesh(g.a, g.b, g.c, g.nx, g.ny, g.nz);
        case RunConfig::GeometryKind::Ball:
            return generate_ball_mesh(g.r, g.level);
        case RunConfig::GeometryKind::Cylinder:
            return generate_cylinder_mesh(g.r, g.height, g.level);
        case RunConfig::GeometryKind::File: {
            std::ifstream in(g.path);
            if (!in) throw std::runtime_error("cannot open mesh file '" + g.path + "'");
            std::stringstream buffer;
            buffer << in.rdbuf();
            TetMesh mesh = parse_mesh(buffer.str());
            mesh.label = g.path;
            return mesh;
        }
    }
    throw std::logic_error("build_geometry: unreachable");
}

AssembledSystem assemble_from_config(const RunConfig& config, const TetMesh& mesh) {
    const EdgeNumbering edges = extract_edges(mesh);
    const SparseR Y = build_connectivity_matrix(edges, mesh.node_count());
    return assemble_system(mesh, edges, Y, config.material);
}

std::optional<ReferenceSpectrum> resolve_reference(const RunConfig& config) {
    const std::string& type = config.reference.type;
    std::optional<ReferenceSpectrum> ref;
    if (type == "none") return std::nullopt;
    if (type == "analytic-box") {
        if (config.geometry.kind != RunConfig::GeometryKind::Box)
            throw std::runtime_error("reference 'analytic-box' requires a box geometry");
        // Compare against the dominant analytic resonance; higher modes
        // need finer meshes than the default tolerance assumes.
        ref = analytic_box_eigenvalues(config.geometry.a, config.geometry.b, config.geometry.c,
                                       1);
    } else if (type == "paper-sphere") {
        ref = paper_reference("sphere");
    } else if (type == "paper-cylinder-case2") {
        ref = paper_reference("cylinder-case2");
    } else if (type == "paper-cylinder-case4") {
        ref = paper_reference("cylinder-case4");
    } else {
        throw std::runtime_error("unknown reference type '" + type + "'");
    }
    ref->tolerance = config.reference.rel_tol;
    return ref;
}

namespace {

SolverConfig solver_config(const RunConfig& config) {
    SolverConfig cfg;
    cfg.alpha = config.solver.alpha;
    cfg.k = config.solver.k;
    cfg.dense_limit = config.solver.dense_limit;
    cfg.qz_tol = config.solver.qz_tol;
    cfg.rank_tol_factor = config.solver.rank_tol_factor;
    cfg.zero_tol_factor = config.solver.zero_tol_factor;
    return cfg;
}

EigenSolution run_method(const std::string& method, const AssembledSystem& sys,
                         const RunConfig& config, const SolverConfig& cfg) {
    const double tau =
        config.solver.tau ? *config.solver.tau : default_residual_threshold(sys.C);
    if (method == "unconstrained")
        return classify_by_residual(solve_unconstrained(sys, cfg), tau);
    if (method == "penalty")
        return classify_by_residual(solve_penalty(sys, config.solver.alpha, cfg), tau);
    if (method == "augmented") return classify_by_residual(solve_augmented(sys, cfg), tau);
    if (method == "projection") return solve_projection(sys, cfg);
    throw std::runtime_error("unknown method '" + method + "'");
}

}  // namespace

int run(const RunConfig& config, std::ostream& diag) {
    namespace fs = std::filesystem;
    const fs::path out_dir = config.output.dir;
    fs::create_directories(out_dir);

    const TetMesh mesh = build_geometry(config);
    if (config.strict_mesh_check) {
        std::string why;
        if (!check_conformity(mesh, &why))
            throw std::runtime_error("mesh conformity check failed: " + why);
    }
    const AssembledSystem sys = assemble_from_config(config, mesh);
    diag << "mesh: " << mesh.label << ", nodes=" << sys.m << ", tets=" << mesh.tet_count()
         << ", edges=" << sys.n << ", h=" << sys.mesh_h << "\n";

    if (config.output.dump_matrices) {
        write_file(out_dir / "A.txt", dump_matrix_triplets(sys.A));
        write_file(out_dir / "M.txt", dump_matrix_triplets(sys.M));
        write_file(out_dir / "Y.txt", dump_matrix_triplets(sys.Y));
        write_file(out_dir / "C.txt", dump_matrix_triplets(sys.C));
    }

    const std::optional<ReferenceSpectrum> ref = resolve_reference(config);
    const SolverConfig cfg = solver_config(config);

    std::string summary;
    {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "mesh.label = %s\nmesh.nodes = %d\nmesh.tets = %d\nmesh.edges = %d\n"
                      "mesh.h = %.12g\nmaterial.preset = %s\nmaterial.case = %s\n",
                      mesh.label.c_str(), sys.m, mesh.tet_count(), sys.n, sys.mesh_h,
                      config.material_preset_name.c_str(),
                      to_string(classify_medium(config.material)));
        summary += buf;
    }

    bool all_pass = true;
    for (const std::string& method : config.solver.methods) {
        const EigenSolution sol = run_method(method, sys, config, cfg);
        diag << method << ": " << sol.modes.size() << " modes in " << sol.solve_seconds
             << " s\n";

        ComparisonReport report;
        if (ref) {
            report = compare_to_reference(sol, *ref, config.reference.rel_tol);
            diag << report.to_string();
            if (!report.pass) all_pass = false;
        }
        write_file(out_dir / ("report_" + method + ".csv"),
                   report_csv(sol, report, sys.mesh_h));

        char buf[256];
        std::snprintf(buf, sizeof buf, "%s.modes = %zu\n%s.solve_seconds = %.12g\n",
                      method.c_str(), sol.modes.size(), method.c_str(), sol.solve_seconds);
        summary += buf;
        if (ref) {
            std::snprintf(buf, sizeof buf, "%s.comparison = %s\n", method.c_str(),
                          report.pass ? "pass" : "fail");
            summary += buf;
        }
    }
    summary += std::string("overall = ") + (all_pass ? "pass" : "fail") + "\n";
    write_file(out_dir / "summary", summary);

    if (!all_pass) diag << "FAIL: at least one comparison outside tolerance\n";
    return all_pass ? 0 : 1;
}

}  // namespace cavity
