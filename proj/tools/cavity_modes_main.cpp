#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavity/eigensolvers.hpp"
#include "cavity/pipeline.hpp"

namespace {

using namespace cavity;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    bool strict = false;
};

void add_common(CLI::App* sub, CommonOpts& opts, bool config_required) {
    auto* c = sub->add_option("--config", opts.config_path, "run-configuration file");
    if (config_required) c->required();
    sub->add_option("--out", opts.out_dir, "output directory (overrides output.dir)");
    sub->add_flag("--strict", opts.strict, "fail on non-conforming meshes");
}

RunConfig load(const CommonOpts& opts) {
    RunConfig config =
        opts.config_path.empty() ? RunConfig{} : load_config(opts.config_path);
    if (!opts.out_dir.empty()) config.output.dir = opts.out_dir;
    if (opts.strict) config.strict_mesh_check = true;
    return config;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

int cmd_mesh(const CommonOpts& opts) {
    const RunConfig config = load(opts);
    const TetMesh mesh = build_geometry(config);
    std::string why;
    const bool conforming = check_conformity(mesh, &why);
    std::cout << "label = " << mesh.label << "\nnodes = " << mesh.node_count()
              << "\ntets = " << mesh.tet_count() << "\nvolume = " << mesh.total_volume()
              << "\nh = " << mesh.longest_edge()
              << "\nconforming = " << (conforming ? "yes" : "no: " + why) << "\n";
    if (config.strict_mesh_check && !conforming) return 1;
    std::filesystem::create_directories(config.output.dir);
    write_file(std::filesystem::path(config.output.dir) / "mesh.txt", write_mesh(mesh));
    return 0;
}

int cmd_assemble(const CommonOpts& opts) {
    const RunConfig config = load(opts);
    const TetMesh mesh = build_geometry(config);
    const AssembledSystem sys = assemble_from_config(config, mesh);
    const IdentityReport report = check_identities(sys);
    std::cout << report.to_string();
    std::filesystem::create_directories(config.output.dir);
    const std::filesystem::path dir = config.output.dir;
    write_file(dir / "A.txt", dump_matrix_triplets(sys.A));
    write_file(dir / "M.txt", dump_matrix_triplets(sys.M));
    write_file(dir / "Y.txt", dump_matrix_triplets(sys.Y));
    write_file(dir / "C.txt", dump_matrix_triplets(sys.C));
    return report.pass() ? 0 : 1;
}

int cmd_solve(const CommonOpts& opts) { return run(load(opts), std::cerr); }

int cmd_validate(const CommonOpts& opts, const std::string& experiment) {
    RunConfig config = load(opts);
    // The three built-in experiments fix geometry, material, and
    // reference; solver settings still come from the config (if any).
    if (experiment == "A") {
        config.geometry.kind = RunConfig::GeometryKind::Ball;
        config.geometry.r = 1.0;
        config.material = vacuum_material();
        config.material_preset_name = "vacuum";
        config.reference.type = "paper-sphere";
    } else if (experiment == "B" || experiment == "C") {
        config.geometry.kind = RunConfig::GeometryKind::Cylinder;
        config.geometry.r = 0.2;
        config.geometry.height = 0.5;
        const bool case2 = experiment == "B";
        config.material = case2 ? paper_case2_material() : paper_case4_material();
        config.material_preset_name = case2 ? "paper-case2" : "paper-case4";
        config.reference.type = case2 ? "paper-cylinder-case2" : "paper-cylinder-case4";
    } else {
        std::cerr << "validate: experiment must be A, B, or C\n";
        return 2;
    }
    config.geometry.path.clear();
    return run(config, std::cerr);
}

int cmd_sweep(const CommonOpts& opts) {
    const RunConfig config = load(opts);
    const TetMesh mesh = build_geometry(config);
    const AssembledSystem sys = assemble_from_config(config, mesh);

    SolverConfig cfg;
    cfg.alpha = config.solver.alpha;
    cfg.k = config.solver.k;
    cfg.dense_limit = config.solver.dense_limit;
    cfg.qz_tol = config.solver.qz_tol;
    cfg.rank_tol_factor = config.solver.rank_tol_factor;
    cfg.zero_tol_factor = config.solver.zero_tol_factor;

    const AlphaSweepResult sweep =
        classify_by_alpha_sweep(sys, config.solver.alpha_list, config.solver.match_tol, cfg);
    std::cout << "alphas =";
    for (double a : config.solver.alpha_list) std::cout << " " << a;
    std::cout << "\nstable = " << sweep.stable.size()
              << "\nunstable = " << sweep.unstable.size() << "\n";

    std::string csv = "lambda_re,lambda_im,label,alpha\n";
    char buf[160];
    for (const Mode& mode : sweep.runs.front().modes) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%s,%.12g\n", mode.lambda.real(),
                      mode.lambda.imag(), to_string(mode.label), config.solver.alpha_list[0]);
        csv += buf;
    }
    std::filesystem::create_directories(config.output.dir);
    write_file(std::filesystem::path(config.output.dir) / "sweep.csv", csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resonant eigenmodes of closed cavity resonators with anisotropic media"};
    app.require_subcommand(1);

    CommonOpts mesh_opts, assemble_opts, solve_opts, validate_opts, sweep_opts;
    std::string experiment;

    add_common(app.add_subcommand("mesh", "generate or inspect a mesh"), mesh_opts, true);
    add_common(app.add_subcommand("assemble", "assemble matrices and check identities"),
               assemble_opts, true);
    add_common(app.add_subcommand("solve", "run the full pipeline"), solve_opts, true);
    auto* validate =
        app.add_subcommand("validate", "run a built-in experiment (A: vacuum sphere, "
                                       "B: lossy cylinder, C: doubly-lossy cylinder)");
    validate->add_option("experiment", experiment, "A, B, or C")->required();
    add_common(validate, validate_opts, false);
    add_common(app.add_subcommand("sweep", "penalty alpha-sweep classification"), sweep_opts,
               true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("mesh")) return cmd_mesh(mesh_opts);
        if (app.got_subcommand("assemble")) return cmd_assemble(assemble_opts);
        if (app.got_subcommand("solve")) return cmd_solve(solve_opts);
        if (app.got_subcommand("validate")) return cmd_validate(validate_opts, experiment);
        if (app.got_subcommand("sweep")) return cmd_sweep(sweep_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
