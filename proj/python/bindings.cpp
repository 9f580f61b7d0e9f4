#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cavity/eigensolvers.hpp"
#include "cavity/modes.hpp"
#include "cavity/pipeline.hpp"

namespace py = pybind11;
using namespace cavity;

namespace {

AssembledSystem assemble(const TetMesh& mesh, const MaterialTensors& mat) {
    const EdgeNumbering edges = extract_edges(mesh);
    const SparseR Y = build_connectivity_matrix(edges, mesh.node_count());
    return assemble_system(mesh, edges, Y, mat);
}

SolverConfig make_cfg(double alpha, int k, int dense_limit) {
    SolverConfig cfg;
    cfg.alpha = alpha;
    cfg.k = k;
    cfg.dense_limit = dense_limit;
    return cfg;
}

EigenSolution solve(const AssembledSystem& sys, const std::string& method, double alpha, int k,
                    int dense_limit) {
    const SolverConfig cfg = make_cfg(alpha, k, dense_limit);
    const double tau = default_residual_threshold(sys.C);
    if (method == "unconstrained")
        return classify_by_residual(solve_unconstrained(sys, cfg), tau);
    if (method == "penalty") return classify_by_residual(solve_penalty(sys, alpha, cfg), tau);
    if (method == "augmented") return classify_by_residual(solve_augmented(sys, cfg), tau);
    if (method == "projection") return solve_projection(sys, cfg);
    throw std::invalid_argument("unknown method '" + method + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Resonant eigenmodes of closed cavity resonators with anisotropic media";

    py::class_<TetMesh>(m, "TetMesh")
        .def_readonly("label", &TetMesh::label)
        .def_property_readonly("nodes",
                               [](const TetMesh& mesh) {
                                   DenseR out(mesh.node_count(), 3);
                                   for (int i = 0; i < mesh.node_count(); ++i)
                                       out.row(i) = mesh.nodes[static_cast<size_t>(i)];
                                   return out;
                               })
        .def_property_readonly("tets",
                               [](const TetMesh& mesh) {
                                   Eigen::MatrixXi out(mesh.tet_count(), 4);
                                   for (int t = 0; t < mesh.tet_count(); ++t)
                                       for (int j = 0; j < 4; ++j)
                                           out(t, j) = mesh.tets[static_cast<size_t>(t)]
                                                                [static_cast<size_t>(j)];
                                   return out;
                               })
        .def("node_count", &TetMesh::node_count)
        .def("tet_count", &TetMesh::tet_count)
        .def("total_volume", &TetMesh::total_volume)
        .def("longest_edge", &TetMesh::longest_edge)
        .def("__repr__", [](const TetMesh& mesh) {
            std::ostringstream out;
            out << "TetMesh(" << mesh.label << ", nodes=" << mesh.node_count()
                << ", tets=" << mesh.tet_count() << ")";
            return out.str();
        });

    m.def("generate_box_mesh", &generate_box_mesh, py::arg("a"), py::arg("b"), py::arg("c"),
          py::arg("nx"), py::arg("ny"), py::arg("nz"));
    m.def("generate_ball_mesh", &generate_ball_mesh, py::arg("r"), py::arg("level"));
    m.def("generate_cylinder_mesh", &generate_cylinder_mesh, py::arg("r"), py::arg("height"),
          py::arg("level"));
    m.def("parse_mesh", &parse_mesh, py::arg("text"));
    m.def("write_mesh", &write_mesh, py::arg("mesh"));
    m.def("check_conformity", [](const TetMesh& mesh) { return check_conformity(mesh); });

    py::class_<MaterialTensors>(m, "MaterialTensors")
        .def(py::init([](const Mat3c& eps_r, const Mat3c& mu_r) {
                 return MaterialTensors{eps_r, mu_r};
             }),
             py::arg("eps_r"), py::arg("mu_r"))
        .def_readonly("eps_r", &MaterialTensors::eps_r)
        .def_readonly("mu_r", &MaterialTensors::mu_r)
        .def("case", [](const MaterialTensors& mat) {
            return std::string(to_string(classify_medium(mat)));
        });
    m.def("material_preset", [](const std::string& name) {
        const auto preset = material_preset(name);
        if (!preset) throw std::invalid_argument("unknown material preset '" + name + "'");
        return *preset;
    });
    m.def("resonant_frequency", &resonant_frequency, py::arg("lam"));
    m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;

    py::class_<AssembledSystem>(m, "AssembledSystem")
        .def_readonly("n", &AssembledSystem::n)
        .def_readonly("m", &AssembledSystem::m)
        .def_readonly("mesh_h", &AssembledSystem::mesh_h)
        .def_property_readonly("A", [](const AssembledSystem& sys) { return sys.A; })
        .def_property_readonly("M", [](const AssembledSystem& sys) { return sys.M; })
        .def_property_readonly("Y", [](const AssembledSystem& sys) { return sys.Y; })
        .def_property_readonly("C", [](const AssembledSystem& sys) { return sys.C; })
        .def("identity_report", [](const AssembledSystem& sys) {
            return check_identities(sys).to_string();
        });
    m.def("assemble", &assemble, py::arg("mesh"), py::arg("material"));

    py::class_<Mode>(m, "Mode")
        .def_readonly("lam", &Mode::lambda)
        .def_readonly("xi", &Mode::xi)
        .def_property_readonly("zeta",
                               [](const Mode& mode) -> py::object {
                                   if (!mode.zeta) return py::none();
                                   return py::cast(*mode.zeta);
                               })
        .def_readonly("residual_constraint", &Mode::residual_constraint)
        .def_readonly("residual_eigen", &Mode::residual_eigen)
        .def_property_readonly(
            "label", [](const Mode& mode) { return std::string(to_string(mode.label)); });

    py::class_<EigenSolution>(m, "EigenSolution")
        .def_readonly("modes", &EigenSolution::modes)
        .def_readonly("alpha", &EigenSolution::alpha)
        .def_readonly("solve_seconds", &EigenSolution::solve_seconds)
        .def_property_readonly(
            "method",
            [](const EigenSolution& sol) { return std::string(to_string(sol.method)); })
        .def("eigenvalues", &EigenSolution::eigenvalues);

    m.def("solve", &solve, py::arg("system"), py::arg("method") = "projection",
          py::arg("alpha") = 800.0, py::arg("k") = 20, py::arg("dense_limit") = 4000);
    m.def("count_zero_eigenvalues", &count_zero_eigenvalues, py::arg("eigenvalues"),
          py::arg("zero_tol_factor") = 1e-8);

    m.def(
        "analytic_box_eigenvalues",
        [](double a, double b, double c, int count) {
            return analytic_box_eigenvalues(a, b, c, count).values;
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("count") = 6);
    m.def(
        "paper_reference",
        [](const std::string& id) { return paper_reference(id).values; }, py::arg("id"));

    m.def(
        "run",
        [](const std::string& config_path) {
            std::ostringstream diag;
            const int status = run(load_config(config_path), diag);
            return py::make_tuple(status, diag.str());
        },
        py::arg("config_path"),
        "Run the full pipeline for a config file; returns (exit_status, diagnostics).");
}
