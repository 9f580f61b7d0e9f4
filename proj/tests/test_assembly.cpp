#include <doctest.h>

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "cavity/assembly.hpp"
#include "support/quadrature.hpp"

using namespace cavity;
namespace oracle = cavity::testing;

namespace {

/// Random well-shaped tet with vertices in the unit cube.
std::array<Vec3, 4> random_tet(std::mt19937& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    while (true) {
        std::array<Vec3, 4> v;
        for (auto& p : v) p = Vec3(uni(rng), uni(rng), uni(rng));
        if (oracle::oracle_volume(v) > 1e-3) return v;
    }
}

/// Single-tet mesh whose global node order matches the local one, so
/// all edge signs are +1.
TetMesh single_tet_mesh(const std::array<Vec3, 4>& v) {
    TetMesh mesh;
    mesh.nodes.assign(v.begin(), v.end());
    mesh.tets = {{0, 1, 2, 3}};
    if (mesh.tet_volume(0) < 0.0) {
        mesh.nodes[2] = v[3];
        mesh.nodes[3] = v[2];
    }
    return mesh;
}

constexpr std::array<double, 6> kPlusSigns{1, 1, 1, 1, 1, 1};

}  // namespace

TEST_CASE("element matrices match the independent quadrature oracle") {
    std::mt19937 rng(20240811);
    const Mat3c eps_inv = invert_tensor(paper_case2_material().eps_r);
    const Mat3c mu = paper_case2_material().mu_r;
    for (int trial = 0; trial < 25; ++trial) {
        const TetMesh mesh = single_tet_mesh(random_tet(rng));
        const ElementGeometry geom = element_geometry(mesh, 0);
        std::array<Vec3, 4> v;
        std::copy(mesh.nodes.begin(), mesh.nodes.end(), v.begin());

        const LocalMat6 ke = element_stiffness(geom, eps_inv, kPlusSigns);
        const auto ke_ref = oracle::oracle_stiffness(v, eps_inv);
        CHECK((ke - ke_ref).cwiseAbs().maxCoeff() <= 1e-13 * ke_ref.cwiseAbs().maxCoeff());

        const LocalMat6 me = element_mass(geom, mu, kPlusSigns);
        const auto me_ref = oracle::oracle_mass(v, mu);
        CHECK((me - me_ref).cwiseAbs().maxCoeff() <= 1e-13 * me_ref.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("gradient expansion reproduces the nodal gradients pointwise") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const TetMesh mesh = single_tet_mesh(random_tet(rng));
        const ElementGeometry geom = element_geometry(mesh, 0);
        for (int pt = 0; pt < 10; ++pt) {
            // Random interior barycentric point.
            double lam[4];
            double sum = 0.0;
            for (double& l : lam) sum += (l = uni(rng) + 0.05);
            for (double& l : lam) l /= sum;

            std::array<Vec3, 6> n;
            for (int e = 0; e < 6; ++e) {
                const auto [a, b] = kLocalEdgePairs[e];
                n[static_cast<size_t>(e)] = lam[a] * geom.grads[static_cast<size_t>(b)] -
                                            lam[b] * geom.grads[static_cast<size_t>(a)];
            }
            for (int i = 0; i < 4; ++i) {
                Vec3 expanded = Vec3::Zero();
                for (int e = 0; e < 6; ++e)
                    expanded += kLocalGradientExpansion[i][e] * n[static_cast<size_t>(e)];
                CHECK((expanded - geom.grads[static_cast<size_t>(i)]).norm() <=
                      1e-12 * geom.grads[static_cast<size_t>(i)].norm());
            }
        }
    }
}

TEST_CASE("nodal gradients sum to zero and are exact on linear functions") {
    std::mt19937 rng(99);
    const TetMesh mesh = single_tet_mesh(random_tet(rng));
    const ElementGeometry geom = element_geometry(mesh, 0);
    Vec3 total = Vec3::Zero();
    for (const Vec3& g : geom.grads) total += g;
    CHECK(total.norm() < 1e-12);
    // L_i(v_j) = delta_ij: verify via the affine representation.
    const auto grads_ref = oracle::oracle_gradients(
        {mesh.nodes[0], mesh.nodes[1], mesh.nodes[2], mesh.nodes[3]});
    for (int i = 0; i < 4; ++i)
        CHECK((geom.grads[static_cast<size_t>(i)] - grads_ref[static_cast<size_t>(i)]).norm() <
              1e-12 * grads_ref[static_cast<size_t>(i)].norm());
}

namespace {

AssembledSystem assemble(const TetMesh& mesh, const MaterialTensors& mat) {
    const EdgeNumbering edges = extract_edges(mesh);
    const SparseR Y = build_connectivity_matrix(edges, mesh.node_count());
    return assemble_system(mesh, edges, Y, mat);
}

}  // namespace

TEST_CASE("structural identities hold on small meshes") {
    for (const char* preset : {"vacuum", "paper-case2", "paper-case4"}) {
        const MaterialTensors mat = *material_preset(preset);
        for (const TetMesh& mesh :
             {generate_box_mesh(1, 1, 1, 1, 1, 1), generate_box_mesh(1.0, 0.5, 0.75, 2, 1, 2)}) {
            const AssembledSystem sys = assemble(mesh, mat);
            const IdentityReport rep = check_identities(sys);
            INFO(preset << " on " << mesh.label << ":\n" << rep.to_string());
            CHECK(rep.ya_rel <= 1e-12);
            CHECK(rep.cym_rel <= 1e-12);
            CHECK(rep.ytb_max == 0.0);
            CHECK(rep.rank_y == sys.m - 1);
        }
    }
}

TEST_CASE("directly assembled constraint equals Y*M") {
    const TetMesh mesh = generate_box_mesh(1.0, 0.5, 0.75, 2, 1, 2);
    const EdgeNumbering edges = extract_edges(mesh);
    const MaterialTensors mat = paper_case4_material();
    const AssembledSystem sys = assemble(mesh, mat);
    const SparseC direct = assemble_constraint_direct(mesh, edges, mat, mesh.node_count());
    double m_max = 0.0;
    for (int k = 0; k < sys.M.outerSize(); ++k)
        for (SparseC::InnerIterator it(sys.M, k); it; ++it)
            m_max = std::max(m_max, std::abs(it.value()));
    const SparseC diff = direct - sys.C;
    double diff_max = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseC::InnerIterator it(diff, k); it; ++it)
            diff_max = std::max(diff_max, std::abs(it.value()));
    CHECK(diff_max <= 1e-12 * m_max);
}

TEST_CASE("assembly is bitwise deterministic under tet permutation") {
    TetMesh mesh = generate_box_mesh(1.0, 0.5, 0.75, 2, 1, 2);
    const MaterialTensors mat = paper_case2_material();
    const AssembledSystem ref = assemble(mesh, mat);

    std::mt19937 rng(4242);
    std::shuffle(mesh.tets.begin(), mesh.tets.end(), rng);
    const AssembledSystem permuted = assemble(mesh, mat);

    CHECK(dump_matrix_triplets(permuted.A) == dump_matrix_triplets(ref.A));
    CHECK(dump_matrix_triplets(permuted.M) == dump_matrix_triplets(ref.M));
    CHECK(dump_matrix_triplets(permuted.C) == dump_matrix_triplets(ref.C));
}

TEST_CASE("vacuum matrices are real symmetric, M positive definite") {
    const AssembledSystem sys = assemble(generate_box_mesh(1, 1, 1, 1, 1, 1), vacuum_material());
    const DenseC A = DenseC(sys.A);
    const DenseC M = DenseC(sys.M);
    CHECK(A.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * A.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<DenseR> es(M.real());
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    // Discrete gradients lie in the null space of the curl-curl matrix.
    const DenseR grads = DenseR(sys.Y).transpose();
    CHECK((A.real() * grads).cwiseAbs().maxCoeff() <= 1e-12 * A.cwiseAbs().maxCoeff());
}

TEST_CASE("triplet dump format is 1-based with parallel real/imag columns") {
    SparseC mat(2, 2);
    mat.insert(0, 1) = Complex(1.5, -2.0);
    mat.makeCompressed();
    CHECK(dump_matrix_triplets(mat) == "1 2 1.5 -2\n");
}
