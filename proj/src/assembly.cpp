#include "cavity/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <tuple>

#include <Eigen/Dense>

namespace cavity {

namespace {

// Symmetric degree-2 rule on the tet: four points, equal weights V/4.
// Exact for the (at most quadratic) mass and constraint integrands.
constexpr double kQuadA = 0.5854101966249685;  // (5 + 3*sqrt(5)) / 20
constexpr double kQuadB = 0.1381966011250105;  // (5 - sqrt(5)) / 20

constexpr double kQuadPoints[4][4] = {
    {kQuadA, kQuadB, kQuadB, kQuadB},
    {kQuadB, kQuadA, kQuadB, kQuadB},
    {kQuadB, kQuadB, kQuadA, kQuadB},
    {kQuadB, kQuadB, kQuadB, kQuadA},
};

/// Signed local edge function at barycentric point `lam`:
/// s * (L_a grad L_b - L_b grad L_a).
Vec3 edge_function(const ElementGeometry& geom, int e, double sign, const double lam[4]) {
    const auto [a, b] = kLocalEdgePairs[e];
    return sign * (lam[a] * geom.grads[b] - lam[b] * geom.grads[a]);
}

}  // namespace

ElementGeometry element_geometry(const TetMesh& mesh, int tet) {
    const auto& v = mesh.tets[tet];
    const Vec3& p0 = mesh.nodes[v[0]];
    Eigen::Matrix3d jac;  // columns are the edge vectors from vertex 0
    jac.col(0) = mesh.nodes[v[1]] - p0;
    jac.col(1) = mesh.nodes[v[2]] - p0;
    jac.col(2) = mesh.nodes[v[3]] - p0;
    const double det = jac.determinant();
    if (std::abs(det) < 1e-300) throw std::runtime_error("element_geometry: degenerate tet");

    ElementGeometry geom;
    geom.volume = std::abs(det) / 6.0;
    // x = p0 + jac * (L2, L3, L4), hence grad L_{i+1} is row i of jac^{-1}.
    const Eigen::Matrix3d inv = jac.inverse();
    geom.grads[1] = inv.row(0);
    geom.grads[2] = inv.row(1);
    geom.grads[3] = inv.row(2);
    geom.grads[0] = -(geom.grads[1] + geom.grads[2] + geom.grads[3]);
    return geom;
}

LocalMat6 element_stiffness(const ElementGeometry& geom, const Mat3c& eps_inv,
                            const std::array<double, 6>& signs) {
    std::array<Vec3, 6> curls;
    for (int e = 0; e < 6; ++e) {
        const auto [a, b] = kLocalEdgePairs[e];
        curls[e] = 2.0 * signs[e] * geom.grads[a].cross(geom.grads[b]);
    }
    LocalMat6 out;
    for (int k = 0; k < 6; ++k) {
        const Eigen::Vector3cd flux = eps_inv * curls[k];
        for (int i = 0; i < 6; ++i) {
            // The curls are real, so the conjugation in the sesquilinear
            // form drops out.
            out(i, k) = geom.volume * (flux.transpose() * curls[i].cast<Complex>())(0);
        }
    }
    return out;
}

LocalMat6 element_mass(const ElementGeometry& geom, const Mat3c& mu,
                       const std::array<double, 6>& signs) {
    LocalMat6 out = LocalMat6::Zero();
    for (const auto& lam : kQuadPoints) {
        std::array<Vec3, 6> n;
        for (int e = 0; e < 6; ++e) n[e] = edge_function(geom, e, signs[e], lam);
        for (int i = 0; i < 6; ++i) {
            for (int k = 0; k < 6; ++k) {
                out(i, k) += ((mu * n[k].cast<Complex>()).transpose() * n[i].cast<Complex>())(0);
            }
        }
    }
    out *= geom.volume / 4.0;
    return out;
}

Eigen::Matrix<Complex, 4, 6> element_constraint(const ElementGeometry& geom, const Mat3c& mu,
                                                const std::array<double, 6>& signs) {
    Eigen::Matrix<Complex, 4, 6> out = Eigen::Matrix<Complex, 4, 6>::Zero();
    for (const auto& lam : kQuadPoints) {
        for (int k = 0; k < 6; ++k) {
            const Eigen::Vector3cd flux =
                mu * edge_function(geom, k, signs[k], lam).cast<Complex>();
            for (int i = 0; i < 4; ++i) {
                out(i, k) += (flux.transpose() * geom.grads[i].cast<Complex>())(0);
            }
        }
    }
    out *= geom.volume / 4.0;
    return out;
}

namespace {

struct Entry {
    int row;
    int col;
    Complex val;
};

/// Sum triplets into a compressed sparse matrix in a canonical order:
/// sorted by (row, col, re, im), so the floating-point summation order
/// does not depend on the tet listing.
SparseC compress(std::vector<Entry>& entries, int rows, int cols) {
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.row, a.col, *reinterpret_cast<const double*>(&a.val),
                        *(reinterpret_cast<const double*>(&a.val) + 1)) <
               std::tie(b.row, b.col, *reinterpret_cast<const double*>(&b.val),
                        *(reinterpret_cast<const double*>(&b.val) + 1));
    });
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(entries.size());
    size_t i = 0;
    while (i < entries.size()) {
        size_t j = i;
        Complex sum = 0.0;
        while (j < entries.size() && entries[j].row == entries[i].row &&
               entries[j].col == entries[i].col) {
            sum += entries[j].val;
            ++j;
        }
        trips.emplace_back(entries[i].row, entries[i].col, sum);
        i = j;
    }
    SparseC out(rows, cols);
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

std::array<double, 6> tet_signs(const EdgeNumbering& edges, size_t t) {
    std::array<double, 6> s{};
    for (int e = 0; e < 6; ++e) s[e] = edges.tet_edges[t][e].sign;
    return s;
}

}  // namespace

AssembledSystem assemble_system(const TetMesh& mesh, const EdgeNumbering& edges,
                                const SparseR& Y, const MaterialTensors& mat) {
    const Mat3c eps_inv = invert_tensor(mat.eps_r);
    const int n = edges.edge_count();
    const int m = mesh.node_count();

    std::vector<Entry> a_entries, m_entries;
    a_entries.reserve(mesh.tets.size() * 36);
    m_entries.reserve(mesh.tets.size() * 36);
    for (size_t t = 0; t < mesh.tets.size(); ++t) {
        const ElementGeometry geom = element_geometry(mesh, static_cast<int>(t));
        const auto signs = tet_signs(edges, t);
        const LocalMat6 ke = element_stiffness(geom, eps_inv, signs);
        const LocalMat6 me = element_mass(geom, mat.mu_r, signs);
        for (int i = 0; i < 6; ++i) {
            const int gi = edges.tet_edges[t][i].gid;
            for (int k = 0; k < 6; ++k) {
                const int gk = edges.tet_edges[t][k].gid;
                a_entries.push_back({gi, gk, ke(i, k)});
                m_entries.push_back({gi, gk, me(i, k)});
            }
        }
    }

    AssembledSystem sys;
    sys.A = compress(a_entries, n, n);
    sys.M = compress(m_entries, n, n);
    sys.Y = Y;
    sys.C = (Y.cast<Complex>() * sys.M).pruned();
    sys.C.makeCompressed();
    sys.n = n;
    sys.m = m;
    sys.mesh_h = mesh.longest_edge();
    sys.material = mat;
    return sys;
}

SparseC assemble_constraint_direct(const TetMesh& mesh, const EdgeNumbering& edges,
                                   const MaterialTensors& mat, int node_count) {
    std::vector<Entry> entries;
    entries.reserve(mesh.tets.size() * 24);
    for (size_t t = 0; t < mesh.tets.size(); ++t) {
        const ElementGeometry geom = element_geometry(mesh, static_cast<int>(t));
        const auto ce = element_constraint(geom, mat.mu_r, tet_signs(edges, t));
        for (int i = 0; i < 4; ++i) {
            const int gi = mesh.tets[t][i];
            for (int k = 0; k < 6; ++k) {
                entries.push_back({gi, edges.tet_edges[t][k].gid, ce(i, k)});
            }
        }
    }
    return compress(entries, node_count, edges.edge_count());
}

bool IdentityReport::pass(double tol) const {
    const bool rank_ok = rank_y < 0 || rank_y == m - 1;
    return ya_rel <= tol && cym_rel <= tol && ytb_max == 0.0 && rank_ok;
}

std::string IdentityReport::to_string() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "|YA|/|A| = %.3e\n|C-YM|/|M| = %.3e\n|Y^T 1|_max = %.3e\nrank(Y) = %s (m-1 = %d)\n",
                  ya_rel, cym_rel, ytb_max,
                  rank_y < 0 ? "skipped" : std::to_string(rank_y).c_str(), m - 1);
    return buf;
}

IdentityReport check_identities(const AssembledSystem& sys, int rank_limit) {
    IdentityReport rep;
    rep.m = sys.m;
    rep.n = sys.n;

    const SparseC yc = sys.Y.cast<Complex>();
    const SparseC ya = yc * sys.A;
    double ya_max = 0.0;
    for (int k = 0; k < ya.outerSize(); ++k)
        for (SparseC::InnerIterator it(ya, k); it; ++it)
            ya_max = std::max(ya_max, std::abs(it.value()));
    double a_max = 0.0;
    for (int k = 0; k < sys.A.outerSize(); ++k)
        for (SparseC::InnerIterator it(sys.A, k); it; ++it)
            a_max = std::max(a_max, std::abs(it.value()));
    rep.ya_rel = a_max > 0 ? ya_max / a_max : ya_max;

    const SparseC diff = sys.C - yc * sys.M;
    double diff_max = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseC::InnerIterator it(diff, k); it; ++it)
            diff_max = std::max(diff_max, std::abs(it.value()));
    double m_max = 0.0;
    for (int k = 0; k < sys.M.outerSize(); ++k)
        for (SparseC::InnerIterator it(sys.M, k); it; ++it)
            m_max = std::max(m_max, std::abs(it.value()));
    rep.cym_rel = m_max > 0 ? diff_max / m_max : diff_max;

    const VecR ytb = sys.Y.transpose() * VecR::Ones(sys.m);
    rep.ytb_max = ytb.cwiseAbs().maxCoeff();

    if (sys.m <= rank_limit) {
        const DenseR yd = DenseR(sys.Y);
        Eigen::ColPivHouseholderQR<DenseR> qr(yd);
        rep.rank_y = static_cast<int>(qr.rank());
    }
    return rep;
}

namespace {

template <typename Scalar>
std::string dump_triplets_impl(const Eigen::SparseMatrix<Scalar>& mat) {
    std::string out;
    char buf[128];
    for (int k = 0; k < mat.outerSize(); ++k) {
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(mat, k); it; ++it) {
            double re, im;
            if constexpr (std::is_same_v<Scalar, Complex>) {
                re = it.value().real();
                im = it.value().imag();
            } else {
                re = it.value();
                im = 0.0;
            }
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n",
                          static_cast<long>(it.row()) + 1, static_cast<long>(it.col()) + 1, re,
                          im);
            out += buf;
        }
    }
    return out;
}

}  // namespace

std::string dump_matrix_triplets(const SparseC& mat) { return dump_triplets_impl(mat); }
std::string dump_matrix_triplets(const SparseR& mat) { return dump_triplets_impl(mat); }

}  // namespace cavity
