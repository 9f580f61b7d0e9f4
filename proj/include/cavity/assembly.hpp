#pragma once

#include <array>
#include <string>

#include "cavity/materials.hpp"
#include "cavity/mesh.hpp"
#include "cavity/types.hpp"

namespace cavity {

/// Constant data of one tet: gradients of the four linear nodal basis
/// functions (they sum to zero) and the element volume.
struct ElementGeometry {
    std::array<Vec3, 4> grads;
    double volume;
};

using LocalMat6 = Eigen::Matrix<Complex, 6, 6>;

/// Coefficients of the local gradient expansion
///   grad L_i = sum_e coeff[i][e] * N_e
/// on any tet (the per-element rows of the incidence matrix).
inline constexpr int kLocalGradientExpansion[4][6] = {
    {-1, 0, -1, 0, -1, 0},
    {1, -1, 0, 0, 0, -1},
    {0, 1, 1, -1, 0, 0},
    {0, 0, 0, 1, 1, 1},
};

ElementGeometry element_geometry(const TetMesh& mesh, int tet);

/// Local curl-curl matrix: entry (i,k) = V * (eps_inv c_k) . c_i with
/// c_e = 2 s_e grad L_a x grad L_b the constant curl of the signed
/// local edge function. Exact (constant integrand).
LocalMat6 element_stiffness(const ElementGeometry& geom, const Mat3c& eps_inv,
                            const std::array<double, 6>& signs);

/// Local mass matrix: entry (i,k) = int_K (mu N_k) . N_i dV, evaluated
/// with the symmetric 4-point degree-2 rule (exact, the integrand is
/// quadratic).
LocalMat6 element_mass(const ElementGeometry& geom, const Mat3c& mu,
                       const std::array<double, 6>& signs);

/// Local constraint block: entry (i,k) = int_K (mu N_k) . grad L_i dV
/// (4 x 6), same quadrature, exact for the linear integrand.
Eigen::Matrix<Complex, 4, 6> element_constraint(const ElementGeometry& geom,
                                                const Mat3c& mu,
                                                const std::array<double, 6>& signs);

/**
 * Global matrices of the constrained eigenproblem
 *   A xi = Lambda M xi,  C xi = 0
 * with A the curl-curl matrix, M the mass matrix, Y the incidence
 * matrix and C = Y M. Immutable after assembly.
 */
struct AssembledSystem {
    SparseC A;   // n x n
    SparseC M;   // n x n
    SparseR Y;   // m x n
    SparseC C;   // m x n
    int n = 0;   // edge count
    int m = 0;   // node count
    double mesh_h = 0.0;
    MaterialTensors material;
};

/// Assemble A and M by signed scatter-add and form C as the sparse
/// product Y*M. Assembly is deterministic: contributions are sorted by
/// (row, col, value) before summation, so permuting the tet list
/// reproduces bitwise-identical matrices.
AssembledSystem assemble_system(const TetMesh& mesh, const EdgeNumbering& edges,
                                const SparseR& Y, const MaterialTensors& mat);

/// C assembled by direct quadrature of the constraint form; cross-check
/// for the C = Y M identity.
SparseC assemble_constraint_direct(const TetMesh& mesh, const EdgeNumbering& edges,
                                   const MaterialTensors& mat, int node_count);

/// Residuals of the structural identities.
struct IdentityReport {
    double ya_rel = 0.0;        // |Y A|_max / |A|_max
    double cym_rel = 0.0;       // |C - Y M|_max / |M|_max
    double ytb_max = 0.0;       // |Y^T 1|_max (exact integer arithmetic: 0)
    int rank_y = -1;            // computed only when m <= rank_limit
    int m = 0;
    int n = 0;

    bool pass(double tol = 1e-12) const;
    std::string to_string() const;
};

/// Evaluate the identity residuals; rank(Y) is computed by dense
/// column-pivoted QR when m <= rank_limit.
IdentityReport check_identities(const AssembledSystem& sys, int rank_limit = 500);

/// Triplet dump, one "row col re im" line per stored entry, 1-based.
std::string dump_matrix_triplets(const SparseC& mat);
std::string dump_matrix_triplets(const SparseR& mat);

}  // namespace cavity
