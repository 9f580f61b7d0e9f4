#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cavity/assembly.hpp"
#include "cavity/types.hpp"

namespace cavity {

enum class SolveMethod { Unconstrained, Penalty, Augmented, Projection };

const char* to_string(SolveMethod m);

enum class ModeLabel { Unclassified, Physical, Spurious };

const char* to_string(ModeLabel l);

/// One computed eigenmode. `xi` has unit Euclidean norm. `zeta` is the
/// Lagrange multiplier (augmented method only). `residual_eigen` is the
/// 2-norm residual of the pencil the method actually solved;
/// `residual_constraint` is always |C xi|_2 of the original system.
struct Mode {
    Complex lambda;
    VecC xi;
    std::optional<VecC> zeta;
    double residual_constraint = 0.0;
    double residual_eigen = 0.0;
    ModeLabel label = ModeLabel::Unclassified;
};

struct EigenSolution {
    std::vector<Mode> modes;  // sorted by ascending |lambda|
    SolveMethod method = SolveMethod::Projection;
    double alpha = 0.0;       // penalty weight, if applicable
    double solve_seconds = 0.0;

    std::vector<Complex> eigenvalues() const;
};

struct SolverConfig {
    double alpha = 800.0;
    int k = 20;                    // modes to keep; <= 0 keeps all finite
    int dense_limit = 4000;        // max order of a dense eigensolve
    double qz_tol = 1e-10;         // |beta| <= qz_tol*max|beta| -> infinite
    double rank_tol_factor = 2.220446049250313e-16;  // unit roundoff
    double zero_tol_factor = 1e-8; // |lambda| <= factor*median -> zero
};

/// Dense generalized eigendecomposition backend (QZ). Pairs whose beta
/// is negligible are flagged infinite. When both matrices are Hermitian
/// and B admits a Cholesky factorization the symmetric-definite driver
/// is used instead (same contract, no infinite pairs).
struct GevpResult {
    std::vector<Complex> eigenvalues;  // meaningless where infinite[i]
    DenseC vectors;                    // one column per eigenvalue
    std::vector<bool> infinite;
};

GevpResult dense_gevp(const DenseC& A, const DenseC& B, const SolverConfig& cfg = {});

/// Raw solve of A xi = lambda M xi without the constraint; exposes the
/// m-1 spurious zero modes.
EigenSolution solve_unconstrained(const AssembledSystem& sys, const SolverConfig& cfg = {});

/// Penalty method: (A + alpha C^dag C) xi = lambda M xi. Physical modes
/// are alpha-invariant; spurious modes move with alpha.
EigenSolution solve_penalty(const AssembledSystem& sys, double alpha,
                            const SolverConfig& cfg = {});

/// Augmented (Lagrange multiplier) method: block pencil
///   [A C^dag; C O] [xi; zeta] = lambda [M O; O O] [xi; zeta].
/// The pencil as written is singular: [0; 1] lies in the null space of
/// both block matrices (the multiplier is determined only up to the
/// all-ones vector). The implementation fixes the gauge with a rank-one
/// correction in the zero block, which sends that direction to an
/// infinite eigenvalue and leaves every finite eigenpair unchanged; the
/// reported zeta carries a unit all-ones component.
EigenSolution solve_augmented(const AssembledSystem& sys, const SolverConfig& cfg = {});

/// Orthonormal basis of null(C) from the SVD of the densified C.
struct NullspaceBasis {
    DenseC Q;  // n x r, orthonormal columns
    int r = 0;
    double sigma_min_kept = 0.0;
    double sigma_max_dropped = 0.0;
};

NullspaceBasis nullspace_basis(const SparseC& C,
                               double rank_tol_factor = 2.220446049250313e-16);

/// Projection method: Galerkin-reduce the pencil to null(C) through the
/// SVD basis Q and solve (Q^dag A Q) y = lambda (Q^dag M Q) y.
/// Spurious-free by construction; modes are labeled Physical.
EigenSolution solve_projection(const AssembledSystem& sys, const SolverConfig& cfg = {});

/// Number of eigenvalues with |lambda| <= zero_tol_factor * median of
/// the nonzero magnitudes (one fixed-point refinement of the split).
int count_zero_eigenvalues(const std::vector<Complex>& eigenvalues,
                           double zero_tol_factor = 1e-8);

/// Max over modes of |zeta_i - mean(zeta)| / max|zeta_i| (0 for an
/// absent or all-zero zeta).
double zeta_uniformity(const Mode& mode);

}  // namespace cavity
