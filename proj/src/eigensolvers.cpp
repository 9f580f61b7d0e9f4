#include "cavity/eigensolvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

// Debian's lapack.h does not honor LAPACK_COMPLEX_CPP; install the C++
// complex type through the custom hook instead.
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace cavity {

const char* to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::Unconstrained: return "unconstrained";
        case SolveMethod::Penalty: return "penalty";
        case SolveMethod::Augmented: return "augmented";
        case SolveMethod::Projection: return "projection";
    }
    return "?";
}

const char* to_string(ModeLabel l) {
    switch (l) {
        case ModeLabel::Unclassified: return "unclassified";
        case ModeLabel::Physical: return "physical";
        case ModeLabel::Spurious: return "spurious";
    }
    return "?";
}

std::vector<Complex> EigenSolution::eigenvalues() const {
    std::vector<Complex> out;
    out.reserve(modes.size());
    for (const auto& mode : modes) out.push_back(mode.lambda);
    return out;
}

namespace {

bool is_hermitian(const DenseC& t) {
    const double scale = std::max(t.cwiseAbs().maxCoeff(), 1e-300);
    return (t - t.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale;
}

bool is_real(const DenseC& t) { return t.imag().cwiseAbs().maxCoeff() == 0.0; }

/// Hermitian-definite drivers (sygv/hegv); returns false when B is not
/// positive definite so the caller can fall back to QZ.
bool hermitian_definite_gevp(const DenseC& A, const DenseC& B, GevpResult& out) {
    const lapack_int n = static_cast<lapack_int>(A.rows());
    VecR w(n);
    lapack_int info;
    if (is_real(A) && is_real(B)) {
        DenseR a = A.real();
        DenseR b = B.real();
        info = LAPACKE_dsygv(LAPACK_COL_MAJOR, 1, 'V', 'L', n, a.data(), n, b.data(), n,
                             w.data());
        if (info != 0) return false;
        out.vectors = a.cast<Complex>();
    } else {
        DenseC a = A;
        DenseC b = B;
        info = LAPACKE_zhegv(LAPACK_COL_MAJOR, 1, 'V', 'L', n, a.data(), n, b.data(), n,
                             w.data());
        if (info != 0) return false;
        out.vectors = std::move(a);
    }
    out.eigenvalues.assign(w.data(), w.data() + n);
    out.infinite.assign(static_cast<size_t>(n), false);
    return true;
}

}  // namespace

GevpResult dense_gevp(const DenseC& A, const DenseC& B, const SolverConfig& cfg) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw std::invalid_argument("dense_gevp: matrices must be square and same order");
    if (A.rows() > cfg.dense_limit)
        throw std::runtime_error("dense_gevp: problem order " + std::to_string(A.rows()) +
                                 " exceeds dense_limit " + std::to_string(cfg.dense_limit));

    GevpResult out;
    if (is_hermitian(A) && is_hermitian(B) && hermitian_definite_gevp(A, B, out)) return out;

    const lapack_int n = static_cast<lapack_int>(A.rows());
    DenseC a = A;
    DenseC b = B;
    VecC alpha(n), beta(n);
    DenseC vr(n, n);
    const lapack_int info =
        LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, b.data(), n, alpha.data(),
                      beta.data(), nullptr, 1, vr.data(), n);
    if (info != 0)
        throw std::runtime_error("dense_gevp: zggev failed with info=" + std::to_string(info));

    const double beta_max = beta.cwiseAbs().maxCoeff();
    out.eigenvalues.resize(static_cast<size_t>(n));
    out.infinite.resize(static_cast<size_t>(n));
    for (lapack_int i = 0; i < n; ++i) {
        const bool inf = std::abs(beta(i)) <= cfg.qz_tol * beta_max;
        out.infinite[static_cast<size_t>(i)] = inf;
        out.eigenvalues[static_cast<size_t>(i)] = inf ? Complex(0.0) : alpha(i) / beta(i);
    }
    out.vectors = std::move(vr);
    return out;
}

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

/// Indices of the finite eigenpairs, sorted by ascending |lambda|,
/// truncated to k when k > 0.
std::vector<size_t> select_finite(const GevpResult& gevp, int k) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < gevp.eigenvalues.size(); ++i)
        if (!gevp.infinite[i]) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return std::abs(gevp.eigenvalues[a]) < std::abs(gevp.eigenvalues[b]);
    });
    if (k > 0 && idx.size() > static_cast<size_t>(k)) idx.resize(static_cast<size_t>(k));
    return idx;
}

double constraint_residual(const SparseC& C, const VecC& xi) { return (C * xi).norm(); }

}  // namespace

EigenSolution solve_unconstrained(const AssembledSystem& sys, const SolverConfig& cfg) {
    Timer timer;
    const DenseC A = DenseC(sys.A);
    const DenseC M = DenseC(sys.M);
    const GevpResult gevp = dense_gevp(A, M, cfg);

    EigenSolution sol;
    sol.method = SolveMethod::Unconstrained;
    for (size_t i : select_finite(gevp, cfg.k)) {
        Mode mode;
        mode.lambda = gevp.eigenvalues[i];
        mode.xi = gevp.vectors.col(static_cast<Eigen::Index>(i)).normalized();
        mode.residual_eigen = (A * mode.xi - mode.lambda * (M * mode.xi)).norm();
        mode.residual_constraint = constraint_residual(sys.C, mode.xi);
        sol.modes.push_back(std::move(mode));
    }
    sol.solve_seconds = timer.seconds();
    return sol;
}

EigenSolution solve_penalty(const AssembledSystem& sys, double alpha, const SolverConfig& cfg) {
    Timer timer;
    const DenseC C = DenseC(sys.C);
    const DenseC A = DenseC(sys.A) + alpha * (C.adjoint() * C);
    const DenseC M = DenseC(sys.M);
    const GevpResult gevp = dense_gevp(A, M, cfg);

    EigenSolution sol;
    sol.method = SolveMethod::Penalty;
    sol.alpha = alpha;
    for (size_t i : select_finite(gevp, cfg.k)) {
        Mode mode;
        mode.lambda = gevp.eigenvalues[i];
        mode.xi = gevp.vectors.col(static_cast<Eigen::Index>(i)).normalized();
        mode.residual_eigen = (A * mode.xi - mode.lambda * (M * mode.xi)).norm();
        mode.residual_constraint = constraint_residual(sys.C, mode.xi);
        sol.modes.push_back(std::move(mode));
    }
    sol.solve_seconds = timer.seconds();
    return sol;
}

EigenSolution solve_augmented(const AssembledSystem& sys, const SolverConfig& cfg) {
    Timer timer;
    const int n = sys.n;
    const int m = sys.m;
    const DenseC A = DenseC(sys.A);
    const DenseC M = DenseC(sys.M);
    const DenseC C = DenseC(sys.C);

    // Block pencil with the rank-one gauge correction s*ones*ones^dag in
    // the (2,2) block (see the header for why the raw pencil is singular).
    const double s = M.cwiseAbs().maxCoeff();
    DenseC P = DenseC::Zero(n + m, n + m);
    P.topLeftCorner(n, n) = A;
    P.topRightCorner(n, m) = C.adjoint();
    P.bottomLeftCorner(m, n) = C;
    P.bottomRightCorner(m, m).setConstant(Complex(s, 0.0));
    DenseC Q = DenseC::Zero(n + m, n + m);
    Q.topLeftCorner(n, n) = M;

    const GevpResult gevp = dense_gevp(P, Q, cfg);

    EigenSolution sol;
    sol.method = SolveMethod::Augmented;
    // The corrected pencil has exactly n-m+1 finite eigenvalues; QZ can
    // leak a nearly-infinite pair past the |beta| threshold, so cap the
    // selection at that count (the leaked pairs have the largest |lambda|).
    std::vector<size_t> finite = select_finite(gevp, 0);
    const size_t r = static_cast<size_t>(n - m + 1);
    if (finite.size() > r) finite.resize(r);
    if (cfg.k > 0 && finite.size() > static_cast<size_t>(cfg.k))
        finite.resize(static_cast<size_t>(cfg.k));
    for (size_t i : finite) {
        const VecC v = gevp.vectors.col(static_cast<Eigen::Index>(i));
        const VecC xi_raw = v.head(n);
        const double xi_norm = xi_raw.norm();
        if (xi_norm == 0.0) continue;  // pure multiplier direction, not a mode
        Mode mode;
        mode.lambda = gevp.eigenvalues[i];
        mode.xi = xi_raw / xi_norm;
        // Fix the multiplier gauge: scale with xi and add a unit all-ones
        // component (C^dag annihilates it, so residuals are unaffected).
        mode.zeta = VecC(v.tail(m) / xi_norm + VecC::Ones(m));
        mode.residual_eigen =
            std::hypot((A * mode.xi + C.adjoint() * *mode.zeta - mode.lambda * (M * mode.xi)).norm(),
                       (C * mode.xi).norm());
        mode.residual_constraint = constraint_residual(sys.C, mode.xi);
        sol.modes.push_back(std::move(mode));
    }
    sol.solve_seconds = timer.seconds();
    return sol;
}

NullspaceBasis nullspace_basis(const SparseC& C, double rank_tol_factor) {
    const lapack_int m = static_cast<lapack_int>(C.rows());
    const lapack_int n = static_cast<lapack_int>(C.cols());
    const lapack_int k = std::min(m, n);
    VecR sigma(k);
    DenseC vt_c;
    DenseR vt_r;

    const DenseC Cd = DenseC(C);
    lapack_int info;
    const bool real = is_real(Cd);
    if (real) {
        DenseR a = Cd.real();
        DenseR u(m, m);
        vt_r.resize(n, n);
        info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', m, n, a.data(), m, sigma.data(), u.data(),
                              m, vt_r.data(), n);
    } else {
        DenseC a = Cd;
        DenseC u(m, m);
        vt_c.resize(n, n);
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'A', m, n, a.data(), m, sigma.data(), u.data(),
                              m, vt_c.data(), n);
    }
    if (info != 0)
        throw std::runtime_error("nullspace_basis: gesdd failed with info=" +
                                 std::to_string(info));

    const double tol = rank_tol_factor * std::max(m, n) * (k > 0 ? sigma(0) : 0.0);
    lapack_int rank = 0;
    while (rank < k && sigma(rank) > tol) ++rank;

    NullspaceBasis basis;
    basis.r = static_cast<int>(n - rank);
    basis.sigma_min_kept = rank > 0 ? sigma(rank - 1) : 0.0;
    basis.sigma_max_dropped = rank < k ? sigma(rank) : 0.0;
    // Null space = conjugate-transposed trailing rows of V^dag.
    if (real) {
        basis.Q = vt_r.bottomRows(n - rank).transpose().cast<Complex>();
    } else {
        basis.Q = vt_c.bottomRows(n - rank).adjoint();
    }
    return basis;
}

namespace {

bool sparse_is_real(const SparseC& S) {
    for (int k = 0; k < S.outerSize(); ++k)
        for (SparseC::InnerIterator it(S, k); it; ++it)
            if (it.value().imag() != 0.0) return false;
    return true;
}

SparseR real_part(const SparseC& S) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(S.nonZeros()));
    for (int k = 0; k < S.outerSize(); ++k)
        for (SparseC::InnerIterator it(S, k); it; ++it)
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                               it.value().real());
    SparseR out(S.rows(), S.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

/// Galerkin reduction Q^dag S Q through a sparse-dense product; stays in
/// real arithmetic when the whole problem is real.
DenseC reduce(const SparseC& S, const DenseC& Q, bool real) {
    if (real) {
        const DenseR Qr = Q.real();
        const DenseR SQ = real_part(S) * Qr;
        return (Qr.transpose() * SQ).cast<Complex>();
    }
    const DenseC SQ = S * Q;
    return Q.adjoint() * SQ;
}

}  // namespace

EigenSolution solve_projection(const AssembledSystem& sys, const SolverConfig& cfg) {
    Timer timer;
    const NullspaceBasis basis = nullspace_basis(sys.C, cfg.rank_tol_factor);
    const bool real = sparse_is_real(sys.A) && sparse_is_real(sys.M) &&
                      basis.Q.imag().cwiseAbs().maxCoeff() == 0.0;
    const DenseC Ar = reduce(sys.A, basis.Q, real);
    const DenseC Mr = reduce(sys.M, basis.Q, real);
    const GevpResult gevp = dense_gevp(Ar, Mr, cfg);

    EigenSolution sol;
    sol.method = SolveMethod::Projection;
    for (size_t i : select_finite(gevp, cfg.k)) {
        const VecC y = gevp.vectors.col(static_cast<Eigen::Index>(i)).normalized();
        Mode mode;
        mode.lambda = gevp.eigenvalues[i];
        mode.xi = (basis.Q * y).normalized();
        mode.residual_eigen = (Ar * y - mode.lambda * (Mr * y)).norm();
        mode.residual_constraint = constraint_residual(sys.C, mode.xi);
        mode.label = ModeLabel::Physical;
        sol.modes.push_back(std::move(mode));
    }
    sol.solve_seconds = timer.seconds();
    return sol;
}

int count_zero_eigenvalues(const std::vector<Complex>& eigenvalues, double zero_tol_factor) {
    if (eigenvalues.empty()) return 0;
    std::vector<double> mags;
    mags.reserve(eigenvalues.size());
    for (const Complex& z : eigenvalues) mags.push_back(std::abs(z));
    std::sort(mags.begin(), mags.end());

    const auto median_above = [&](double floor) -> double {
        const auto first = std::upper_bound(mags.begin(), mags.end(), floor);
        const size_t count = static_cast<size_t>(mags.end() - first);
        if (count == 0) return 0.0;
        return *(first + count / 2);
    };

    // Split at factor * median of the magnitudes, then refine once with
    // the median restricted to values above the first split.
    double tol = zero_tol_factor * median_above(0.0);
    tol = zero_tol_factor * median_above(tol);
    return static_cast<int>(std::upper_bound(mags.begin(), mags.end(), tol) - mags.begin());
}

double zeta_uniformity(const Mode& mode) {
    if (!mode.zeta || mode.zeta->size() == 0) return 0.0;
    const double scale = mode.zeta->cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    const Complex mean = mode.zeta->mean();
    return (mode.zeta->array() - mean).abs().maxCoeff() / scale;
}

}  // namespace cavity
