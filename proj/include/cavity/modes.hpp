#pragma once

#include <string>
#include <vector>

#include "cavity/eigensolvers.hpp"
#include "cavity/types.hpp"

namespace cavity {

enum class ReferenceSource {
    AnalyticBox,
    PaperSphere,
    PaperCylinderCase2,
    PaperCylinderCase4,
    ExternalFile,
};

const char* to_string(ReferenceSource s);

/// Target eigenvalues with multiplicities, sorted by |Lambda|.
struct ReferenceSpectrum {
    ReferenceSource source = ReferenceSource::ExternalFile;
    std::vector<std::pair<Complex, int>> values;  // (Lambda, multiplicity)
    double tolerance = 0.05;                      // default relative tolerance
};

/// Label each mode physical iff |C xi|_2 <= tau.
EigenSolution classify_by_residual(EigenSolution sol, double tau);

/// Default residual threshold 1e-6 * |C|_F; the observed residual
/// distribution is bimodal with many orders of magnitude in between.
double default_residual_threshold(const SparseC& C);

/// Penalty alpha-sweep classification: an eigenvalue is physical iff a
/// partner within match_tol relative distance exists in every run.
struct AlphaSweepResult {
    std::vector<Complex> stable;    // physical, sorted by |lambda|
    std::vector<Complex> unstable;  // spurious, sorted by |lambda|
    std::vector<EigenSolution> runs;
};

AlphaSweepResult classify_by_alpha_sweep(const AssembledSystem& sys,
                                         const std::vector<double>& alphas,
                                         double match_tol,
                                         const SolverConfig& cfg = {});

/// The `count` smallest resonances Lambda = pi^2 (p^2/a^2 + q^2/b^2 + s^2/c^2)
/// of a rectangular cavity, with multiplicities: 2 modes when all three
/// indices are nonzero (one TE, one TM), 1 when exactly one index is zero.
ReferenceSpectrum analytic_box_eigenvalues(double a, double b, double c, int count);

/// Embedded reference data for the three experiments:
/// "sphere", "cylinder-case2", "cylinder-case4".
ReferenceSpectrum paper_reference(const std::string& id);

struct MatchRow {
    Complex computed;       // cluster mean
    int cluster_size = 0;
    Complex reference;
    int multiplicity = 0;
    double rel_error = 0.0;
};

struct ComparisonReport {
    std::vector<MatchRow> rows;
    bool pass = false;
    bool partial = false;   // fewer physical modes than reference entries
    double rel_tol = 0.0;

    std::string to_string() const;
};

/// Greedy nearest matching of physical-eigenvalue clusters (cluster
/// radius 1% of |Lambda|, means compared) against the reference values.
ComparisonReport compare_to_reference(const EigenSolution& sol,
                                      const ReferenceSpectrum& ref, double rel_tol);

/// CSV comparison table: one row per mode with its reference match (if
/// any), 12 significant digits.
std::string report_csv(const EigenSolution& sol, const ComparisonReport& report,
                       double mesh_h);

}  // namespace cavity
