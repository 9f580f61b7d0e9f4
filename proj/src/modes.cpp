#include "cavity/modes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "cavity/materials.hpp"

namespace cavity {

const char* to_string(ReferenceSource s) {
    switch (s) {
        case ReferenceSource::AnalyticBox: return "analytic-box";
        case ReferenceSource::PaperSphere: return "sphere";
        case ReferenceSource::PaperCylinderCase2: return "cylinder-case2";
        case ReferenceSource::PaperCylinderCase4: return "cylinder-case4";
        case ReferenceSource::ExternalFile: return "file";
    }
    return "?";
}

EigenSolution classify_by_residual(EigenSolution sol, double tau) {
    for (Mode& mode : sol.modes)
        mode.label = mode.residual_constraint <= tau ? ModeLabel::Physical : ModeLabel::Spurious;
    return sol;
}

double default_residual_threshold(const SparseC& C) {
    double frob2 = 0.0;
    for (int k = 0; k < C.outerSize(); ++k)
        for (SparseC::InnerIterator it(C, k); it; ++it) frob2 += std::norm(it.value());
    return 1e-6 * std::sqrt(frob2);
}

namespace {

bool eigenvalues_match(Complex a, Complex b, double match_tol) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= match_tol * scale;
}

}  // namespace

AlphaSweepResult classify_by_alpha_sweep(const AssembledSystem& sys,
                                         const std::vector<double>& alphas, double match_tol,
                                         const SolverConfig& cfg) {
    if (alphas.size() < 2)
        throw std::invalid_argument("classify_by_alpha_sweep: need at least two alpha values");

    AlphaSweepResult result;
    for (double alpha : alphas) result.runs.push_back(solve_penalty(sys, alpha, cfg));

    // An eigenvalue is stable iff every other run contains a partner
    // within match_tol relative distance.
    for (size_t r = 0; r < result.runs.size(); ++r) {
        for (Mode& mode : result.runs[r].modes) {
            bool stable = true;
            for (size_t other = 0; other < result.runs.size() && stable; ++other) {
                if (other == r) continue;
                stable = std::any_of(
                    result.runs[other].modes.begin(), result.runs[other].modes.end(),
                    [&](const Mode& cand) {
                        return eigenvalues_match(mode.lambda, cand.lambda, match_tol);
                    });
            }
            mode.label = stable ? ModeLabel::Physical : ModeLabel::Spurious;
            if (r == 0) {
                (stable ? result.stable : result.unstable).push_back(mode.lambda);
            }
        }
    }
    const auto by_mag = [](Complex a, Complex b) { return std::abs(a) < std::abs(b); };
    std::sort(result.stable.begin(), result.stable.end(), by_mag);
    std::sort(result.unstable.begin(), result.unstable.end(), by_mag);
    return result;
}

ReferenceSpectrum analytic_box_eigenvalues(double a, double b, double c, int count) {
    if (a <= 0 || b <= 0 || c <= 0)
        throw std::invalid_argument("analytic_box_eigenvalues: dimensions must be positive");
    if (count < 1) throw std::invalid_argument("analytic_box_eigenvalues: count must be >= 1");

    constexpr int kMaxIndex = 20;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    std::vector<std::pair<double, int>> raw;  // (Lambda, modes at that index triple)
    for (int p = 0; p <= kMaxIndex; ++p)
        for (int q = 0; q <= kMaxIndex; ++q)
            for (int s = 0; s <= kMaxIndex; ++s) {
                const int zeros = (p == 0) + (q == 0) + (s == 0);
                if (zeros >= 2) continue;  // no resonance with two zero indices
                const double lam =
                    pi2 * (p * p / (a * a) + q * q / (b * b) + s * s / (c * c));
                raw.emplace_back(lam, zeros == 0 ? 2 : 1);
            }
    std::sort(raw.begin(), raw.end());

    ReferenceSpectrum ref;
    ref.source = ReferenceSource::AnalyticBox;
    for (const auto& [lam, mult] : raw) {
        if (!ref.values.empty() &&
            std::abs(lam - ref.values.back().first.real()) <= 1e-9 * lam) {
            ref.values.back().second += mult;
        } else {
            if (static_cast<int>(ref.values.size()) == count) break;
            ref.values.emplace_back(Complex(lam, 0.0), mult);
        }
    }
    return ref;
}

ReferenceSpectrum paper_reference(const std::string& id) {
    ReferenceSpectrum ref;
    if (id == "sphere") {
        // Lowest resonance of the unit ball with perfectly conducting
        // wall and vacuum fill; threefold degenerate.
        ref.source = ReferenceSource::PaperSphere;
        ref.values = {{Complex(7.52793, 0.0), 3}};
        return ref;
    }
    if (id == "cylinder-case2") {
        // Commercial-solver values for the 0.2 m radius, 0.5 m height
        // cylinder with the lossy-permittivity / gyrotropic preset.
        ref.source = ReferenceSource::PaperCylinderCase2;
        ref.values = {{Complex(23.8230, 11.9085), 1},
                      {Complex(26.3968, 13.1848), 1},
                      {Complex(37.6067, 0.0069), 1}};
        return ref;
    }
    if (id == "cylinder-case4") {
        // Same cylinder with the doubly-lossy preset; first two modes.
        ref.source = ReferenceSource::PaperCylinderCase4;
        ref.values = {{Complex(24.2476, -7.5597), 1}, {Complex(25.2649, -9.7244), 1}};
        return ref;
    }
    throw std::invalid_argument("paper_reference: unknown id '" + id + "'");
}

namespace {

struct Cluster {
    Complex mean{0.0};
    int size = 0;
    bool used = false;
};

/// Group physical eigenvalues (sorted by magnitude) into clusters of
/// relative radius 1%; degenerate modes split slightly by discretization
/// collapse to one cluster.
std::vector<Cluster> cluster_physical(const EigenSolution& sol) {
    std::vector<Complex> phys;
    for (const Mode& mode : sol.modes)
        if (mode.label == ModeLabel::Physical) phys.push_back(mode.lambda);
    std::sort(phys.begin(), phys.end(),
              [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });

    std::vector<Cluster> clusters;
    for (Complex lam : phys) {
        if (!clusters.empty()) {
            Cluster& last = clusters.back();
            if (std::abs(lam - last.mean) <= 0.01 * std::abs(last.mean)) {
                last.mean = (last.mean * double(last.size) + lam) / double(last.size + 1);
                ++last.size;
                continue;
            }
        }
        clusters.push_back({lam, 1, false});
    }
    return clusters;
}

}  // namespace

ComparisonReport compare_to_reference(const EigenSolution& sol, const ReferenceSpectrum& ref,
                                      double rel_tol) {
    ComparisonReport report;
    report.rel_tol = rel_tol;
    std::vector<Cluster> clusters = cluster_physical(sol);

    bool all_within = true;
    for (const auto& [target, mult] : ref.values) {
        // Greedy nearest unused cluster.
        int best = -1;
        double best_dist = 0.0;
        for (size_t i = 0; i < clusters.size(); ++i) {
            if (clusters[i].used) continue;
            const double dist = std::abs(clusters[i].mean - target);
            if (best < 0 || dist < best_dist) {
                best = static_cast<int>(i);
                best_dist = dist;
            }
        }
        if (best < 0) {
            report.partial = true;
            continue;
        }
        clusters[static_cast<size_t>(best)].used = true;
        MatchRow row;
        row.computed = clusters[static_cast<size_t>(best)].mean;
        row.cluster_size = clusters[static_cast<size_t>(best)].size;
        row.reference = target;
        row.multiplicity = mult;
        row.rel_error = best_dist / std::abs(target);
        if (row.rel_error > rel_tol) all_within = false;
        report.rows.push_back(row);
    }
    report.pass = all_within && !report.partial && !ref.values.empty();
    return report;
}

std::string ComparisonReport::to_string() const {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-28s %-28s %5s %5s %10s\n", "computed", "reference", "size",
                  "mult", "rel_err");
    out += buf;
    for (const MatchRow& row : rows) {
        std::snprintf(buf, sizeof buf, "%13.6f%+13.6fj %13.6f%+13.6fj %5d %5d %10.3e\n",
                      row.computed.real(), row.computed.imag(), row.reference.real(),
                      row.reference.imag(), row.cluster_size, row.multiplicity, row.rel_error);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "result: %s (rel_tol %.3g)\n",
                  pass ? "pass" : (partial ? "partial" : "fail"), rel_tol);
    out += buf;
    return out;
}

std::string report_csv(const EigenSolution& sol, const ComparisonReport& report, double mesh_h) {
    std::string out =
        "mode,lambda_re,lambda_im,freq_re,freq_im,residual_constraint,residual_eigen,"
        "label,mesh_h,ref_re,ref_im,rel_error\n";
    char buf[512];
    for (size_t i = 0; i < sol.modes.size(); ++i) {
        const Mode& mode = sol.modes[i];
        const Complex f = resonant_frequency(mode.lambda);
        std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s,%.12g", i + 1,
                      mode.lambda.real(), mode.lambda.imag(), f.real(), f.imag(),
                      mode.residual_constraint, mode.residual_eigen, to_string(mode.label),
                      mesh_h);
        out += buf;
        // Attach the reference row whose matched cluster contains this mode.
        const MatchRow* match = nullptr;
        for (const MatchRow& row : report.rows) {
            if (std::abs(mode.lambda - row.computed) <= 0.01 * std::abs(row.computed)) {
                match = &row;
                break;
            }
        }
        if (match) {
            std::snprintf(buf, sizeof buf, ",%.12g,%.12g,%.12g\n", match->reference.real(),
                          match->reference.imag(), match->rel_error);
            out += buf;
        } else {
            out += ",,,\n";
        }
    }
    return out;
}

}  // namespace cavity
