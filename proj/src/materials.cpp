#include "cavity/materials.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cavity {

const char* to_string(MediumCase c) {
    switch (c) {
        case MediumCase::Case1: return "Case1";
        case MediumCase::Case2: return "Case2";
        case MediumCase::Case3: return "Case3";
        case MediumCase::Case4: return "Case4";
    }
    return "?";
}

bool is_hermitian_pd(const Mat3c& t, double tol) {
    const double scale = t.cwiseAbs().maxCoeff();
    if (!t.allFinite()) return false;
    if ((t - t.adjoint()).cwiseAbs().maxCoeff() > tol * scale) return false;
    const Mat3c herm = 0.5 * (t + t.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat3c> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 0.0;
}

MediumCase classify_medium(const MaterialTensors& mat, double tol) {
    const bool eps_ok = is_hermitian_pd(mat.eps_r, tol);
    const bool mu_ok = is_hermitian_pd(mat.mu_r, tol);
    if (eps_ok && mu_ok) return MediumCase::Case1;
    if (!eps_ok && mu_ok) return MediumCase::Case2;
    if (eps_ok && !mu_ok) return MediumCase::Case3;
    return MediumCase::Case4;
}

Mat3c invert_tensor(const Mat3c& t) {
    const Complex det = t.determinant();
    const double scale = t.cwiseAbs().maxCoeff();
    if (std::abs(det) <= 1e-14 * scale * scale * scale)
        throw std::runtime_error("invert_tensor: singular material tensor");
    return t.inverse();
}

Complex resonant_frequency(Complex lambda) {
    return kSpeedOfLight * std::sqrt(lambda) / (2.0 * std::numbers::pi);
}

Complex wavenumber_squared(Complex frequency) {
    const Complex k = 2.0 * std::numbers::pi * frequency / kSpeedOfLight;
    return k * k;
}

MaterialTensors vacuum_material() {
    return {Mat3c::Identity(), Mat3c::Identity()};
}

MaterialTensors paper_case2_material() {
    using namespace std::complex_literals;
    Mat3c eps = Mat3c::Zero();
    eps(0, 0) = 2.0 - 1.0i;
    eps(1, 1) = 2.0 - 1.0i;
    eps(2, 2) = 2.0;
    Mat3c mu = Mat3c::Zero();
    mu(0, 0) = 2.0;
    mu(1, 1) = 2.0;
    mu(2, 2) = 2.0;
    mu(0, 1) = -0.375i;
    mu(1, 0) = 0.375i;
    return {eps, mu};
}

MaterialTensors paper_case4_material() {
    using namespace std::complex_literals;
    Mat3c eps = Mat3c::Zero();
    eps(0, 0) = 2.0 + 1.0i;
    eps(1, 1) = 2.0 + 1.0i;
    eps(2, 2) = 2.0;
    Mat3c mu = Mat3c::Zero();
    mu(0, 0) = 2.0 - 1.0i;
    mu(1, 1) = 2.0 - 1.0i;
    mu(2, 2) = 2.0;
    mu(0, 1) = 0.375i;
    mu(1, 0) = 0.375i;
    return {eps, mu};
}

std::optional<MaterialTensors> material_preset(std::string_view name) {
    if (name == "vacuum") return vacuum_material();
    if (name == "paper-case2") return paper_case2_material();
    if (name == "paper-case4") return paper_case4_material();
    return std::nullopt;
}

}  // namespace cavity
