#pragma once

#include <optional>
#include <string_view>

#include "cavity/types.hpp"

namespace cavity {

/// Complex 3x3 relative permittivity / permeability pair. Both tensors
/// must be invertible (the curl-curl form uses eps_r^{-1}; the mass
/// matrix must be invertible for the constraint rank argument).
struct MaterialTensors {
    Mat3c eps_r;
    Mat3c mu_r;
};

/// Loss classification of a nonconductive anisotropic medium:
///   Case1: both tensors Hermitian positive definite (lossless)
///   Case2: eps_r not Hermitian, mu_r HPD (electric lossy)
///   Case3: eps_r HPD, mu_r not Hermitian (magnetic lossy)
///   Case4: neither Hermitian (both lossy)
enum class MediumCase { Case1, Case2, Case3, Case4 };

const char* to_string(MediumCase c);

/// True iff t is Hermitian to `tol` (relative max-norm) and the
/// Hermitian part (t + t^dag)/2 is positive definite.
bool is_hermitian_pd(const Mat3c& t, double tol = 1e-12);

MediumCase classify_medium(const MaterialTensors& mat, double tol = 1e-12);

/// Inverse of a 3x3 tensor; throws on a (numerically) singular input.
Mat3c invert_tensor(const Mat3c& t);

/// f = c0 * sqrt(Lambda) / (2 pi), principal square root.
/// Lambda is the squared vacuum wavenumber (1/m^2), f in Hz.
Complex resonant_frequency(Complex lambda);

/// Inverse of resonant_frequency: Lambda = (2 pi f / c0)^2.
Complex wavenumber_squared(Complex frequency);

MaterialTensors vacuum_material();
/// Electric-lossy preset: eps = diag(2-j, 2-j, 2), mu Hermitian with
/// +-0.375j off-diagonals (Case 2).
MaterialTensors paper_case2_material();
/// Electric and magnetic lossy preset (Case 4).
MaterialTensors paper_case4_material();

/// Lookup by preset name: "vacuum", "paper-case2", "paper-case4".
std::optional<MaterialTensors> material_preset(std::string_view name);

}  // namespace cavity
