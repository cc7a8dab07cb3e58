#pragma once

namespace plad {

double normal_pdf(double x) noexcept;
/// Phi(x), evaluated through erfc so both tails keep relative precision.
double normal_cdf(double x) noexcept;
/// 1 - Phi(x).
double normal_sf(double x) noexcept;

/// Phi^{-1}(u) for u in (0, 1); throws DomainError otherwise.
/// Acklam's rational approximation followed by one Halley refinement step
/// against the erfc-based CDF; absolute error well below 1e-10.
double inverse_normal_cdf(double u);

}  // namespace plad
