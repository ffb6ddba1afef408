#ifndef CAVITYFORGE_FADDEEVA_HPP
#define CAVITYFORGE_FADDEEVA_HPP

#include <complex>

namespace cavityforge
{

// Faddeeva function w(z) = exp(-z^2) erfc(-i z), Weideman's rational
// expansion with 32 terms (absolute error ~1e-13 for Im z >= 0).
std::complex<double> faddeeva_w(std::complex<double> z);

// Area-normalized Voigt profile: Gaussian std dev sigma, Lorentzian HWHM gamma.
// sigma = 0 or gamma = 0 give the pure limits.
double voigt_profile(double x, double sigma, double gamma);

// Voigt from the two FWHMs, scaled to 1 at x = 0.
double voigt_peak_normalized(double x, double fwhm_gaussian, double fwhm_lorentzian);

} // namespace cavityforge

#endif // CAVITYFORGE_FADDEEVA_HPP
