#include "cavityforge/faddeeva.hpp"

#include <array>
#include <cmath>

#include "cavityforge/constants.hpp"

namespace cavityforge
{

namespace
{

constexpr int kTerms = 32;

struct Expansion
{
    double l = 0.0;
    std::array<double, kTerms> a{};  // a[j - 1], j = 1 .. kTerms

    Expansion()
    {
        const int m = 2 * kTerms;
        const int m2 = 2 * m;
        l = std::sqrt(kTerms / std::sqrt(2.0));
        // f(t) sampled at t_k = L tan(k pi / m2), |k| < m; the k = -m sample is 0.
        std::array<double, 2 * m - 1> f{};
        for (int k = -m + 1; k < m; ++k) {
            const double t = l * std::tan(k * kPi / m2);
            f[static_cast<std::size_t>(k + m - 1)] = std::exp(-t * t) * (l * l + t * t);
        }
        // f is even, so its DFT is a cosine sum.
        for (int j = 1; j <= kTerms; ++j) {
            double s = 0.0;
            for (int k = -m + 1; k < m; ++k) {
                s += f[static_cast<std::size_t>(k + m - 1)] * std::cos(2.0 * kPi * j * k / m2);
            }
            a[static_cast<std::size_t>(j - 1)] = s / m2;
        }
    }
};

const Expansion& expansion()
{
    static const Expansion e;
    return e;
}

} // namespace

std::complex<double> faddeeva_w(std::complex<double> z)
{
    const std::complex<double> i{0.0, 1.0};
    if (z.imag() < 0.0) {
        return 2.0 * std::exp(-z * z) - faddeeva_w(-z);
    }
    const auto& e = expansion();
    const std::complex<double> denom = e.l - i * z;
    const std::complex<double> big_z = (e.l + i * z) / denom;
    std::complex<double> p = 0.0;
    for (int j = kTerms; j >= 1; --j) {
        p = p * big_z + e.a[static_cast<std::size_t>(j - 1)];
    }
    return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(kPi)) / denom;
}

double voigt_profile(double x, double sigma, double gamma)
{
    if (sigma <= 0.0) {
        return gamma / (kPi * (x * x + gamma * gamma));
    }
    if (gamma <= 0.0) {
        return std::exp(-x * x / (2.0 * sigma * sigma)) / (sigma * std::sqrt(2.0 * kPi));
    }
    const std::complex<double> z{x / (sigma * std::sqrt(2.0)), gamma / (sigma * std::sqrt(2.0))};
    return faddeeva_w(z).real() / (sigma * std::sqrt(2.0 * kPi));
}

double voigt_peak_normalized(double x, double fwhm_gaussian, double fwhm_lorentzian)
{
    const double sigma = fwhm_gaussian / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double gamma = fwhm_lorentzian / 2.0;
    // Deep in the Lorentzian limit the complex argument grows large; the
    // Gaussian part is then below the expansion's resolution.
    if (sigma < 1e-8 * gamma) {
        return 1.0 / (1.0 + x * x / (gamma * gamma));
    }
    return voigt_profile(x, sigma, gamma) / voigt_profile(0.0, sigma, gamma);
}

} // namespace cavityforge
