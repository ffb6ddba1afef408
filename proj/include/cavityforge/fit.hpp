#ifndef CAVITYFORGE_FIT_HPP
#define CAVITYFORGE_FIT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cavityforge/least_squares.hpp"

namespace cavityforge
{

struct XYSeries
{
    std::vector<double> x;
    std::vector<double> y;
    std::optional<std::vector<double>> y_err;
    std::string x_label = "x";
    std::string y_label = "y";
};

// x strictly increasing, equal lengths, finite values, y_err > 0.
void validate(const XYSeries& data);

struct FitParameter
{
    std::string name;
    double value = 0.0;
    double uncertainty = 0.0;
};

struct FitResult
{
    std::string model;
    std::vector<FitParameter> parameters;
    double reduced_chi2 = 0.0;
    bool converged = false;
    bool degenerate = false;
    int iterations = 0;
    std::vector<double> residuals;
    std::vector<std::string> warnings;

    double value(const std::string& name) const;
    double uncertainty(const std::string& name) const;
};

// y = offset + A V(x - x0) / V(0); parameters center, amplitude,
// fwhm_gaussian, fwhm_lorentzian, offset.
struct VoigtParams
{
    double center = 0.0;
    double amplitude = 1.0;
    double fwhm_gaussian = 1.0;
    double fwhm_lorentzian = 1.0;
    double offset = 0.0;
};

double voigt_model(double x, const VoigtParams& p);

// y = offset + A / (1 + (2 (x - x0) / w)^2).
// y = offset + A exp(-4 ln2 (x - x0)^2 / w^2).
struct PeakParams
{
    double center = 0.0;
    double fwhm = 1.0;
    double amplitude = 1.0;
    double offset = 0.0;
};

double lorentzian_model(double x, const PeakParams& p);
double gaussian_model(double x, const PeakParams& p);

FitResult fit_voigt(const XYSeries& data, std::optional<VoigtParams> init = {}, const LeastSquaresOptions& options = {});
FitResult fit_lorentzian(const XYSeries& data, std::optional<PeakParams> init = {},
                         const LeastSquaresOptions& options = {});
FitResult fit_gaussian(const XYSeries& data, std::optional<PeakParams> init = {},
                       const LeastSquaresOptions& options = {});

struct DecayHistogram
{
    std::vector<double> time_ns;  // bin centers, uniform spacing
    std::vector<double> counts;
    double irf_sigma_ns = 0.2;
    double irf_center_ns = 0.0;   // excitation time
    double fit_window_start_ns = 3.0;
};

void validate(const DecayHistogram& h);

struct DecayParams
{
    double tau_ns = 10.0;
    double amplitude = 1.0;
    double baseline = 0.0;
};

// baseline + A (exp(-t / tau) convolved with a normalized Gaussian IRF);
// for sigma = 0 the plain exponential A exp(-(t - t0) / tau), t >= t0.
double decay_model(double t_ns, const DecayParams& p, double irf_sigma_ns, double irf_center_ns);

// Poisson-weighted fit of tau, amplitude and baseline over t >= window start.
FitResult fit_lifetime(const DecayHistogram& h, std::optional<DecayParams> init = {},
                       const LeastSquaresOptions& options = {});

struct PeakArea
{
    int index = 0;           // k: expected peak at k * period
    double delay_ns = 0.0;
    double area = 0.0;
};

struct G2Result
{
    std::vector<PeakArea> peaks;
    double g2_zero = 0.0;
    double normalization_area = 0.0;
    double normalization_delay_ns = 0.0;
    std::size_t normalization_peaks = 0;
};

// Sums counts with |delay - k period| <= window / 2. g2(0) is the k = 0 area
// over the mean area of peaks with |delay| >= normalization delay (default:
// half the largest peak delay available).
G2Result g2_pulse_areas(const XYSeries& histogram, double pulse_period_ns, double window_ns,
                        std::optional<double> normalization_delay_ns = {});

// Seeded synthetic data.
XYSeries linspace_series(double start, double stop, std::size_t n);

// Multiplicative Gaussian noise y (1 + rel_noise N(0, 1)).
XYSeries synth_voigt(const std::vector<double>& x, const VoigtParams& p, double rel_noise, std::uint64_t seed);
XYSeries synth_lorentzian(const std::vector<double>& x, const PeakParams& p, double rel_noise, std::uint64_t seed);
XYSeries synth_gaussian(const std::vector<double>& x, const PeakParams& p, double rel_noise, std::uint64_t seed);

struct DecaySynthesis
{
    double bin_width_ns = 0.05;
    double t_start_ns = -2.0;
    double t_stop_ns = 80.0;
    DecayParams decay{12.6, 1e4, 10.0};
    double irf_sigma_ns = 0.2;
    double irf_center_ns = 0.0;
    // Optional fast component added before the window.
    double fast_amplitude = 0.0;
    double fast_tau_ns = 0.5;
    bool poisson = true;
};

DecayHistogram synth_decay(const DecaySynthesis& s, std::uint64_t seed);

struct G2Synthesis
{
    double period_ns = 50.0;
    int peaks_each_side = 10;
    double peak_sigma_ns = 2.0;
    double bin_width_ns = 0.5;
    double mean_peak_area = 1e4;
    double center_fraction = 0.27;
    double background_per_bin = 0.0;
    bool poisson = true;
};

XYSeries synth_g2(const G2Synthesis& s, std::uint64_t seed);

} // namespace cavityforge

#endif // CAVITYFORGE_FIT_HPP
