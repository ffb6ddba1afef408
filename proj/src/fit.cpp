#include "cavityforge/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "cavityforge/constants.hpp"
#include "cavityforge/errors.hpp"
#include "cavityforge/faddeeva.hpp"

namespace cavityforge
{

namespace
{

const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::log(2.0));

// Reproducible across standard libraries: raw mt19937_64 output only.
class NormalSource
{
public:
    explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    double poisson(double mean)
    {
        if (mean <= 0.0) {
            return 0.0;
        }
        std::poisson_distribution<long long> dist(mean);
        return static_cast<double>(dist(rng_));
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct Moments
{
    double center = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    double fwhm = 0.0;
};

Moments peak_moments(const XYSeries& d)
{
    Moments m;
    const auto [mn, mx] = std::minmax_element(d.y.begin(), d.y.end());
    const auto peak = static_cast<std::size_t>(std::distance(d.y.begin(), mx));
    m.offset = *mn;
    m.amplitude = *mx - *mn;
    m.center = d.x[peak];
    const double half = m.offset + m.amplitude / 2.0;
    const double span = d.x.back() - d.x.front();

    auto crossing = [&](std::ptrdiff_t dir) {
        auto i = static_cast<std::ptrdiff_t>(peak);
        const auto n = static_cast<std::ptrdiff_t>(d.y.size());
        while (i + dir >= 0 && i + dir < n) {
            const auto j = static_cast<std::size_t>(i + dir);
            if (d.y[j] < half) {
                const auto k = static_cast<std::size_t>(i);
                const double f = (d.y[k] - half) / (d.y[k] - d.y[j]);
                return d.x[k] + f * (d.x[j] - d.x[k]);
            }
            i += dir;
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    const double left = crossing(-1);
    const double right = crossing(1);
    if (std::isfinite(left) && std::isfinite(right)) {
        m.fwhm = right - left;
    } else if (std::isfinite(left)) {
        m.fwhm = 2.0 * (m.center - left);
    } else if (std::isfinite(right)) {
        m.fwhm = 2.0 * (right - m.center);
    } else {
        m.fwhm = span / 4.0;
    }
    if (!(m.fwhm > 0.0)) {
        m.fwhm = span / 4.0;
    }
    return m;
}

Eigen::VectorXd weights_of(const XYSeries& d)
{
    Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d.x.size()));
    if (d.y_err) {
        for (std::size_t i = 0; i < d.x.size(); ++i) {
            w[static_cast<Eigen::Index>(i)] = 1.0 / (*d.y_err)[i];
        }
    }
    return w;
}

bool is_flat(const XYSeries& d)
{
    const auto [mn, mx] = std::minmax_element(d.y.begin(), d.y.end());
    const double scale = std::max(std::abs(*mn), std::abs(*mx));
    return (*mx - *mn) <= 1e-12 * scale || *mx == *mn;
}

FitResult package(const std::string& model, const std::vector<std::string>& names, const LeastSquaresResult& ls)
{
    FitResult out;
    out.model = model;
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double var = ls.covariance(i, i);
        out.parameters.push_back({names[k], ls.params[i], var > 0.0 ? std::sqrt(var) : 0.0});
    }
    out.reduced_chi2 = ls.reduced_chi2;
    out.converged = ls.converged;
    out.iterations = ls.iterations;
    out.residuals.assign(ls.residuals.data(), ls.residuals.data() + ls.residuals.size());
    if (!ls.converged) {
        out.warnings.push_back("fit did not converge: " + ls.message);
    }
    return out;
}

FitResult flat_result(const std::string& model, const std::vector<std::string>& names, const XYSeries& d)
{
    FitResult out;
    out.model = model;
    const double mean = std::accumulate(d.y.begin(), d.y.end(), 0.0) / static_cast<double>(d.y.size());
    for (const auto& n : names) {
        double v = std::numeric_limits<double>::quiet_NaN();
        if (n == "amplitude") {
            v = 0.0;
        } else if (n == "offset") {
            v = mean;
        } else if (n == "center") {
            v = 0.5 * (d.x.front() + d.x.back());
        }
        out.parameters.push_back({n, v, 0.0});
    }
    out.degenerate = true;
    out.converged = false;
    out.warnings.push_back("data carry no peak: amplitude is zero and widths are undefined");
    return out;
}

void flag_small_amplitude(FitResult& r, const XYSeries& d)
{
    const double a = r.value("amplitude");
    const double ymax = std::abs(*std::max_element(d.y.begin(), d.y.end(),
                                                   [](double p, double q) { return std::abs(p) < std::abs(q); }));
    if (std::abs(a) <= 1e-9 * ymax || std::abs(a) < r.uncertainty("amplitude")) {
        r.degenerate = true;
        r.warnings.push_back("amplitude not distinguishable from zero");
    }
}

template <class Model>
LeastSquaresProblem curve_problem(const XYSeries& d, Model model)
{
    LeastSquaresProblem prob;
    prob.residual_count = static_cast<Eigen::Index>(d.x.size());
    const Eigen::VectorXd w = weights_of(d);
    prob.residuals = [&d, w, model](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        for (std::size_t i = 0; i < d.x.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            r[k] = (d.y[i] - model(d.x[i], p)) * w[k];
        }
    };
    return prob;
}

FitResult fit_peak(const XYSeries& data, std::optional<PeakParams> init, const LeastSquaresOptions& options,
                   const std::string& model_name, double (*model)(double, const PeakParams&))
{
    validate(data);
    if (data.x.size() < 5) {
        throw InputError(model_name + " fit needs at least 5 points");
    }
    const std::vector<std::string> names{"center", "fwhm", "amplitude", "offset"};
    if (is_flat(data)) {
        return flat_result(model_name, names, data);
    }
    PeakParams p0;
    if (init) {
        p0 = *init;
    } else {
        const Moments m = peak_moments(data);
        p0 = {m.center, m.fwhm, m.amplitude, m.offset};
    }
    const double span = data.x.back() - data.x.front();
    auto prob = curve_problem(data, [model](double x, const Eigen::VectorXd& p) {
        return model(x, PeakParams{p[0], p[1], p[2], p[3]});
    });
    const double inf = std::numeric_limits<double>::infinity();
    prob.lower = Eigen::Vector4d(-inf, 1e-9 * span, -inf, -inf);
    prob.upper = Eigen::Vector4d(inf, inf, inf, inf);
    const double yscale = std::max(std::abs(p0.amplitude), std::abs(p0.offset));
    prob.scale = Eigen::Vector4d(span, p0.fwhm, yscale, yscale);
    const auto ls = levenberg_marquardt(prob, Eigen::Vector4d(p0.center, p0.fwhm, p0.amplitude, p0.offset), options);
    FitResult r = package(model_name, names, ls);
    flag_small_amplitude(r, data);
    return r;
}

// exp(a) erfc(b) without overflow; for large b, exp(a - b^2) erfcx(b).
double exp_erfc(double a, double b)
{
    if (b < 8.0) {
        return std::exp(a) * std::erfc(b);
    }
    const double inv2 = 1.0 / (b * b);
    const double series =
        1.0 + inv2 * (-0.5 + inv2 * (0.75 + inv2 * (-1.875 + inv2 * (6.5625 + inv2 * -29.53125))));
    return std::exp(a - b * b) * series / (b * std::sqrt(kPi));
}

} // namespace

void validate(const XYSeries& d)
{
    if (d.x.size() != d.y.size()) {
        throw InputError("x and y differ in length");
    }
    if (d.x.size() < 2) {
        throw InputError("series needs at least 2 points");
    }
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        if (!std::isfinite(d.x[i]) || !std::isfinite(d.y[i])) {
            throw InputError("series contains non-finite values");
        }
        if (i > 0 && !(d.x[i] > d.x[i - 1])) {
            throw InputError("x must be strictly increasing");
        }
    }
    if (d.y_err) {
        if (d.y_err->size() != d.x.size()) {
            throw InputError("y_err differs in length");
        }
        for (double e : *d.y_err) {
            if (!(e > 0.0) || !std::isfinite(e)) {
                throw InputError("y_err must be > 0");
            }
        }
    }
}

double FitResult::value(const std::string& name) const
{
    for (const auto& p : parameters) {
        if (p.name == name) {
            return p.value;
        }
    }
    throw InputError("fit result has no parameter '" + name + "'");
}

double FitResult::uncertainty(const std::string& name) const
{
    for (const auto& p : parameters) {
        if (p.name == name) {
            return p.uncertainty;
        }
    }
    throw InputError("fit result has no parameter '" + name + "'");
}

double voigt_model(double x, const VoigtParams& p)
{
    return p.offset + p.amplitude * voigt_peak_normalized(x - p.center, p.fwhm_gaussian, p.fwhm_lorentzian);
}

double lorentzian_model(double x, const PeakParams& p)
{
    const double u = 2.0 * (x - p.center) / p.fwhm;
    return p.offset + p.amplitude / (1.0 + u * u);
}

double gaussian_model(double x, const PeakParams& p)
{
    const double u = (x - p.center) / p.fwhm;
    return p.offset + p.amplitude * std::exp(-4.0 * std::log(2.0) * u * u);
}

FitResult fit_voigt(const XYSeries& data, std::optional<VoigtParams> init, const LeastSquaresOptions& options)
{
    validate(data);
    if (data.x.size() < 7) {
        throw InputError("Voigt fit needs at least 7 points");
    }
    const std::vector<std::string> names{"center", "amplitude", "fwhm_gaussian", "fwhm_lorentzian", "offset"};
    if (is_flat(data)) {
        return flat_result("voigt", names, data);
    }
    VoigtParams p0;
    if (init) {
        p0 = *init;
    } else {
        const Moments m = peak_moments(data);
        p0 = {m.center, m.amplitude, 0.6 * m.fwhm, 0.6 * m.fwhm, m.offset};
    }
    const double span = data.x.back() - data.x.front();
    auto prob = curve_problem(data, [](double x, const Eigen::VectorXd& p) {
        return voigt_model(x, VoigtParams{p[0], p[1], p[2], p[3], p[4]});
    });
    const double inf = std::numeric_limits<double>::infinity();
    prob.lower.resize(5);
    prob.upper.resize(5);
    prob.lower << -inf, -inf, 0.0, 1e-9 * span, -inf;
    prob.upper << inf, inf, inf, inf, inf;
    const double yscale = std::max(std::abs(p0.amplitude), std::abs(p0.offset));
    const double wscale = std::max(p0.fwhm_gaussian, p0.fwhm_lorentzian);
    prob.scale.resize(5);
    prob.scale << span, yscale, wscale, wscale, yscale;
    Eigen::VectorXd start(5);
    start << p0.center, p0.amplitude, p0.fwhm_gaussian, p0.fwhm_lorentzian, p0.offset;
    const auto ls = levenberg_marquardt(prob, start, options);
    FitResult r = package("voigt", names, ls);
    flag_small_amplitude(r, data);
    if (span < 2.0 * (r.value("fwhm_gaussian") + r.value("fwhm_lorentzian")) / 2.0) {
        r.warnings.push_back("data span less than twice the fitted linewidth");
    }
    return r;
}

FitResult fit_lorentzian(const XYSeries& data, std::optional<PeakParams> init, const LeastSquaresOptions& options)
{
    return fit_peak(data, init, options, "lorentzian", &lorentzian_model);
}

FitResult fit_gaussian(const XYSeries& data, std::optional<PeakParams> init, const LeastSquaresOptions& options)
{
    return fit_peak(data, init, options, "gaussian", &gaussian_model);
}

void validate(const DecayHistogram& h)
{
    if (h.time_ns.size() != h.counts.size() || h.time_ns.size() < 4) {
        throw InputError("decay histogram needs matching time/count columns with at least 4 bins");
    }
    const double width = h.time_ns[1] - h.time_ns[0];
    if (!(width > 0.0)) {
        throw InputError("decay histogram times must increase");
    }
    for (std::size_t i = 1; i < h.time_ns.size(); ++i) {
        if (std::abs(h.time_ns[i] - h.time_ns[i - 1] - width) > 1e-6 * width) {
            throw InputError("decay histogram bins must be uniform");
        }
    }
    for (double c : h.counts) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw InputError("decay histogram counts must be >= 0");
        }
    }
    if (!(h.irf_sigma_ns >= 0.0)) {
        throw InputError("IRF sigma must be >= 0");
    }
    if (h.fit_window_start_ns < h.time_ns.front() || h.fit_window_start_ns > h.time_ns.back()) {
        throw InputError("fit window start lies outside the histogram");
    }
}

double decay_model(double t, const DecayParams& p, double sigma, double t0)
{
    const double u = t - t0;
    if (sigma <= 0.0) {
        return p.baseline + (u >= 0.0 ? p.amplitude * std::exp(-u / p.tau_ns) : 0.0);
    }
    const double a = sigma * sigma / (2.0 * p.tau_ns * p.tau_ns) - u / p.tau_ns;
    const double b = (sigma * sigma / p.tau_ns - u) / (sigma * std::sqrt(2.0));
    return p.baseline + p.amplitude * 0.5 * exp_erfc(a, b);
}

FitResult fit_lifetime(const DecayHistogram& h, std::optional<DecayParams> init, const LeastSquaresOptions& options)
{
    validate(h);
    XYSeries win;
    for (std::size_t i = 0; i < h.time_ns.size(); ++i) {
        if (h.time_ns[i] >= h.fit_window_start_ns) {
            win.x.push_back(h.time_ns[i]);
            win.y.push_back(h.counts[i]);
        }
    }
    if (win.x.size() < 4) {
        throw InputError("fit window keeps fewer than 4 bins");
    }
    if (*std::max_element(win.y.begin(), win.y.end()) <= 0.0) {
        throw InputError("no counts inside the fit window");
    }
    const double span = win.x.back() - win.x.front();
    const double width = h.time_ns[1] - h.time_ns[0];

    DecayParams p0;
    if (init) {
        p0 = *init;
    } else {
        const std::size_t tail = std::max<std::size_t>(1, win.y.size() / 20);
        p0.baseline = std::accumulate(win.y.end() - static_cast<std::ptrdiff_t>(tail), win.y.end(), 0.0) /
                      static_cast<double>(tail);
        // Log-linear slope over bins well above the baseline.
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
        const double top = win.y.front() - p0.baseline;
        for (std::size_t i = 0; i < win.x.size(); ++i) {
            const double v = win.y[i] - p0.baseline;
            if (v > 0.05 * top && v > 0.0) {
                const double ly = std::log(v);
                sx += win.x[i];
                sy += ly;
                sxx += win.x[i] * win.x[i];
                sxy += win.x[i] * ly;
                n += 1;
            }
        }
        const double slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : -1.0 / span;
        p0.tau_ns = slope < 0.0 ? -1.0 / slope : span / 3.0;
        p0.tau_ns = std::clamp(p0.tau_ns, 2.0 * width, 10.0 * span);
        const double shape = decay_model(win.x.front(), {p0.tau_ns, 1.0, 0.0}, h.irf_sigma_ns, h.irf_center_ns);
        p0.amplitude = std::max(top, 1.0) / std::max(shape, 1e-300);
    }

    // Poisson weights 1 / max(y, 1).
    std::vector<double> w(win.y.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = 1.0 / std::sqrt(std::max(win.y[i], 1.0));
    }
    LeastSquaresProblem prob;
    prob.residual_count = static_cast<Eigen::Index>(win.x.size());
    const double sigma = h.irf_sigma_ns;
    const double t0 = h.irf_center_ns;
    prob.residuals = [&win, w, sigma, t0](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        const DecayParams dp{p[0], p[1], p[2]};
        for (std::size_t i = 0; i < win.x.size(); ++i) {
            r[static_cast<Eigen::Index>(i)] = (win.y[i] - decay_model(win.x[i], dp, sigma, t0)) * w[i];
        }
    };
    const double tau_lo = width / 10.0;
    const double tau_hi = 100.0 * span;
    const double inf = std::numeric_limits<double>::infinity();
    prob.lower = Eigen::Vector3d(tau_lo, 0.0, -inf);
    prob.upper = Eigen::Vector3d(tau_hi, inf, inf);
    prob.scale = Eigen::Vector3d(p0.tau_ns, p0.amplitude, std::max(std::abs(p0.baseline), 1.0));
    const auto ls = levenberg_marquardt(prob, Eigen::Vector3d(p0.tau_ns, p0.amplitude, p0.baseline), options);
    FitResult r = package("lifetime", {"tau_ns", "amplitude", "baseline"}, ls);
    const double tau = r.value("tau_ns");
    if (tau <= tau_lo * (1.0 + 1e-9) || tau >= tau_hi * (1.0 - 1e-9)) {
        r.converged = false;
        r.warnings.push_back("lifetime hit its bound");
    }
    return r;
}

G2Result g2_pulse_areas(const XYSeries& hist, double period, double window, std::optional<double> norm_delay)
{
    validate(hist);
    if (!(period > 0.0) || !(window > 0.0) || !(window < period)) {
        throw InputError("g2 analysis needs period > window > 0");
    }
    const double half_bin = (hist.x[1] - hist.x[0]) / 2.0;
    const double lo = hist.x.front() - half_bin;
    const double hi = hist.x.back() + half_bin;
    const int kmin = static_cast<int>(std::ceil((lo + window / 2.0) / period - 1e-9));
    const int kmax = static_cast<int>(std::floor((hi - window / 2.0) / period + 1e-9));
    if (kmin > -3 || kmax < 3) {
        throw InputError("g2 histogram must span at least 3 pulse periods on each side");
    }

    G2Result out;
    for (int k = kmin; k <= kmax; ++k) {
        const double center = k * period;
        double area = 0.0;
        for (std::size_t i = 0; i < hist.x.size(); ++i) {
            if (std::abs(hist.x[i] - center) <= window / 2.0) {
                area += hist.y[i];
            }
        }
        out.peaks.push_back({k, center, area});
    }
    double max_delay = 0.0;
    for (const auto& p : out.peaks) {
        max_delay = std::max(max_delay, std::abs(p.delay_ns));
    }
    out.normalization_delay_ns = norm_delay ? *norm_delay : 0.5 * max_delay;
    double sum = 0.0;
    for (const auto& p : out.peaks) {
        if (p.index != 0 && std::abs(p.delay_ns) >= out.normalization_delay_ns - 1e-9 * period) {
            sum += p.area;
            ++out.normalization_peaks;
        }
    }
    if (out.normalization_peaks == 0) {
        std::ostringstream msg;
        msg << "no peaks at |delay| >= " << out.normalization_delay_ns << " ns for normalization";
        throw InputError(msg.str());
    }
    out.normalization_area = sum / static_cast<double>(out.normalization_peaks);
    if (!(out.normalization_area > 0.0)) {
        throw DomainError("normalization peaks hold no counts");
    }
    for (const auto& p : out.peaks) {
        if (p.index == 0) {
            out.g2_zero = p.area / out.normalization_area;
        }
    }
    return out;
}

XYSeries linspace_series(double start, double stop, std::size_t n)
{
    if (n < 2) {
        throw InputError("linspace needs at least 2 points");
    }
    XYSeries s;
    s.x.resize(n);
    s.y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s.x[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return s;
}

namespace
{

template <class F>
XYSeries synth_curve(const std::vector<double>& x, F f, double rel_noise, std::uint64_t seed)
{
    NormalSource src(seed);
    XYSeries s;
    s.x = x;
    s.y.resize(x.size());
    std::vector<double> err(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = f(x[i]);
        s.y[i] = rel_noise > 0.0 ? v * (1.0 + rel_noise * src.normal()) : v;
        err[i] = rel_noise * std::abs(v);
    }
    // The generator knows its noise model; exporting it lets the fit weight
    // the points properly.
    if (rel_noise > 0.0) {
        s.y_err = std::move(err);
    }
    return s;
}

} // namespace

XYSeries synth_voigt(const std::vector<double>& x, const VoigtParams& p, double rel_noise, std::uint64_t seed)
{
    return synth_curve(x, [&](double v) { return voigt_model(v, p); }, rel_noise, seed);
}

XYSeries synth_lorentzian(const std::vector<double>& x, const PeakParams& p, double rel_noise, std::uint64_t seed)
{
    return synth_curve(x, [&](double v) { return lorentzian_model(v, p); }, rel_noise, seed);
}

XYSeries synth_gaussian(const std::vector<double>& x, const PeakParams& p, double rel_noise, std::uint64_t seed)
{
    return synth_curve(x, [&](double v) { return gaussian_model(v, p); }, rel_noise, seed);
}

DecayHistogram synth_decay(const DecaySynthesis& s, std::uint64_t seed)
{
    if (!(s.bin_width_ns > 0.0) || !(s.t_stop_ns > s.t_start_ns)) {
        throw InputError("decay synthesis needs a positive bin width and t_stop > t_start");
    }
    NormalSource src(seed);
    DecayHistogram h;
    h.irf_sigma_ns = s.irf_sigma_ns;
    h.irf_center_ns = s.irf_center_ns;
    const auto n = static_cast<std::size_t>(std::floor((s.t_stop_ns - s.t_start_ns) / s.bin_width_ns));
    for (std::size_t i = 0; i < n; ++i) {
        const double t = s.t_start_ns + (static_cast<double>(i) + 0.5) * s.bin_width_ns;
        double mean = decay_model(t, s.decay, s.irf_sigma_ns, s.irf_center_ns);
        if (s.fast_amplitude > 0.0) {
            mean += decay_model(t, {s.fast_tau_ns, s.fast_amplitude, 0.0}, s.irf_sigma_ns, s.irf_center_ns);
        }
        h.time_ns.push_back(t);
        h.counts.push_back(s.poisson ? src.poisson(mean) : mean);
    }
    h.fit_window_start_ns = std::min(3.0, h.time_ns.back());
    return h;
}

XYSeries synth_g2(const G2Synthesis& s, std::uint64_t seed)
{
    if (!(s.period_ns > 0.0) || !(s.bin_width_ns > 0.0) || s.peaks_each_side < 1) {
        throw InputError("g2 synthesis needs a positive period, bin width and peak count");
    }
    NormalSource src(seed);
    const double half_span = (s.peaks_each_side + 0.5) * s.period_ns;
    const auto nbins = static_cast<std::size_t>(std::floor(2.0 * half_span / s.bin_width_ns));
    XYSeries out;
    out.x_label = "delay_ns";
    out.y_label = "coincidences_counts";
    const double root2 = std::sqrt(2.0) * s.peak_sigma_ns;
    for (std::size_t i = 0; i < nbins; ++i) {
        const double a = -half_span + static_cast<double>(i) * s.bin_width_ns;
        const double b = a + s.bin_width_ns;
        double mean = s.background_per_bin;
        for (int k = -s.peaks_each_side; k <= s.peaks_each_side; ++k) {
            const double c = k * s.period_ns;
            const double area = s.mean_peak_area * (k == 0 ? s.center_fraction : 1.0);
            mean += area * 0.5 * (std::erf((b - c) / root2) - std::erf((a - c) / root2));
        }
        out.x.push_back(0.5 * (a + b));
        out.y.push_back(s.poisson ? src.poisson(mean) : mean);
    }
    return out;
}

} // namespace cavityforge
