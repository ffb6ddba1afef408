#include "cavityforge/tmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <sstream>

#include "cavityforge/constants.hpp"
#include "cavityforge/errors.hpp"
#include "cavityforge/parallel.hpp"

namespace cavityforge
{

namespace
{

constexpr Complex kI{0.0, 1.0};

template <class F>
double golden_maximize(F&& f, double a, double b, double tol)
{
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (std::abs(b - a) > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Cavity split around the air gap so that T(lambda, L) costs one layer.
struct SplitCavity
{
    std::vector<Layer> lower;  // bottom DBR + diamond, bottom to top
    std::vector<Layer> upper;  // top DBR
    Complex air_index;
    double n_bottom = 1.0;
    double n_top = 1.0;

    explicit SplitCavity(const CavityAssembly& cavity)
        : air_index(cavity.air_gap.index), n_bottom(cavity.bottom_substrate_index()),
          n_top(cavity.top_substrate_index())
    {
        const auto bottom = build_dbr(cavity.bottom_mirror);
        lower.assign(bottom.rbegin(), bottom.rend());
        if (cavity.has_diamond()) {
            lower.push_back(cavity.diamond);
        }
        upper = build_dbr(cavity.top_mirror);
    }

    double transmittance(double air_nm, double wavelength_nm) const
    {
        const Matrix2 m = stack_matrix(lower, wavelength_nm) *
                          characteristic_matrix(air_index, air_nm, wavelength_nm) *
                          stack_matrix(upper, wavelength_nm);
        return response_from_matrix(m, n_bottom, n_top, wavelength_nm).transmittance;
    }
};

// Transmission on a fixed wavelength grid with the mirror matrices cached.
class GridScanner
{
public:
    GridScanner(const SplitCavity& split, WavelengthWindow window, double step)
        : split_(split), window_(window)
    {
        const auto n = static_cast<std::size_t>(std::floor((window.upper_nm - window.lower_nm) / step + 1e-9)) + 1;
        wavelengths_.resize(n);
        lower_.resize(n);
        upper_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double lam = window.lower_nm + static_cast<double>(i) * step;
            wavelengths_[i] = lam;
            lower_[i] = stack_matrix(split.lower, lam);
            upper_[i] = stack_matrix(split.upper, lam);
        }
    }

    const std::vector<double>& wavelengths() const { return wavelengths_; }

    std::vector<double> scan(double air_nm) const
    {
        std::vector<double> t(wavelengths_.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const Matrix2 m =
                lower_[i] * characteristic_matrix(split_.air_index, air_nm, wavelengths_[i]) * upper_[i];
            t[i] = response_from_matrix(m, split_.n_bottom, split_.n_top, wavelengths_[i]).transmittance;
        }
        return t;
    }

private:
    const SplitCavity& split_;
    WavelengthWindow window_;
    std::vector<double> wavelengths_;
    std::vector<Matrix2> lower_;
    std::vector<Matrix2> upper_;
};

// 1/T of a Lorentzian peak is quadratic in the detuning.
double lorentzian_fwhm(const std::function<double(double)>& transmittance, double peak, double initial_step)
{
    double h = initial_step;
    double fwhm = std::numeric_limits<double>::quiet_NaN();
    for (int pass = 0; pass < 4; ++pass) {
        // Least-squares fit of y = c0 + c1 x + c2 x^2 on x = -2h..2h.
        double s[5] = {0, 0, 0, 0, 0};
        double sy[3] = {0, 0, 0};
        for (int j = -2; j <= 2; ++j) {
            const double x = j * h;
            const double y = 1.0 / transmittance(peak + x);
            double xp = 1.0;
            for (int p = 0; p < 5; ++p) {
                s[p] += xp;
                if (p < 3) {
                    sy[p] += xp * y;
                }
                xp *= x;
            }
        }
        // Normal equations (3x3), Cramer's rule.
        const double a[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
        auto det3 = [](const double m[3][3]) {
            return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        };
        const double d = det3(a);
        double c[3];
        for (int k = 0; k < 3; ++k) {
            double m[3][3];
            for (int r = 0; r < 3; ++r) {
                for (int col = 0; col < 3; ++col) {
                    m[r][col] = (col == k) ? sy[r] : a[r][col];
                }
            }
            c[k] = det3(m) / d;
        }
        if (!(c[2] > 0.0)) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double ymin = c[0] - c[1] * c[1] / (4.0 * c[2]);
        fwhm = 2.0 * std::sqrt(std::max(ymin, 0.0) / c[2]);
        if (!(fwhm > 0.0)) {
            return fwhm;
        }
        h = fwhm / 4.0;
    }
    return fwhm;
}

double wrap_phase(double phi)
{
    phi = std::fmod(phi, 2.0 * kPi);
    return phi < 0.0 ? phi + 2.0 * kPi : phi;
}

void check_window(const CavityAssembly& cavity, WavelengthWindow window)
{
    if (!(window.upper_nm > window.lower_nm) || !(window.lower_nm > 0.0)) {
        throw InputError("wavelength window must satisfy 0 < lower < upper");
    }
    for (const MirrorSpec* mirror : {&cavity.bottom_mirror, &cavity.top_mirror}) {
        const Stopband band = stopband(*mirror);
        if (window.lower_nm < band.lower_nm || window.upper_nm > band.upper_nm) {
            std::ostringstream msg;
            msg << "wavelength window [" << window.lower_nm << ", " << window.upper_nm
                << "] nm leaves the mirror stopband [" << band.lower_nm << ", " << band.upper_nm << "] nm";
            throw InputError(msg.str());
        }
    }
}

ResonanceSearch peaks_from_scan(const SplitCavity& split, double air_nm, const std::vector<double>& lam,
                                const std::vector<double>& t, const ResonanceOptions& options)
{
    ResonanceSearch out;
    const std::size_t n = t.size();
    if (n < 3) {
        return out;
    }
    const auto reach = static_cast<std::size_t>(std::ceil(0.5 / options.grid_step_nm));
    auto full_t = [&](double l) { return split.transmittance(air_nm, l); };

    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(t[i] > t[i - 1] && t[i] >= t[i + 1])) {
            continue;
        }
        const std::size_t lo = i > reach ? i - reach : 0;
        const std::size_t hi = std::min(n - 1, i + reach);
        const double background = *std::min_element(t.begin() + static_cast<std::ptrdiff_t>(lo),
                                                    t.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
        if (t[i] < options.min_contrast * background) {
            continue;
        }
        Resonance r;
        r.wavelength_nm = golden_maximize(full_t, lam[i - 1], lam[i + 1], options.tolerance_nm);
        r.peak_transmission = full_t(r.wavelength_nm);
        r.linewidth_nm = lorentzian_fwhm(full_t, r.wavelength_nm, options.grid_step_nm / 4.0);
        r.q_factor = r.wavelength_nm / r.linewidth_nm;
        if (i <= 2 || i + 3 >= n) {
            std::ostringstream msg;
            msg << "resonance at " << r.wavelength_nm << " nm abuts the window edge";
            out.warnings.push_back(msg.str());
        }
        out.resonances.push_back(r);
    }
    // Rising edges: a peak may sit just outside the window.
    if (t[0] > t[1] && t[0] >= options.min_contrast * *std::min_element(t.begin(), t.begin() + std::min(n, reach))) {
        out.warnings.push_back("transmission rises toward the lower window edge; a resonance may lie outside");
    }
    if (t[n - 1] > t[n - 2] &&
        t[n - 1] >= options.min_contrast * *std::min_element(t.end() - static_cast<std::ptrdiff_t>(std::min(n, reach)), t.end())) {
        out.warnings.push_back("transmission rises toward the upper window edge; a resonance may lie outside");
    }
    return out;
}

// Forward/backward amplitudes for unit incidence from the bottom substrate.
std::vector<FieldSegment> solve_segments(const std::vector<Layer>& layers, double n_in, double n_out,
                                         double wavelength_nm)
{
    const StackResponse resp = stack_response(layers, n_in, n_out, wavelength_nm);
    Complex e = resp.t;
    Complex h = n_out * resp.t;

    std::vector<FieldSegment> segs(layers.size());
    for (std::size_t j = layers.size(); j-- > 0;) {
        const Layer& layer = layers[j];
        const Matrix2 m = characteristic_matrix(layer, wavelength_nm);
        const Complex ef = m.m11 * e + m.m12 * h;
        const Complex hf = m.m21 * e + m.m22 * h;
        segs[j].name = layer.name;
        segs[j].index = layer.index;
        segs[j].thickness_nm = layer.thickness_nm;
        segs[j].forward = 0.5 * (ef + hf / layer.index);
        segs[j].backward = 0.5 * (ef - hf / layer.index);
        e = ef;
        h = hf;
    }
    double z = 0.0;
    for (auto& s : segs) {
        s.z_start_nm = z;
        z += s.thickness_nm;
    }
    return segs;
}

Complex segment_field(const FieldSegment& s, double x, double wavelength_nm)
{
    const Complex k = 2.0 * kPi * s.index / wavelength_nm;
    const Complex phase = std::exp(kI * k * x);
    return s.forward * phase + s.backward / phase;
}

bool lossless(const FieldSegment& s) { return s.index.imag() == 0.0; }

// Phase of the |E|^2 modulation in a lossless segment:
// |E|^2 = |A|^2 + |B|^2 + 2|A||B| cos(2 k x + phi).
double modulation_phase(const FieldSegment& s) { return std::arg(s.forward) - std::arg(s.backward); }

FieldProfile::Extremum segment_max(const FieldSegment& s, double wavelength_nm)
{
    FieldProfile::Extremum best;
    auto consider = [&](double x) {
        const double a = std::abs(segment_field(s, x, wavelength_nm));
        if (a > best.amplitude) {
            best = {s.z_start_nm + x, a};
        }
    };
    consider(0.0);
    consider(s.thickness_nm);
    if (lossless(s)) {
        const double k = 2.0 * kPi * s.index.real() / wavelength_nm;
        const double phi = modulation_phase(s);
        // 2 k x + phi = 2 pi m
        const double m0 = std::ceil(phi / (2.0 * kPi));
        for (double m = m0;; m += 1.0) {
            const double x = (2.0 * kPi * m - phi) / (2.0 * k);
            if (x > s.thickness_nm) {
                break;
            }
            if (x >= 0.0) {
                consider(x);
            }
        }
    } else {
        const int n = 2000;
        for (int i = 1; i < n; ++i) {
            consider(s.thickness_nm * i / n);
        }
    }
    return best;
}

double segment_energy_raw(const FieldSegment& s, double wavelength_nm)
{
    const double d = s.thickness_nm;
    const Complex k = 2.0 * kPi * s.index / wavelength_nm;
    const double kr = k.real();
    const double ki = k.imag();
    const double eps = (s.index * s.index).real();

    const double a2 = std::norm(s.forward);
    const double b2 = std::norm(s.backward);
    double ia;
    double ib;
    if (ki == 0.0) {
        ia = d;
        ib = d;
    } else {
        ia = -std::expm1(-2.0 * ki * d) / (2.0 * ki);
        ib = std::expm1(2.0 * ki * d) / (2.0 * ki);
    }
    Complex icross;
    if (kr == 0.0) {
        icross = d;
    } else {
        icross = (std::exp(2.0 * kI * kr * d) - 1.0) / (2.0 * kI * kr);
    }
    const double cross = 2.0 * std::real(s.forward * std::conj(s.backward) * icross);
    return eps * (a2 * ia + b2 * ib + cross);
}

std::vector<std::size_t> sample_counts(const std::vector<FieldSegment>& segs, double wavelength_nm,
                                       const FieldOptions& options)
{
    std::vector<std::size_t> counts(segs.size());
    std::size_t total = 0;
    for (std::size_t j = 0; j < segs.size(); ++j) {
        const double spacing = wavelength_nm / (options.samples_per_wavelength * segs[j].index.real());
        counts[j] = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(segs[j].thickness_nm / spacing)));
        total += counts[j];
    }
    if (total < options.min_samples) {
        const double scale = static_cast<double>(options.min_samples) / static_cast<double>(total);
        for (auto& c : counts) {
            c = static_cast<std::size_t>(std::ceil(static_cast<double>(c) * scale));
        }
    }
    return counts;
}

} // namespace

Matrix2 operator*(const Matrix2& a, const Matrix2& b)
{
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22, a.m21 * b.m11 + a.m22 * b.m21,
            a.m21 * b.m12 + a.m22 * b.m22};
}

Matrix2 characteristic_matrix(Complex index, double thickness_nm, double wavelength_nm)
{
    if (index.imag() == 0.0) {
        const double n = index.real();
        const double delta = 2.0 * kPi * n * thickness_nm / wavelength_nm;
        const double c = std::cos(delta);
        const double s = std::sin(delta);
        return {Complex(c, 0.0), Complex(0.0, -s / n), Complex(0.0, -n * s), Complex(c, 0.0)};
    }
    const Complex delta = 2.0 * kPi * index * thickness_nm / wavelength_nm;
    const Complex c = std::cos(delta);
    const Complex s = std::sin(delta);
    return {c, -kI * s / index, -kI * index * s, c};
}

Matrix2 characteristic_matrix(const Layer& layer, double wavelength_nm)
{
    return characteristic_matrix(layer.index, layer.thickness_nm, wavelength_nm);
}

Matrix2 stack_matrix(std::span<const Layer> layers, double wavelength_nm)
{
    Matrix2 m;
    for (const auto& layer : layers) {
        m = m * characteristic_matrix(layer, wavelength_nm);
    }
    return m;
}

StackResponse response_from_matrix(const Matrix2& m, Complex n_in, Complex n_out, double wavelength_nm)
{
    const Complex b = m.m11 + m.m12 * n_out;
    const Complex c = m.m21 + m.m22 * n_out;
    const Complex denom = n_in * b + c;
    StackResponse out;
    out.wavelength_nm = wavelength_nm;
    out.r = (n_in * b - c) / denom;
    out.t = 2.0 * n_in / denom;
    out.reflectance = std::norm(out.r);
    out.transmittance = n_out.real() / n_in.real() * std::norm(out.t);
    return out;
}

StackResponse stack_response(std::span<const Layer> layers, Complex n_in, Complex n_out, double wavelength_nm)
{
    return response_from_matrix(stack_matrix(layers, wavelength_nm), n_in, n_out, wavelength_nm);
}

StackResponse cavity_response(const CavityAssembly& cavity, double wavelength_nm)
{
    const auto layers = cavity.layers();
    return stack_response(layers, cavity.bottom_substrate_index(), cavity.top_substrate_index(), wavelength_nm);
}

ResonanceSearch find_resonances(const CavityAssembly& cavity, WavelengthWindow window, const ResonanceOptions& options)
{
    validate(cavity);
    check_window(cavity, window);
    const SplitCavity split(cavity);
    const GridScanner scanner(split, window, options.grid_step_nm);
    return peaks_from_scan(split, cavity.air_gap_nm(), scanner.wavelengths(), scanner.scan(cavity.air_gap_nm()),
                           options);
}

double resonance_linewidth(const CavityAssembly& cavity, double peak_nm)
{
    const SplitCavity split(cavity);
    return lorentzian_fwhm([&](double l) { return split.transmittance(cavity.air_gap_nm(), l); }, peak_nm, 2.5e-4);
}

double tune_air_gap(const CavityAssembly& cavity, double wavelength_nm, double guess_nm)
{
    const auto bottom = build_dbr(cavity.bottom_mirror);
    std::vector<Layer> below;
    if (cavity.has_diamond()) {
        below.push_back(cavity.diamond);
    }
    below.insert(below.end(), bottom.begin(), bottom.end());
    const auto above = build_dbr(cavity.top_mirror);

    const Complex n_air = cavity.air_gap.index;
    const Complex rb = stack_response(below, n_air, cavity.bottom_substrate_index(), wavelength_nm).r;
    const Complex rt = stack_response(above, n_air, cavity.top_substrate_index(), wavelength_nm).r;
    const double k = 2.0 * kPi * n_air.real() / wavelength_nm;
    const double phase = wrap_phase(std::arg(rb) + std::arg(rt));
    // 2 k L + phase = 2 pi m
    const double period = kPi / k;
    const double base = (2.0 * kPi - phase) / (2.0 * k);
    const double m = std::round((guess_nm - base) / period);
    double length = base + m * period;
    if (length <= 0.0) {
        length += period * std::ceil(-length / period + 1e-12);
    }
    return length;
}

double resonance_slope(const CavityAssembly& cavity, double wavelength_nm, double guess_nm, double step_nm)
{
    const double l0 = tune_air_gap(cavity, wavelength_nm, guess_nm);
    const double lm = tune_air_gap(cavity, wavelength_nm - step_nm, l0);
    const double lp = tune_air_gap(cavity, wavelength_nm + step_nm, l0);
    return 2.0 * step_nm / (lp - lm);
}

double length_scan_linewidth(const CavityAssembly& cavity, double wavelength_nm)
{
    const auto bottom = build_dbr(cavity.bottom_mirror);
    std::vector<Layer> below;
    if (cavity.has_diamond()) {
        below.push_back(cavity.diamond);
    }
    below.insert(below.end(), bottom.begin(), bottom.end());
    const auto above = build_dbr(cavity.top_mirror);

    const Complex n_air = cavity.air_gap.index;
    const double rho = std::abs(stack_response(below, n_air, cavity.bottom_substrate_index(), wavelength_nm).r) *
                       std::abs(stack_response(above, n_air, cavity.top_substrate_index(), wavelength_nm).r);
    // Airy denominator (1 - rho)^2 + 4 rho sin^2(Phi / 2); Phi = 2 k L.
    const double half = std::asin(std::min(1.0, (1.0 - rho) / (2.0 * std::sqrt(rho))));
    const double k = 2.0 * kPi * n_air.real() / wavelength_nm;
    return 4.0 * half / (2.0 * k);
}

std::string to_string(ModeCharacter character)
{
    switch (character) {
    case ModeCharacter::air_like:
        return "air-like";
    case ModeCharacter::diamond_like:
        return "diamond-like";
    case ModeCharacter::mixed:
        return "mixed";
    }
    return "mixed";
}

std::vector<double> LengthGrid::values() const
{
    if (!(step_nm > 0.0) || !(stop_nm >= start_nm) || !(start_nm > 0.0)) {
        throw InputError("length grid must satisfy 0 < start <= stop and step > 0");
    }
    const auto n = static_cast<std::size_t>(std::floor((stop_nm - start_nm) / step_nm + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = start_nm + static_cast<double>(i) * step_nm;
    }
    return out;
}

namespace
{

double diamond_fraction(const CavityAssembly& cavity, double wavelength_nm)
{
    if (!cavity.has_diamond()) {
        return 0.0;
    }
    const auto layers = cavity.layers();
    const auto segs =
        solve_segments(layers, cavity.bottom_substrate_index(), cavity.top_substrate_index(), wavelength_nm);
    double air = 0.0;
    double dia = 0.0;
    for (const auto& s : segs) {
        if (s.name == cavity.diamond.name) {
            dia += segment_energy_raw(s, wavelength_nm);
        } else if (s.name == cavity.air_gap.name) {
            air += segment_energy_raw(s, wavelength_nm);
        }
    }
    return dia / (dia + air);
}

struct OpenBranch
{
    ModeBranch branch;
    bool open = true;
};

} // namespace

DispersionMap dispersion_map(const CavityAssembly& cavity, const LengthGrid& lengths, WavelengthWindow window,
                             const DispersionOptions& options)
{
    validate(cavity);
    check_window(cavity, window);
    const auto grid = lengths.values();
    const SplitCavity split(cavity);
    const GridScanner scanner(split, window, options.resonance.grid_step_nm);

    struct Column
    {
        ResonanceSearch search;
        std::vector<double> fractions;
    };
    std::vector<Column> columns(grid.size());
    parallel_for(grid.size(), options.threads, [&](std::size_t i) {
        const double air = grid[i];
        auto& col = columns[i];
        col.search = peaks_from_scan(split, air, scanner.wavelengths(), scanner.scan(air), options.resonance);
        const CavityAssembly at = cavity.with_air_gap(air);
        for (const auto& r : col.search.resonances) {
            col.fractions.push_back(diamond_fraction(at, r.wavelength_nm));
        }
    });

    DispersionMap out;
    std::vector<OpenBranch> branches;
    const double step = lengths.step_nm;

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& col = columns[i];
        std::vector<bool> taken(col.search.resonances.size(), false);

        for (auto& ob : branches) {
            if (!ob.open) {
                continue;
            }
            const auto& s = ob.branch.samples;
            const double last = s.back().wavelength_nm;
            // Slope lies in (0, 1): the next point is within (last, last + step).
            std::vector<std::size_t> cands;
            for (std::size_t c = 0; c < col.search.resonances.size(); ++c) {
                const double lam = col.search.resonances[c].wavelength_nm;
                if (!taken[c] && lam > last - 1e-9 && lam < last + step * (1.0 + 1e-9)) {
                    cands.push_back(c);
                }
            }
            if (cands.empty()) {
                ob.open = false;
                continue;
            }
            std::size_t pick = cands.front();
            if (cands.size() > 1) {
                if (s.size() < 2) {
                    std::ostringstream msg;
                    msg << "ambiguous branch association at L = " << grid[i]
                        << " nm; refine the length grid (step < " << step / 2.0 << " nm)";
                    throw DomainError(msg.str());
                }
                const double slope = (s.back().wavelength_nm - s[s.size() - 2].wavelength_nm) /
                                     (s.back().air_gap_nm - s[s.size() - 2].air_gap_nm);
                const double pred = last + slope * step;
                std::sort(cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
                    return std::abs(col.search.resonances[a].wavelength_nm - pred) <
                           std::abs(col.search.resonances[b].wavelength_nm - pred);
                });
                const double d1 = std::abs(col.search.resonances[cands[0]].wavelength_nm - pred);
                const double d2 = std::abs(col.search.resonances[cands[1]].wavelength_nm - pred);
                if (d2 < 3.0 * d1) {
                    std::ostringstream msg;
                    msg << "ambiguous branch association at L = " << grid[i]
                        << " nm; refine the length grid (step < " << step / 2.0 << " nm)";
                    throw DomainError(msg.str());
                }
                pick = cands[0];
            }
            taken[pick] = true;
            BranchSample bs;
            bs.air_gap_nm = grid[i];
            bs.wavelength_nm = col.search.resonances[pick].wavelength_nm;
            bs.diamond_energy_fraction = col.fractions[pick];
            ob.branch.samples.push_back(bs);
        }
        for (std::size_t c = 0; c < col.search.resonances.size(); ++c) {
            if (taken[c]) {
                continue;
            }
            OpenBranch ob;
            BranchSample bs;
            bs.air_gap_nm = grid[i];
            bs.wavelength_nm = col.search.resonances[c].wavelength_nm;
            bs.diamond_energy_fraction = col.fractions[c];
            ob.branch.samples.push_back(bs);
            branches.push_back(std::move(ob));
        }
        for (const auto& w : col.search.warnings) {
            if (w.find("abuts") != std::string::npos) {
                std::ostringstream msg;
                msg << "L = " << grid[i] << " nm: " << w;
                out.warnings.push_back(msg.str());
            }
        }
    }

    for (auto& ob : branches) {
        auto& s = ob.branch.samples;
        const std::size_t n = s.size();
        for (std::size_t j = 0; j < n; ++j) {
            if (n == 1) {
                s[j].slope = std::numeric_limits<double>::quiet_NaN();
            } else {
                const std::size_t a = j == 0 ? 0 : j - 1;
                const std::size_t b = j + 1 == n ? n - 1 : j + 1;
                s[j].slope = (s[b].wavelength_nm - s[a].wavelength_nm) / (s[b].air_gap_nm - s[a].air_gap_nm);
            }
            const double f = s[j].diamond_energy_fraction;
            s[j].character = f < options.air_like_below      ? ModeCharacter::air_like
                             : f > options.diamond_like_above ? ModeCharacter::diamond_like
                                                              : ModeCharacter::mixed;
        }
        out.branches.push_back(std::move(ob.branch));
    }

    // Higher transverse orders: shifted by the Gouy phase at fixed L.
    const std::size_t fundamentals = out.branches.size();
    for (int order = 1; order <= options.max_transverse_order; ++order) {
        for (std::size_t b = 0; b < fundamentals; ++b) {
            ModeBranch shifted;
            shifted.transverse_order = order;
            for (const auto& s : out.branches[b].samples) {
                const double lg_um = (s.air_gap_nm + cavity.diamond.thickness_nm) * 1e-3;
                if (!std::isfinite(s.slope) || lg_um >= cavity.curvature_radius_um) {
                    continue;
                }
                const double gouy = std::acos(std::sqrt(1.0 - lg_um / cavity.curvature_radius_um));
                const double dl = order * s.wavelength_nm / (2.0 * kPi) * gouy;
                BranchSample t = s;
                t.wavelength_nm = s.wavelength_nm - s.slope * dl;
                if (t.wavelength_nm >= window.lower_nm && t.wavelength_nm <= window.upper_nm) {
                    shifted.samples.push_back(t);
                }
            }
            if (!shifted.samples.empty()) {
                out.branches.push_back(std::move(shifted));
            }
        }
    }

    for (std::size_t b = 0; b < out.branches.size(); ++b) {
        out.branches[b].id = static_cast<int>(b);
    }
    return out;
}

Complex FieldProfile::field_at(double z_nm) const
{
    const int j = segment_at(z_nm);
    const auto& s = segments[static_cast<std::size_t>(j)];
    const double x = std::clamp(z_nm - s.z_start_nm, 0.0, s.thickness_nm);
    return segment_field(s, x, resonant_wavelength_nm) / peak_amplitude;
}

int FieldProfile::segment_at(double z_nm) const
{
    auto it = std::upper_bound(segments.begin(), segments.end(), z_nm,
                               [](double z, const FieldSegment& s) { return z < s.z_start_nm; });
    if (it == segments.begin()) {
        return 0;
    }
    return static_cast<int>(std::distance(segments.begin(), it) - 1);
}

double FieldProfile::eps_at(double z_nm) const
{
    const auto& s = segments[static_cast<std::size_t>(segment_at(z_nm))];
    return (s.index * s.index).real();
}

double FieldProfile::total_length_nm() const
{
    return segments.empty() ? 0.0 : segments.back().z_start_nm + segments.back().thickness_nm;
}

double FieldProfile::segment_energy(std::size_t index) const
{
    return segment_energy_raw(segments.at(index), resonant_wavelength_nm) / (peak_amplitude * peak_amplitude);
}

double FieldProfile::energy_integral() const
{
    double sum = 0.0;
    for (std::size_t j = 0; j < segments.size(); ++j) {
        sum += segment_energy(j);
    }
    return sum;
}

FieldProfile::Extremum FieldProfile::max_in(const std::string& segment_name) const
{
    Extremum best;
    bool found = false;
    for (const auto& s : segments) {
        if (s.name != segment_name) {
            continue;
        }
        found = true;
        const auto e = segment_max(s, resonant_wavelength_nm);
        if (e.amplitude > best.amplitude) {
            best = e;
        }
    }
    if (!found) {
        throw InputError("field profile has no segment named '" + segment_name + "'");
    }
    best.amplitude /= peak_amplitude;
    return best;
}

FieldProfile::Extremum FieldProfile::global_max() const
{
    Extremum best;
    for (const auto& s : segments) {
        const auto e = segment_max(s, resonant_wavelength_nm);
        if (e.amplitude > best.amplitude) {
            best = e;
        }
    }
    best.amplitude /= peak_amplitude;
    return best;
}

FieldProfile field_profile(const CavityAssembly& cavity, double resonant_wavelength_nm, const FieldOptions& options)
{
    validate(cavity);
    const double lam = resonant_wavelength_nm;

    // The wavelength must sit on a transmission peak.
    {
        const SplitCavity split(cavity);
        auto t = [&](double l) { return split.transmittance(cavity.air_gap_nm(), l); };
        const double span = 0.05;
        const double peak = golden_maximize(t, lam - span, lam + span, 1e-7);
        const double width = lorentzian_fwhm(t, peak, 2.5e-4);
        if (!(std::abs(peak - lam) <= width) || std::abs(peak - lam) >= span * 0.999) {
            std::ostringstream msg;
            msg << "wavelength " << lam << " nm is not on a resonance (nearest peak " << peak << " nm, width "
                << width << " nm)";
            throw InputError(msg.str());
        }
    }

    FieldProfile p;
    p.resonant_wavelength_nm = lam;
    const auto layers = cavity.layers();
    p.segments = solve_segments(layers, cavity.bottom_substrate_index(), cavity.top_substrate_index(), lam);
    p.peak_amplitude = 1.0;
    p.peak_amplitude = p.global_max().amplitude;

    const auto counts = sample_counts(p.segments, lam, options);
    for (std::size_t j = 0; j < p.segments.size(); ++j) {
        const auto& s = p.segments[j];
        const double eps = (s.index * s.index).real();
        for (std::size_t i = 0; i <= counts[j]; ++i) {
            const double x = s.thickness_nm * static_cast<double>(i) / static_cast<double>(counts[j]);
            FieldSample fs;
            fs.z_nm = s.z_start_nm + x;
            fs.amplitude = std::abs(segment_field(s, x, lam)) / p.peak_amplitude;
            fs.eps_r = eps;
            fs.segment = static_cast<int>(j);
            p.samples.push_back(fs);
        }
        if (lossless(s)) {
            const double k = 2.0 * kPi * s.index.real() / lam;
            const double phi = modulation_phase(s);
            // Maxima at 2 k x + phi = 2 pi m, minima at (2 m + 1) pi.
            for (double m = std::floor(phi / kPi) - 1.0;; m += 1.0) {
                const double x = (kPi * m - phi) / (2.0 * k);
                if (x >= s.thickness_nm) {
                    break;
                }
                if (x > 0.0) {
                    const bool is_max = static_cast<long long>(std::llround(m)) % 2 == 0;
                    (is_max ? p.antinode_positions_nm : p.node_positions_nm).push_back(s.z_start_nm + x);
                }
            }
        }
    }
    return p;
}

std::string to_string(InterfaceKind kind)
{
    switch (kind) {
    case InterfaceKind::node:
        return "node";
    case InterfaceKind::antinode:
        return "antinode";
    case InterfaceKind::intermediate:
        return "intermediate";
    }
    return "intermediate";
}

InterfaceField classify_interface(const FieldProfile& profile, double z_nm, double tolerance_nm)
{
    InterfaceField out;
    out.relative_amplitude = profile.amplitude_at(z_nm);
    out.distance_to_node_nm = std::numeric_limits<double>::infinity();
    out.distance_to_antinode_nm = std::numeric_limits<double>::infinity();

    const double lam = profile.resonant_wavelength_nm;
    for (const auto& s : profile.segments) {
        const double z0 = s.z_start_nm;
        const double z1 = s.z_start_nm + s.thickness_nm;
        const bool touches = std::abs(z0 - z_nm) < 1e-6 || std::abs(z1 - z_nm) < 1e-6;
        if (!touches || !lossless(s)) {
            continue;
        }
        const double k = 2.0 * kPi * s.index.real() / lam;
        const double phi = modulation_phase(s);
        const double x = z_nm - z0;
        // Distance from x to the nearest solution of 2 k x + phi = pi m,
        // for even (antinode) and odd (node) m.
        const double u = (2.0 * k * x + phi) / kPi;
        const double m_near = std::round(u);
        for (double m : {m_near - 1.0, m_near, m_near + 1.0}) {
            const double dist = std::abs((kPi * m - phi) / (2.0 * k) - x);
            const bool even = static_cast<long long>(std::llround(m)) % 2 == 0;
            double& slot = even ? out.distance_to_antinode_nm : out.distance_to_node_nm;
            slot = std::min(slot, dist);
        }
    }
    if (out.distance_to_node_nm <= tolerance_nm && out.distance_to_node_nm < out.distance_to_antinode_nm) {
        out.kind = InterfaceKind::node;
    } else if (out.distance_to_antinode_nm <= tolerance_nm) {
        out.kind = InterfaceKind::antinode;
    }
    return out;
}

} // namespace cavityforge
