#include "cavityforge/stack.hpp"

#include <cmath>
#include <sstream>

#include "cavityforge/constants.hpp"
#include "cavityforge/errors.hpp"
#include "cavityforge/tmm.hpp"

namespace cavityforge
{

namespace
{

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::vector<Layer> quarter_wave_layers(const MirrorSpec& spec, double extinction)
{
    const double lc = spec.center_wavelength_nm;
    const Layer high{"dbr_high", {spec.n_high, spec.extinction_high + extinction}, lc / (4.0 * spec.n_high)};
    const Layer low{"dbr_low", {spec.n_low, spec.extinction_low + extinction}, lc / (4.0 * spec.n_low)};

    std::vector<Layer> out;
    out.reserve(2 * static_cast<std::size_t>(spec.pairs));
    for (int i = 0; i < spec.pairs; ++i) {
        out.push_back(spec.terminal_high_index ? high : low);
        out.push_back(spec.terminal_high_index ? low : high);
    }
    return out;
}

double mirror_absorptance(const MirrorSpec& spec, double extinction)
{
    const auto layers = quarter_wave_layers(spec, extinction);
    const auto resp = stack_response(layers, 1.0, spec.substrate_index, spec.center_wavelength_nm);
    return 1.0 - resp.reflectance - resp.transmittance;
}

} // namespace

void validate(const Layer& layer)
{
    if (!(layer.thickness_nm > 0.0) || !std::isfinite(layer.thickness_nm)) {
        throw InputError("layer '" + layer.name + "': thickness must be > 0");
    }
    if (!(layer.index.real() >= 1.0) || !(layer.index.imag() >= 0.0)) {
        throw InputError("layer '" + layer.name + "': index must have Re(n) >= 1 and Im(n) >= 0");
    }
}

void validate(const MirrorSpec& spec)
{
    if (spec.pairs < 1) {
        throw InputError("mirror: pairs must be >= 1");
    }
    if (!finite_positive(spec.center_wavelength_nm)) {
        throw InputError("mirror: center wavelength must be > 0");
    }
    if (!(spec.n_high >= 1.0) || !(spec.n_low >= 1.0) || spec.n_high == spec.n_low) {
        throw InputError("mirror: indices must be >= 1 and distinct");
    }
    if (!(spec.substrate_index >= 1.0)) {
        throw InputError("mirror: substrate index must be >= 1");
    }
    if (!(spec.lumped_loss >= 0.0 && spec.lumped_loss < 1.0)) {
        throw InputError("mirror: lumped loss must lie in [0, 1)");
    }
    if (!(spec.extinction_high >= 0.0) || !(spec.extinction_low >= 0.0)) {
        throw InputError("mirror: extinction coefficients must be >= 0");
    }
}

Stopband stopband(const MirrorSpec& spec)
{
    const double nh = std::max(spec.n_high, spec.n_low);
    const double nl = std::min(spec.n_high, spec.n_low);
    const double half_width = (2.0 / kPi) * std::asin((nh - nl) / (nh + nl));  // in units of omega_c
    return {spec.center_wavelength_nm / (1.0 + half_width), spec.center_wavelength_nm / (1.0 - half_width)};
}

double extinction_for_lumped_loss(const MirrorSpec& spec)
{
    if (spec.lumped_loss <= 0.0) {
        return 0.0;
    }
    MirrorSpec bare = spec;
    bare.extinction_high = 0.0;
    bare.extinction_low = 0.0;

    // Absorptance is monotone in the extinction over the range of interest.
    double lo = 0.0;
    double hi = 1e-6;
    while (mirror_absorptance(bare, hi) < spec.lumped_loss) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1.0) {
            throw DomainError("mirror: lumped loss not reachable with a uniform extinction");
        }
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mirror_absorptance(bare, mid) < spec.lumped_loss ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<Layer> build_dbr(const MirrorSpec& spec)
{
    validate(spec);
    return quarter_wave_layers(spec, extinction_for_lumped_loss(spec));
}

std::vector<Layer> CavityAssembly::layers() const
{
    std::vector<Layer> out;
    auto bottom = build_dbr(bottom_mirror);
    out.insert(out.end(), bottom.rbegin(), bottom.rend());
    if (has_diamond()) {
        out.push_back(diamond);
    }
    out.push_back(air_gap);
    auto top = build_dbr(top_mirror);
    out.insert(out.end(), top.begin(), top.end());
    return out;
}

double CavityAssembly::diamond_start_nm() const
{
    // Same summation order as layers(), so positions match the field segments.
    const auto bottom = build_dbr(bottom_mirror);
    double z = 0.0;
    for (auto it = bottom.rbegin(); it != bottom.rend(); ++it) {
        z += it->thickness_nm;
    }
    return z;
}

double CavityAssembly::diamond_air_interface_nm() const
{
    return diamond_start_nm() + (has_diamond() ? diamond.thickness_nm : 0.0);
}

double CavityAssembly::air_end_nm() const { return diamond_air_interface_nm() + air_gap.thickness_nm; }

CavityAssembly CavityAssembly::with_air_gap(double length_nm) const
{
    CavityAssembly copy = *this;
    copy.air_gap.thickness_nm = length_nm;
    return copy;
}

void validate(const CavityAssembly& cavity)
{
    validate(cavity.bottom_mirror);
    validate(cavity.top_mirror);
    if (cavity.diamond.thickness_nm < 0.0) {
        throw InputError("diamond thickness must be >= 0");
    }
    if (cavity.has_diamond()) {
        validate(cavity.diamond);
    }
    validate(cavity.air_gap);
    if (!finite_positive(cavity.curvature_radius_um)) {
        throw InputError("curvature radius must be > 0");
    }
    if (cavity.waist_fwhm_override_um && !finite_positive(*cavity.waist_fwhm_override_um)) {
        throw InputError("waist override must be > 0");
    }
    if (cavity.geometric_length_um() >= cavity.curvature_radius_um) {
        std::ostringstream msg;
        msg << "unstable resonator: L + t_d = " << cavity.geometric_length_um()
            << " um is not below R = " << cavity.curvature_radius_um << " um";
        throw DomainError(msg.str());
    }
}

CavityAssembly assemble_cavity(const MirrorSpec& bottom, double diamond_thickness_nm, double air_gap_nm,
                               const MirrorSpec& top, double curvature_radius_um, double diamond_index)
{
    CavityAssembly cavity;
    cavity.bottom_mirror = bottom;
    cavity.top_mirror = top;
    cavity.diamond = Layer{"diamond", {diamond_index, 0.0}, diamond_thickness_nm};
    cavity.air_gap = Layer{"air", {1.0, 0.0}, air_gap_nm};
    cavity.curvature_radius_um = curvature_radius_um;
    validate(cavity);
    return cavity;
}

void validate(const EmitterSpec& e)
{
    if (!finite_positive(e.zpl_wavelength_nm)) {
        throw InputError("emitter: ZPL wavelength must be > 0");
    }
    if (!finite_positive(e.bulk_lifetime_ns)) {
        throw InputError("emitter: bulk lifetime must be > 0");
    }
    if (!(e.host_index >= 1.0)) {
        throw InputError("emitter: host index must be >= 1");
    }
    if (!(e.debye_waller > 0.0 && e.debye_waller < 1.0)) {
        throw InputError("emitter: Debye-Waller fraction must lie in (0, 1)");
    }
    if (!(e.depth_nm >= 0.0)) {
        throw InputError("emitter: depth must be >= 0");
    }
    if (!(e.dipole_orientation > 0.0 && e.dipole_orientation <= 1.0)) {
        throw InputError("emitter: dipole orientation factor must lie in (0, 1]");
    }
}

void validate(const EmitterSpec& e, const CavityAssembly& cavity)
{
    validate(e);
    if (cavity.has_diamond() && e.depth_nm > cavity.diamond.thickness_nm) {
        throw InputError("emitter depth exceeds the membrane thickness");
    }
}

EmitterRates emitter_rates(const EmitterSpec& e)
{
    validate(e);
    EmitterRates rates;
    rates.total_per_s = 1.0 / (e.bulk_lifetime_ns * 1e-9);
    rates.zpl_per_s = e.debye_waller * rates.total_per_s;
    rates.sideband_per_s = rates.total_per_s - rates.zpl_per_s;
    return rates;
}

CavityAssembly reference_cavity()
{
    MirrorSpec bottom;
    bottom.pairs = 15;
    MirrorSpec top;
    top.pairs = 14;
    CavityAssembly cavity = assemble_cavity(bottom, 770.0, 1960.0, top, 16.0);
    cavity.waist_fwhm_override_um = 0.83;
    return cavity;
}

} // namespace cavityforge
