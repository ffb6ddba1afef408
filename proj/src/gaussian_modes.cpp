#include "cavityforge/gaussian_modes.hpp"

#include <cmath>
#include <sstream>

#include "cavityforge/errors.hpp"

namespace cavityforge
{

namespace
{

const double kFwhmPerWaist = std::sqrt(2.0 * std::log(2.0));

void check_geometry(double r_um, double lg_um)
{
    if (!(r_um > 0.0) || !std::isfinite(r_um)) {
        throw InputError("curvature radius must be > 0");
    }
    if (!(lg_um > 0.0) || !(lg_um < r_um)) {
        std::ostringstream msg;
        msg << "unstable resonator: Lg = " << lg_um << " um outside (0, R = " << r_um << " um)";
        throw DomainError(msg.str());
    }
}

} // namespace

std::string to_string(WaistSource source)
{
    return source == WaistSource::formula ? "formula" : "override";
}

double fwhm_from_waist(double waist_um) { return waist_um * kFwhmPerWaist; }

double waist_from_fwhm(double fwhm_um) { return fwhm_um / kFwhmPerWaist; }

TransverseMode beam_waist(double curvature_radius_um, double geometric_length_um, double wavelength_nm)
{
    check_geometry(curvature_radius_um, geometric_length_um);
    if (!(wavelength_nm > 0.0)) {
        throw InputError("wavelength must be > 0");
    }
    const double lam_um = wavelength_nm * 1e-3;
    const double w2 =
        lam_um / kPi * std::sqrt(geometric_length_um * (curvature_radius_um - geometric_length_um));
    TransverseMode mode;
    mode.waist_um = std::sqrt(w2);
    mode.fwhm_um = fwhm_from_waist(mode.waist_um);
    return mode;
}

TransverseMode beam_waist(const CavityAssembly& cavity, double wavelength_nm)
{
    if (cavity.waist_fwhm_override_um) {
        TransverseMode mode;
        mode.fwhm_um = *cavity.waist_fwhm_override_um;
        mode.waist_um = waist_from_fwhm(mode.fwhm_um);
        mode.source = WaistSource::override_fwhm;
        return mode;
    }
    return beam_waist(cavity.curvature_radius_um, cavity.geometric_length_um(), wavelength_nm);
}

double gouy_phase(double curvature_radius_um, double geometric_length_um)
{
    check_geometry(curvature_radius_um, geometric_length_um);
    return std::acos(std::sqrt(1.0 - geometric_length_um / curvature_radius_um));
}

std::vector<double> transverse_offsets(double curvature_radius_um, double geometric_length_um, double wavelength_nm,
                                       int max_order)
{
    if (max_order < 0) {
        throw InputError("max transverse order must be >= 0");
    }
    const double step = wavelength_nm / (2.0 * kPi) * gouy_phase(curvature_radius_um, geometric_length_um);
    std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
    for (int k = 0; k <= max_order; ++k) {
        out[static_cast<std::size_t>(k)] = k * step;
    }
    return out;
}

double wavelength_offset(double length_offset_nm, double slope) { return -slope * length_offset_nm; }

double effective_area_um2(double waist_um)
{
    if (!(waist_um > 0.0)) {
        throw InputError("waist must be > 0");
    }
    return kPi * waist_um * waist_um / 2.0;
}

double effective_area(const TransverseMode& mode) { return effective_area_um2(mode.waist_um); }

ModeVolumeReport vacuum_field(const FieldProfile& profile, double area_um2, const std::string& region,
                              const PhysicalConstants& constants)
{
    if (!(area_um2 > 0.0)) {
        throw InputError("effective area must be > 0");
    }
    ModeVolumeReport rep;
    rep.wavelength_nm = profile.resonant_wavelength_nm;
    rep.effective_area_um2 = area_um2;
    rep.region = region;
    rep.longitudinal_integral_nm = profile.energy_integral();

    const auto local = profile.max_in(region);
    const auto global = profile.global_max();
    rep.z_region_max_nm = local.z_nm;
    rep.z_global_max_nm = global.z_nm;

    const double eps_local = profile.eps_at(local.z_nm);
    const double eps_global = profile.eps_at(global.z_nm);
    const double integral_um = rep.longitudinal_integral_nm * 1e-3;
    rep.volume_um3 = area_um2 * integral_um / (eps_local * local.amplitude * local.amplitude);
    rep.volume_global_um3 = area_um2 * integral_um / (eps_global * global.amplitude * global.amplitude);

    const double omega = constants.angular_frequency(rep.wavelength_nm);
    const double energy = constants.hbar * omega / 2.0;
    const double area_m2 = area_um2 * 1e-12;
    const double integral_m = rep.longitudinal_integral_nm * 1e-9;
    rep.field_scale_V_per_m = std::sqrt(energy / (constants.eps0 * area_m2 * integral_m));
    rep.evac_region_V_per_m = rep.field_scale_V_per_m * local.amplitude;
    rep.evac_global_V_per_m = rep.field_scale_V_per_m * global.amplitude;
    return rep;
}

} // namespace cavityforge
