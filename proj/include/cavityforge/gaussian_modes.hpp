#ifndef CAVITYFORGE_GAUSSIAN_MODES_HPP
#define CAVITYFORGE_GAUSSIAN_MODES_HPP

#include <string>
#include <vector>

#include "cavityforge/constants.hpp"
#include "cavityforge/stack.hpp"
#include "cavityforge/tmm.hpp"

namespace cavityforge
{

enum class WaistSource
{
    formula,
    override_fwhm,
};

std::string to_string(WaistSource source);

struct TransverseMode
{
    double waist_um = 0.0;  // 1/e^2 intensity radius w0
    double fwhm_um = 0.0;   // intensity FWHM = w0 sqrt(2 ln 2)
    int order = 0;          // m + n
    double gouy_offset_nm = 0.0;  // resonance shift expressed as an air-gap length
    WaistSource source = WaistSource::formula;
};

double fwhm_from_waist(double waist_um);
double waist_from_fwhm(double fwhm_um);

// Plano-concave waist, w0^2 = (lambda / pi) sqrt(Lg (R - Lg)).
// DomainError unless 0 < Lg < R.
TransverseMode beam_waist(double curvature_radius_um, double geometric_length_um, double wavelength_nm);

// Uses the assembly's waist override when present, else the formula with
// Lg = L + t_d.
TransverseMode beam_waist(const CavityAssembly& cavity, double wavelength_nm);

// Gouy phase arccos(sqrt(1 - Lg / R)) of the fundamental mode.
double gouy_phase(double curvature_radius_um, double geometric_length_um);

// Length offset (nm) for m + n = 0 .. max_order:
// (m + n) (lambda / 2 pi) arccos(sqrt(1 - Lg / R)).
std::vector<double> transverse_offsets(double curvature_radius_um, double geometric_length_um, double wavelength_nm,
                                       int max_order);

// Wavelength shift at fixed L of a branch with local slope d lambda / d L.
double wavelength_offset(double length_offset_nm, double slope);

// A_eff = pi w0^2 / 2 in um^2.
double effective_area(const TransverseMode& mode);
double effective_area_um2(double waist_um);

struct ModeVolumeReport
{
    double wavelength_nm = 0.0;
    double effective_area_um2 = 0.0;
    // Integral of eps_r |f|^2 dz in nm, f scaled to a global maximum of 1.
    double longitudinal_integral_nm = 0.0;
    // Mode volume normalized at the maximum inside the named region.
    double volume_um3 = 0.0;
    double volume_global_um3 = 0.0;
    double evac_region_V_per_m = 0.0;
    double evac_global_V_per_m = 0.0;
    double z_region_max_nm = 0.0;
    double z_global_max_nm = 0.0;
    std::string region;
    // E_vac(z) = field_scale * |f(z)|.
    double field_scale_V_per_m = 0.0;

    double evac_at(const FieldProfile& profile, double z_nm) const
    {
        return field_scale_V_per_m * profile.amplitude_at(z_nm);
    }
};

// Vacuum field of the profile spread over A_eff. The integral covers the
// finite layers only. InputError when the profile has no `region` segment.
ModeVolumeReport vacuum_field(const FieldProfile& profile, double effective_area_um2,
                              const std::string& region = "diamond",
                              const PhysicalConstants& constants = kCodata2018);

} // namespace cavityforge

#endif // CAVITYFORGE_GAUSSIAN_MODES_HPP
