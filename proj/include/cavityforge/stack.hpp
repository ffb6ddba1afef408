#ifndef CAVITYFORGE_STACK_HPP
#define CAVITYFORGE_STACK_HPP

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace cavityforge
{

using Complex = std::complex<double>;

// A homogeneous dielectric slab. Im(index) >= 0 is absorption.
struct Layer
{
    std::string name;
    Complex index{1.0, 0.0};
    double thickness_nm = 0.0;
};

// thickness > 0, Re(n) >= 1, Im(n) >= 0.
void validate(const Layer& layer);

// Quarter-wave Bragg mirror. Layer order runs from the cavity side outward.
struct MirrorSpec
{
    int pairs = 15;
    double center_wavelength_nm = 637.0;
    double n_high = 2.06;
    double n_low = 1.46;
    // true: the layer touching the cavity is the high-index one.
    bool terminal_high_index = true;
    double substrate_index = 1.46;
    // Fractional power lost per reflection at the center wavelength, realized
    // as a uniform extinction coefficient on all mirror layers.
    double lumped_loss = 0.0;
    // Explicit extinction coefficients; added on top of the lumped-loss term.
    double extinction_high = 0.0;
    double extinction_low = 0.0;
};

void validate(const MirrorSpec& spec);

// Edges of the first-order stopband in nm (normal incidence, lossless).
struct Stopband
{
    double lower_nm = 0.0;
    double upper_nm = 0.0;
};
Stopband stopband(const MirrorSpec& spec);

std::vector<Layer> build_dbr(const MirrorSpec& spec);

// Extinction coefficient that makes the mirror absorb `lumped_loss` of the
// power incident from vacuum at its center wavelength.
double extinction_for_lumped_loss(const MirrorSpec& spec);

// Plano (bottom) / concave (top) microcavity holding a diamond membrane.
//
// z runs from the bottom substrate upward:
//   substrate | bottom DBR | diamond | air gap | top DBR | substrate
struct CavityAssembly
{
    MirrorSpec bottom_mirror;
    Layer diamond{"diamond", {2.41, 0.0}, 770.0};  // thickness 0 = bare cavity
    Layer air_gap{"air", {1.0, 0.0}, 1960.0};
    MirrorSpec top_mirror;
    double curvature_radius_um = 16.0;
    std::optional<double> waist_fwhm_override_um;

    bool has_diamond() const { return diamond.thickness_nm > 0.0; }
    double air_gap_nm() const { return air_gap.thickness_nm; }
    // Physical plane-to-curved-mirror separation, L + t_d.
    double geometric_length_um() const { return (air_gap.thickness_nm + diamond.thickness_nm) * 1e-3; }

    // All finite layers from bottom to top (substrates excluded).
    std::vector<Layer> layers() const;
    double bottom_substrate_index() const { return bottom_mirror.substrate_index; }
    double top_substrate_index() const { return top_mirror.substrate_index; }

    // Interface positions (nm from the bottom substrate).
    double diamond_start_nm() const;
    double diamond_air_interface_nm() const;
    double air_end_nm() const;

    CavityAssembly with_air_gap(double length_nm) const;
};

// Throws InputError for invalid parts, DomainError when L + t_d >= R.
CavityAssembly assemble_cavity(const MirrorSpec& bottom, double diamond_thickness_nm, double air_gap_nm,
                               const MirrorSpec& top, double curvature_radius_um, double diamond_index = 2.41);

void validate(const CavityAssembly& cavity);

// Nitrogen-vacancy emitter parameters.
struct EmitterSpec
{
    double zpl_wavelength_nm = 637.0;
    double bulk_lifetime_ns = 12.6;
    double host_index = 2.41;
    // ZPL branching fraction gamma_0 / gamma_R^0.
    double debye_waller = 0.0255;
    double depth_nm = 68.0;
    // Projection of the dipole on the cavity polarization, in (0, 1].
    double dipole_orientation = 1.0;
};

namespace debye_waller_presets
{
inline constexpr double kSelfConsistent = 0.0255;
inline constexpr double kLow = 0.024;
inline constexpr double kHigh = 0.05;
inline constexpr double kDesign = 0.020;
} // namespace debye_waller_presets

void validate(const EmitterSpec& emitter);
// Additionally checks that the emitter depth lies inside the membrane.
void validate(const EmitterSpec& emitter, const CavityAssembly& cavity);

struct EmitterRates
{
    double total_per_s = 0.0;  // gamma_R^0
    double zpl_per_s = 0.0;    // gamma_0
    double sideband_per_s = 0.0;  // gamma_1
};

EmitterRates emitter_rates(const EmitterSpec& emitter);

// Reference cavity: 0.77 um membrane, 1.96 um air gap, R = 16 um, 15/14 high-index
// terminated pairs on silica and the measured 0.83 um FWHM waist.
CavityAssembly reference_cavity();

} // namespace cavityforge

#endif // CAVITYFORGE_STACK_HPP
