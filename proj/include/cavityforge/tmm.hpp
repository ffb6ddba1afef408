#ifndef CAVITYFORGE_TMM_HPP
#define CAVITYFORGE_TMM_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "cavityforge/stack.hpp"

namespace cavityforge
{

// 2x2 complex matrix acting on (E, H) with H in units of the vacuum admittance.
struct Matrix2
{
    Complex m11{1.0, 0.0}, m12{0.0, 0.0}, m21{0.0, 0.0}, m22{1.0, 0.0};

    static Matrix2 identity() { return {}; }
    Complex determinant() const { return m11 * m22 - m12 * m21; }
};

Matrix2 operator*(const Matrix2& a, const Matrix2& b);

// Normal-incidence characteristic matrix of a slab; relates the fields at
// its front face to those at its back face. Phase delta = 2 pi n d / lambda,
// time dependence exp(-i omega t).
Matrix2 characteristic_matrix(const Layer& layer, double wavelength_nm);
Matrix2 characteristic_matrix(Complex index, double thickness_nm, double wavelength_nm);

// Product of the characteristic matrices, first layer = incident side.
Matrix2 stack_matrix(std::span<const Layer> layers, double wavelength_nm);

struct StackResponse
{
    double wavelength_nm = 0.0;
    Complex r, t;
    double reflectance = 0.0;
    double transmittance = 0.0;
};

StackResponse response_from_matrix(const Matrix2& m, Complex n_in, Complex n_out, double wavelength_nm);
StackResponse stack_response(std::span<const Layer> layers, Complex n_in, Complex n_out, double wavelength_nm);

// Full cavity illuminated from the bottom substrate.
StackResponse cavity_response(const CavityAssembly& cavity, double wavelength_nm);

struct WavelengthWindow
{
    double lower_nm = 0.0;
    double upper_nm = 0.0;
};

struct Resonance
{
    double wavelength_nm = 0.0;
    double linewidth_nm = 0.0;  // FWHM of the transmission peak
    double q_factor = 0.0;
    double peak_transmission = 0.0;
};

struct ResonanceSearch
{
    std::vector<Resonance> resonances;
    std::vector<std::string> warnings;
};

struct ResonanceOptions
{
    double grid_step_nm = 1e-3;
    double tolerance_nm = 1e-6;
    // Minimum peak-to-background transmission ratio within +-0.5 nm.
    double min_contrast = 10.0;
};

// Transmission peaks inside the window. The window must lie inside both
// mirror stopbands (InputError otherwise).
ResonanceSearch find_resonances(const CavityAssembly& cavity, WavelengthWindow window,
                                const ResonanceOptions& options = {});

// FWHM (nm) of the transmission peak at `peak_nm`, from a Lorentzian fit of
// 1/T around the peak.
double resonance_linewidth(const CavityAssembly& cavity, double peak_nm);

// Air-gap length closest to `guess_nm` at which the transmission at the
// fixed wavelength is maximal (round-trip phase condition).
double tune_air_gap(const CavityAssembly& cavity, double wavelength_nm, double guess_nm);

// d lambda / d L of the resonance at `wavelength_nm` whose air gap lies
// nearest `guess_nm`, from the phase condition at lambda +- step.
double resonance_slope(const CavityAssembly& cavity, double wavelength_nm, double guess_nm, double step_nm = 1e-3);

// Linewidth of the length scan T(L) at fixed wavelength, in nm of L.
double length_scan_linewidth(const CavityAssembly& cavity, double wavelength_nm);

enum class ModeCharacter
{
    air_like,
    diamond_like,
    mixed,
};

std::string to_string(ModeCharacter character);

struct BranchSample
{
    double air_gap_nm = 0.0;
    double wavelength_nm = 0.0;
    double slope = 0.0;  // d lambda / d L
    double diamond_energy_fraction = 0.0;
    ModeCharacter character = ModeCharacter::mixed;
};

struct ModeBranch
{
    int id = 0;
    int transverse_order = 0;  // m + n
    std::vector<BranchSample> samples;
};

struct LengthGrid
{
    double start_nm = 0.0;
    double stop_nm = 0.0;
    double step_nm = 0.0;

    std::vector<double> values() const;
};

struct DispersionOptions
{
    ResonanceOptions resonance;
    int max_transverse_order = 0;
    unsigned threads = 0;  // 0 = default worker count
    // Diamond share of the cavity field energy separating the characters.
    double air_like_below = 0.35;
    double diamond_like_above = 0.65;
};

struct DispersionMap
{
    std::vector<ModeBranch> branches;
    std::vector<std::string> warnings;
};

// Tracks transmission resonances across the air-gap grid. Throws
// DomainError when branch association is ambiguous (refine the grid).
DispersionMap dispersion_map(const CavityAssembly& cavity, const LengthGrid& lengths, WavelengthWindow window,
                             const DispersionOptions& options = {});

// Standing-wave field of the cavity at a resonance.
struct FieldSegment
{
    std::string name;
    Complex index;
    double z_start_nm = 0.0;
    double thickness_nm = 0.0;
    // E(x) = forward * exp(i k x) + backward * exp(-i k x), x from z_start.
    Complex forward, backward;
};

struct FieldSample
{
    double z_nm = 0.0;
    double amplitude = 0.0;  // |E| / max |E|
    double eps_r = 1.0;
    int segment = 0;
};

struct FieldProfile
{
    double resonant_wavelength_nm = 0.0;
    std::vector<FieldSegment> segments;
    std::vector<FieldSample> samples;
    std::vector<double> node_positions_nm;
    std::vector<double> antinode_positions_nm;
    double peak_amplitude = 1.0;  // max |E| in the raw (unscaled) units of the segments

    // Complex field, scaled so the global maximum of |E| is 1.
    Complex field_at(double z_nm) const;
    double amplitude_at(double z_nm) const { return std::abs(field_at(z_nm)); }
    double eps_at(double z_nm) const;
    int segment_at(double z_nm) const;
    double total_length_nm() const;

    // Integral of eps_r |E|^2 dz (nm) over one segment / the whole stack, in the
    // scaled units of field_at.
    double segment_energy(std::size_t index) const;
    double energy_integral() const;

    struct Extremum
    {
        double z_nm = 0.0;
        double amplitude = 0.0;
    };
    // Largest |E| inside the segments with the given name.
    Extremum max_in(const std::string& segment_name) const;
    Extremum global_max() const;
};

struct FieldOptions
{
    std::size_t min_samples = 2000;
    double samples_per_wavelength = 20.0;  // per lambda / n in each layer
};

// Throws InputError when the wavelength is more than one linewidth away
// from a transmission peak.
FieldProfile field_profile(const CavityAssembly& cavity, double resonant_wavelength_nm,
                           const FieldOptions& options = {});

enum class InterfaceKind
{
    node,
    antinode,
    intermediate,
};

std::string to_string(InterfaceKind kind);

struct InterfaceField
{
    InterfaceKind kind = InterfaceKind::intermediate;
    double relative_amplitude = 0.0;  // |E(z)| / global max |E|
    double distance_to_node_nm = 0.0;
    double distance_to_antinode_nm = 0.0;
};

// Node/antinode test at an interface: the nearest standing-wave node
// (antinode) of the adjoining layers must lie within `tolerance_nm`.
InterfaceField classify_interface(const FieldProfile& profile, double z_nm, double tolerance_nm);

} // namespace cavityforge

#endif // CAVITYFORGE_TMM_HPP
