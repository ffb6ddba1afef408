#ifndef CAVITYFORGE_CQED_HPP
#define CAVITYFORGE_CQED_HPP

#include <optional>
#include <string>
#include <vector>

#include "cavityforge/constants.hpp"
#include "cavityforge/stack.hpp"

namespace cavityforge
{

// Transition dipole (C m) from the bulk radiative rate, assuming unity
// quantum efficiency: gamma = n omega^3 d^2 / (3 pi eps0 hbar c^3).
double dipole_from_lifetime(double gamma_per_s, double wavelength_nm, double host_index,
                            const PhysicalConstants& constants = kCodata2018);

// g = xi d E_vac / hbar, in rad/s.
double coupling_rate(double dipole_Cm, double evac_V_per_m, double orientation = 1.0,
                     const PhysicalConstants& constants = kCodata2018);

struct LinewidthConversions
{
    double length_linewidth_pm = 0.0;      // Gamma_L
    double wavelength_linewidth_pm = 0.0;  // Gamma_lambda
    double frequency_linewidth_hz = 0.0;   // Gamma_f
    double q = 0.0;
    double finesse = 0.0;
    double kappa_per_s = 0.0;              // 2 pi Gamma_f
    double kappa_from_q_per_s = 0.0;       // omega / Q
};

LinewidthConversions linewidth_conversions(double length_linewidth_pm, double slope, double wavelength_nm,
                                           const PhysicalConstants& constants = kCodata2018);

// 4 g^2 / (kappa gamma_R0). Sets *weak_coupling to g < kappa when given.
double purcell_zpl_theory(double g_per_s, double kappa_per_s, double gamma_total_per_s,
                          bool* weak_coupling = nullptr);

// ZPL emission probability on resonance, F gamma_0 / (gamma_1 + F gamma_0).
double eta_zpl(double purcell_zpl, double gamma0_per_s, double gamma1_per_s);

struct RatesMeasurement
{
    double gamma_on_per_s = 0.0;
    double gamma_off_per_s = 0.0;
    double gamma_bulk_per_s = 0.0;
    double debye_waller = debye_waller_presets::kSelfConsistent;
};

void validate(const RatesMeasurement& m);

struct RatesAlgebra
{
    double gamma0_per_s = 0.0;
    double purcell_total = 0.0;  // gamma_on / gamma_bulk
    double purcell_zpl = 0.0;    // (gamma_on - gamma_off + gamma_0) / gamma_0
    double eta_zpl = 0.0;        // F gamma_0 / gamma_on
};

RatesAlgebra rates_algebra(const RatesMeasurement& m);

struct DebyeWallerInversion
{
    double debye_waller = 0.0;
    double gamma0_per_s = 0.0;
    bool degenerate = false;  // gamma_on <= gamma_off
};

DebyeWallerInversion debye_waller_inversion(double gamma_on_per_s, double gamma_off_per_s, double gamma_bulk_per_s,
                                            double purcell_theory);

// (gamma_1 + F gamma_0) / 2 pi, in Hz.
double transform_limit_hz(double purcell_zpl, double gamma0_per_s, double gamma1_per_s);

// omega / kappa.
double required_q(double kappa_per_s, double wavelength_nm, const PhysicalConstants& constants = kCodata2018);

struct CouplingInputs
{
    EmitterSpec emitter;
    double wavelength_nm = 637.0;  // cavity resonance used for omega
    double evac_V_per_m = 0.0;
    std::string evac_source = "input";
    // Cavity linewidth: length-scan FWHM and slope, or kappa directly.
    std::optional<double> length_linewidth_pm;
    std::optional<double> slope;
    std::optional<double> kappa_per_s;
    std::optional<RatesMeasurement> rates;
    PhysicalConstants constants = kCodata2018;
};

struct CouplingReport
{
    CouplingInputs inputs;
    EmitterRates emitter_rates;
    double dipole_Cm = 0.0;
    double dipole_over_e_nm = 0.0;
    double g_per_s = 0.0;
    std::optional<LinewidthConversions> linewidth;
    double kappa_per_s = 0.0;
    double q = 0.0;
    double purcell_zpl_theory = 0.0;
    double eta_zpl_theory = 0.0;
    double transform_limit_hz = 0.0;
    bool weak_coupling = true;
    std::optional<RatesAlgebra> measured;
    std::optional<DebyeWallerInversion> inversion;
    std::vector<std::string> warnings;
};

CouplingReport coupling_report(const CouplingInputs& inputs);

} // namespace cavityforge

#endif // CAVITYFORGE_CQED_HPP
