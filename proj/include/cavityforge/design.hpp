#ifndef CAVITYFORGE_DESIGN_HPP
#define CAVITYFORGE_DESIGN_HPP

#include <optional>
#include <string>
#include <vector>

#include "cavityforge/constants.hpp"
#include "cavityforge/gaussian_modes.hpp"
#include "cavityforge/stack.hpp"
#include "cavityforge/tmm.hpp"

namespace cavityforge
{

// Field condition requested at the diamond-air interface.
enum class Termination
{
    node,
    antinode,
};

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

enum class KappaChoice
{
    two_g,    // kappa = 2 g
    numeric,  // maximizer of the collected ZPL flux
};

struct KappaOptimum
{
    double kappa_rule_per_s = 0.0;
    double kappa_numeric_per_s = 0.0;
    double objective_rule = 0.0;
    double objective_numeric = 0.0;
    double kappa_loss_per_s = 0.0;
    std::string rationale;
};

// Collected ZPL flux eta_ZPL(kappa) kappa / (kappa + kappa_loss), maximized
// over [2 g, kappa_max] on a log scale. kappa_max <= 0 picks 1e4 * 2 g.
KappaOptimum optimize_kappa(double g_per_s, double gamma0_per_s, double gamma1_per_s, double kappa_loss_per_s = 0.0,
                            double kappa_max_per_s = 0.0);

struct DesignSettings
{
    MirrorSpec bottom_mirror = [] {
        MirrorSpec m;
        m.terminal_high_index = false;
        return m;
    }();
    MirrorSpec top_mirror = [] {
        MirrorSpec m;
        m.pairs = 14;
        m.terminal_high_index = false;
        return m;
    }();
    double curvature_radius_um = 5.5;
    std::optional<double> waist_fwhm_override_um;
    double diamond_index = 2.41;
    double kappa_loss_per_s = 0.0;
    KappaChoice kappa_choice = KappaChoice::two_g;
    // When set, the bottom-mirror termination is fixed instead of chosen to
    // realize the requested interface condition.
    std::optional<bool> bottom_terminal_high_index;
    // Debye-Waller fractions reported next to the emitter's own value.
    std::vector<double> debye_waller_variants{debye_waller_presets::kDesign, debye_waller_presets::kLow,
                                              debye_waller_presets::kSelfConsistent, debye_waller_presets::kHigh};
    PhysicalConstants constants = kCodata2018;
};

struct DebyeWallerVariant
{
    double debye_waller = 0.0;
    double eta_zpl = 0.0;
    double transform_limit_hz = 0.0;
};

struct DesignPoint
{
    // Inputs.
    double t_d_nm = 0.0;
    double L_nm = 0.0;  // nominal air gap; tuned to the nearest ZPL resonance
    std::optional<Termination> termination;
    std::optional<double> kappa_per_s;
    std::optional<double> q_target;

    // Derived.
    bool evaluated = false;
    std::string reason;  // empty when valid
    double wavelength_nm = 0.0;
    double L_resonant_nm = 0.0;
    bool bottom_terminal_high_index = false;
    InterfaceField interface;
    WaistSource waist_source = WaistSource::formula;
    double waist_um = 0.0;
    double effective_area_um2 = 0.0;
    double evac_V_per_m = 0.0;
    double evac_global_V_per_m = 0.0;
    double g_per_s = 0.0;
    double kappa_used_per_s = 0.0;
    KappaOptimum kappa;
    double q_required = 0.0;
    double cold_q = 0.0;  // bare mirror Q from the TMM linewidth
    double purcell_zpl = 0.0;
    double eta_zpl = 0.0;
    double transform_limit_hz = 0.0;
    std::vector<DebyeWallerVariant> variants;

    bool valid() const { return evaluated && reason.empty(); }
};

// Builds the cavity (membrane, tuned air gap, mirrors chosen for the
// requested interface condition) and runs the TMM field, vacuum field and
// coupling chain. Throws DomainError when the geometry is unstable or the
// requested termination cannot be realized, InputError on bad input.
DesignPoint evaluate_design(const DesignPoint& point, const EmitterSpec& emitter, const DesignSettings& settings = {});

// Assembly realized by an evaluated design point.
CavityAssembly design_cavity(const DesignPoint& evaluated, const DesignSettings& settings);

struct SweepRanges
{
    std::vector<double> t_d_nm;
    std::vector<double> L_nm;
    std::vector<Termination> terminations{Termination::node, Termination::antinode};
};

struct SweepResult
{
    std::vector<DesignPoint> points;     // grid order: t_d, then L, then termination
    std::vector<std::size_t> pareto;     // indices into points, ascending
    EmitterSpec emitter;
    DesignSettings settings;
};

// Invalid geometries are kept with a reason code. DomainError when no
// point is valid.
SweepResult sweep(const SweepRanges& ranges, const EmitterSpec& emitter, const DesignSettings& settings = {},
                  unsigned threads = 0);

// Indices of points not dominated in (eta_ZPL up, Q_required down).
std::vector<std::size_t> pareto_front(const std::vector<DesignPoint>& points);

} // namespace cavityforge

#endif // CAVITYFORGE_DESIGN_HPP
