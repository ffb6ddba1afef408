#ifndef CAVITYFORGE_REPORT_HPP
#define CAVITYFORGE_REPORT_HPP

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "cavityforge/config.hpp"
#include "cavityforge/cqed.hpp"
#include "cavityforge/design.hpp"
#include "cavityforge/fit.hpp"
#include "cavityforge/gaussian_modes.hpp"
#include "cavityforge/tmm.hpp"

namespace cavityforge
{

// Cavity tuned to the emitter ZPL plus everything derived from it.
struct ChainReport
{
    CavityAssembly cavity;
    double configured_air_gap_nm = 0.0;
    double slope_tmm = 0.0;
    double cold_linewidth_nm = 0.0;
    double cold_q = 0.0;
    TransverseMode mode;
    TransverseMode formula_mode;  // plano-concave estimate, reported even when overridden
    double gouy_length_offset_nm = 0.0;
    ModeVolumeReport vacuum;
    InterfaceField interface;
    CouplingReport coupling;
};

// Needs cavity and emitter. DomainError when the ZPL cannot be tuned onto a
// resonance.
ChainReport run_report_chain(const RunConfig& config);

nlohmann::json to_json(const ChainReport& report);
nlohmann::json to_json(const CouplingReport& report);
// Parameter units follow the x/y column units of the fitted data.
nlohmann::json to_json(const FitResult& fit, const std::string& x_unit, const std::string& y_unit);
nlohmann::json to_json(const G2Result& g2);
nlohmann::json to_json(const DesignPoint& point);
nlohmann::json pareto_json(const SweepResult& sweep);

void write_dispersion_csv(std::ostream& out, const DispersionMap& map);
void write_profile_csv(std::ostream& out, const FieldProfile& profile, double field_scale_V_per_m);
void write_design_csv(std::ostream& out, const std::vector<DesignPoint>& points);

} // namespace cavityforge

#endif // CAVITYFORGE_REPORT_HPP
