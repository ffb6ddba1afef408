#ifndef CAVITYFORGE_CONFIG_HPP
#define CAVITYFORGE_CONFIG_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "cavityforge/constants.hpp"
#include "cavityforge/cqed.hpp"
#include "cavityforge/design.hpp"
#include "cavityforge/stack.hpp"
#include "cavityforge/tmm.hpp"

namespace cavityforge
{

struct DispersionRequest
{
    LengthGrid lengths{1500.0, 4500.0, 2.0};
    WavelengthWindow window{600.0, 700.0};
    int max_transverse_order = 0;
};

// Measured cavity and emitter data feeding the coupling report.
struct MeasurementConfig
{
    std::optional<double> length_linewidth_pm;
    std::optional<double> slope;  // d lambda / d L; computed from the TMM when absent
    std::optional<double> gamma_on_per_s;
    std::optional<double> gamma_off_per_s;
    std::optional<double> gamma_bulk_per_s;
};

struct FitConfig
{
    double irf_sigma_ns = 0.2;
    double irf_center_ns = 0.0;
    double fit_window_start_ns = 3.0;
    std::optional<double> pulse_period_ns;
    std::optional<double> g2_window_ns;
    std::optional<double> normalization_delay_ns;
};

struct DesignConfig
{
    DesignSettings settings;
    SweepRanges ranges{{198.0, 132.0}, {478.0, 637.0}, {Termination::node, Termination::antinode}};
    // Debye-Waller fraction used for design figures; the emitter's own
    // value is kept for the coupling report.
    double debye_waller = debye_waller_presets::kDesign;
};

struct OutputConfig
{
    std::string path;  // empty: stdout
};

struct RunConfig
{
    std::optional<CavityAssembly> cavity;
    std::optional<EmitterSpec> emitter;
    PhysicalConstants constants = kCodata2018;
    DispersionRequest dispersion;
    MeasurementConfig measurement;
    DesignConfig design;
    FitConfig fit;
    OutputConfig output;
};

// Strict parse: unknown keys and wrong types raise InputError; lengths carry
// unit suffixes in their keys.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

nlohmann::json to_json(const CavityAssembly& cavity);
CavityAssembly cavity_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EmitterSpec& emitter);
EmitterSpec emitter_from_json(const nlohmann::json& j);

// Reference membrane cavity plus its measured linewidth and decay rates.
RunConfig reference_config();

} // namespace cavityforge

#endif // CAVITYFORGE_CONFIG_HPP
