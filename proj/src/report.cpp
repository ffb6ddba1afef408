#include "cavityforge/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "cavityforge/csv.hpp"
#include "cavityforge/errors.hpp"

namespace cavityforge
{

using nlohmann::json;

namespace
{

json quantity(double value, const std::string& unit) { return {{"value", value}, {"unit", unit}}; }

std::string fit_unit(const std::string& name, const std::string& x_unit, const std::string& y_unit)
{
    if (name == "center" || name == "fwhm" || name == "fwhm_gaussian" || name == "fwhm_lorentzian") {
        return x_unit;
    }
    if (name == "tau_ns") {
        return "ns";
    }
    return y_unit;
}

std::string dw_key(double dw)
{
    std::ostringstream s;
    s.precision(4);
    s << std::fixed << dw;
    return s.str();
}

} // namespace

ChainReport run_report_chain(const RunConfig& cfg)
{
    if (!cfg.cavity) {
        throw InputError("config has no cavity block");
    }
    if (!cfg.emitter) {
        throw InputError("config has no emitter block");
    }
    validate(*cfg.emitter, *cfg.cavity);
    ChainReport rep;
    const double lam = cfg.emitter->zpl_wavelength_nm;
    rep.configured_air_gap_nm = cfg.cavity->air_gap_nm();

    const double tuned = tune_air_gap(*cfg.cavity, lam, rep.configured_air_gap_nm);
    rep.cavity = cfg.cavity->with_air_gap(tuned);
    validate(rep.cavity);
    rep.slope_tmm = resonance_slope(rep.cavity, lam, tuned);
    rep.cold_linewidth_nm = resonance_linewidth(rep.cavity, lam);
    rep.cold_q = lam / rep.cold_linewidth_nm;

    const FieldProfile profile = field_profile(rep.cavity, lam);
    rep.mode = beam_waist(rep.cavity, lam);
    rep.formula_mode = beam_waist(rep.cavity.curvature_radius_um, rep.cavity.geometric_length_um(), lam);
    rep.gouy_length_offset_nm =
        transverse_offsets(rep.cavity.curvature_radius_um, rep.cavity.geometric_length_um(), lam, 1)[1];
    const std::string region = rep.cavity.has_diamond() ? "diamond" : "air";
    rep.vacuum = vacuum_field(profile, effective_area(rep.mode), region, cfg.constants);
    rep.interface = classify_interface(profile, rep.cavity.diamond_air_interface_nm(), lam / 40.0);

    CouplingInputs in;
    in.emitter = *cfg.emitter;
    in.wavelength_nm = lam;
    in.evac_V_per_m = rep.vacuum.evac_region_V_per_m;
    in.evac_source = "transfer-matrix field maximum in the " + region;
    in.constants = cfg.constants;
    const auto& m = cfg.measurement;
    if (m.length_linewidth_pm) {
        in.length_linewidth_pm = m.length_linewidth_pm;
        in.slope = m.slope ? *m.slope : rep.slope_tmm;
    } else {
        in.kappa_per_s = 2.0 * kPi * cfg.constants.c * rep.cold_linewidth_nm * 1e-9 / std::pow(lam * 1e-9, 2);
    }
    if (m.gamma_on_per_s || m.gamma_off_per_s || m.gamma_bulk_per_s) {
        if (!m.gamma_on_per_s || !m.gamma_off_per_s) {
            throw InputError("measurement needs both gamma_on_per_s and gamma_off_per_s");
        }
        RatesMeasurement r;
        r.gamma_on_per_s = *m.gamma_on_per_s;
        r.gamma_off_per_s = *m.gamma_off_per_s;
        r.gamma_bulk_per_s = m.gamma_bulk_per_s ? *m.gamma_bulk_per_s : 1e9 / cfg.emitter->bulk_lifetime_ns;
        r.debye_waller = cfg.emitter->debye_waller;
        in.rates = r;
    }
    rep.coupling = coupling_report(in);
    return rep;
}

json to_json(const CouplingReport& r)
{
    const auto& in = r.inputs;
    json inputs = {
        {"emitter",
         {{"zpl_wavelength", quantity(in.emitter.zpl_wavelength_nm, "nm")},
          {"bulk_lifetime", quantity(in.emitter.bulk_lifetime_ns, "ns")},
          {"host_index", quantity(in.emitter.host_index, "1")},
          {"debye_waller", quantity(in.emitter.debye_waller, "1")},
          {"depth", quantity(in.emitter.depth_nm, "nm")},
          {"dipole_orientation", quantity(in.emitter.dipole_orientation, "1")}}},
        {"resonance_wavelength", quantity(in.wavelength_nm, "nm")},
        {"vacuum_field", quantity(in.evac_V_per_m, "V/m")},
        {"vacuum_field_source", in.evac_source},
    };
    if (in.length_linewidth_pm) {
        inputs["length_linewidth"] = quantity(*in.length_linewidth_pm, "pm");
    }
    if (in.slope) {
        inputs["dlambda_dL"] = quantity(*in.slope, "1");
    }
    if (in.kappa_per_s) {
        inputs["kappa"] = quantity(*in.kappa_per_s, "1/s");
    }
    if (in.rates) {
        inputs["rates"] = {{"gamma_on", quantity(in.rates->gamma_on_per_s, "1/s")},
                           {"gamma_off", quantity(in.rates->gamma_off_per_s, "1/s")},
                           {"gamma_bulk", quantity(in.rates->gamma_bulk_per_s, "1/s")},
                           {"debye_waller", quantity(in.rates->debye_waller, "1")}};
    }

    json j = {
        {"inputs", inputs},
        {"emitter_rates",
         {{"gamma_total", quantity(r.emitter_rates.total_per_s, "1/s")},
          {"gamma_zpl", quantity(r.emitter_rates.zpl_per_s, "1/s")},
          {"gamma_sideband", quantity(r.emitter_rates.sideband_per_s, "1/s")}}},
        {"dipole", quantity(r.dipole_Cm, "C m")},
        {"dipole_over_e", quantity(r.dipole_over_e_nm, "nm")},
        {"g", quantity(r.g_per_s, "rad/s")},
        {"kappa", quantity(r.kappa_per_s, "1/s")},
        {"Q", quantity(r.q, "1")},
        {"F_P_ZPL_theory", quantity(r.purcell_zpl_theory, "1")},
        {"eta_ZPL_theory", quantity(r.eta_zpl_theory, "1")},
        {"transform_limit", quantity(r.transform_limit_hz, "Hz")},
        {"weak_coupling", r.weak_coupling},
        {"warnings", r.warnings},
    };
    if (r.linewidth) {
        const auto& l = *r.linewidth;
        j["linewidth"] = {{"length", quantity(l.length_linewidth_pm, "pm")},
                          {"wavelength", quantity(l.wavelength_linewidth_pm, "pm")},
                          {"frequency", quantity(l.frequency_linewidth_hz, "Hz")},
                          {"finesse", quantity(l.finesse, "1")},
                          {"Q", quantity(l.q, "1")},
                          {"kappa", quantity(l.kappa_per_s, "1/s")},
                          {"kappa_from_Q", quantity(l.kappa_from_q_per_s, "1/s")}};
    }
    if (r.measured) {
        j["measured"] = {{"gamma_zpl", quantity(r.measured->gamma0_per_s, "1/s")},
                         {"F_P_total", quantity(r.measured->purcell_total, "1")},
                         {"F_P_ZPL", quantity(r.measured->purcell_zpl, "1")},
                         {"eta_ZPL", quantity(r.measured->eta_zpl, "1")}};
    }
    if (r.inversion) {
        j["debye_waller_inversion"] = {{"debye_waller", quantity(r.inversion->debye_waller, "1")},
                                       {"gamma_zpl", quantity(r.inversion->gamma0_per_s, "1/s")},
                                       {"degenerate", r.inversion->degenerate}};
    }
    return j;
}

json to_json(const ChainReport& r)
{
    json cavity = to_json(r.cavity);
    json j = {
        {"cavity", cavity},
        {"configured_air_gap", quantity(r.configured_air_gap_nm, "nm")},
        {"resonant_air_gap", quantity(r.cavity.air_gap_nm(), "nm")},
        {"dlambda_dL_tmm", quantity(r.slope_tmm, "1")},
        {"cold_linewidth", quantity(r.cold_linewidth_nm * 1e3, "pm")},
        {"cold_Q", quantity(r.cold_q, "1")},
        {"transverse_mode",
         {{"waist", quantity(r.mode.waist_um, "um")},
          {"fwhm", quantity(r.mode.fwhm_um, "um")},
          {"source", to_string(r.mode.source)},
          {"formula_waist", quantity(r.formula_mode.waist_um, "um")},
          {"formula_fwhm", quantity(r.formula_mode.fwhm_um, "um")},
          {"gouy_length_offset_first_order", quantity(r.gouy_length_offset_nm, "nm")}}},
        {"mode_volume",
         {{"effective_area", quantity(r.vacuum.effective_area_um2, "um^2")},
          {"longitudinal_integral", quantity(r.vacuum.longitudinal_integral_nm, "nm")},
          {"volume", quantity(r.vacuum.volume_um3, "um^3")},
          {"volume_global", quantity(r.vacuum.volume_global_um3, "um^3")},
          {"region", r.vacuum.region},
          {"E_vac_region_max", quantity(r.vacuum.evac_region_V_per_m, "V/m")},
          {"z_region_max", quantity(r.vacuum.z_region_max_nm, "nm")},
          {"E_vac_global_max", quantity(r.vacuum.evac_global_V_per_m, "V/m")},
          {"z_global_max", quantity(r.vacuum.z_global_max_nm, "nm")}}},
        {"interface",
         {{"kind", to_string(r.interface.kind)},
          {"relative_amplitude", quantity(r.interface.relative_amplitude, "1")},
          {"distance_to_node", quantity(r.interface.distance_to_node_nm, "nm")},
          {"distance_to_antinode", quantity(r.interface.distance_to_antinode_nm, "nm")}}},
        {"coupling", to_json(r.coupling)},
    };
    return j;
}

json to_json(const FitResult& fit, const std::string& x_unit, const std::string& y_unit)
{
    json params = json::object();
    for (const auto& p : fit.parameters) {
        params[p.name] = {{"value", p.value}, {"uncertainty", p.uncertainty},
                          {"unit", fit_unit(p.name, x_unit, y_unit)}};
    }
    return {{"model", fit.model},
            {"parameters", params},
            {"reduced_chi2", fit.reduced_chi2},
            {"converged", fit.converged},
            {"degenerate", fit.degenerate},
            {"iterations", fit.iterations},
            {"warnings", fit.warnings},
            {"residuals", fit.residuals}};
}

json to_json(const G2Result& g)
{
    json peaks = json::array();
    for (const auto& p : g.peaks) {
        peaks.push_back({{"index", p.index}, {"delay_ns", p.delay_ns}, {"area_counts", p.area}});
    }
    return {{"model", "g2"},
            {"g2_zero", g.g2_zero},
            {"normalization_area", quantity(g.normalization_area, "counts")},
            {"normalization_delay", quantity(g.normalization_delay_ns, "ns")},
            {"normalization_peaks", g.normalization_peaks},
            {"peaks", peaks},
            {"converged", true}};
}

json to_json(const DesignPoint& p)
{
    json j = {{"t_d", quantity(p.t_d_nm, "nm")}, {"L", quantity(p.L_nm, "nm")}, {"valid", p.valid()}};
    if (p.termination) {
        j["termination"] = to_string(*p.termination);
    }
    if (!p.valid()) {
        j["reason"] = p.reason;
        return j;
    }
    json variants = json::object();
    for (const auto& v : p.variants) {
        variants[dw_key(v.debye_waller)] = {{"eta_ZPL", v.eta_zpl},
                                            {"transform_limit", quantity(v.transform_limit_hz, "Hz")}};
    }
    j.update({{"wavelength", quantity(p.wavelength_nm, "nm")},
              {"L_resonant", quantity(p.L_resonant_nm, "nm")},
              {"bottom_terminal_high_index", p.bottom_terminal_high_index},
              {"interface_kind", to_string(p.interface.kind)},
              {"interface_amplitude", p.interface.relative_amplitude},
              {"waist_source", to_string(p.waist_source)},
              {"waist", quantity(p.waist_um, "um")},
              {"effective_area", quantity(p.effective_area_um2, "um^2")},
              {"E_vac", quantity(p.evac_V_per_m, "V/m")},
              {"E_vac_global", quantity(p.evac_global_V_per_m, "V/m")},
              {"g", quantity(p.g_per_s, "rad/s")},
              {"kappa", quantity(p.kappa_used_per_s, "1/s")},
              {"kappa_2g", quantity(p.kappa.kappa_rule_per_s, "1/s")},
              {"kappa_numeric", quantity(p.kappa.kappa_numeric_per_s, "1/s")},
              {"kappa_rationale", p.kappa.rationale},
              {"Q_required", quantity(p.q_required, "1")},
              {"cold_Q", quantity(p.cold_q, "1")},
              {"F_P_ZPL", quantity(p.purcell_zpl, "1")},
              {"eta_ZPL", quantity(p.eta_zpl, "1")},
              {"transform_limit", quantity(p.transform_limit_hz, "Hz")},
              {"debye_waller_variants", variants}});
    return j;
}

json pareto_json(const SweepResult& s)
{
    json pts = json::array();
    for (std::size_t i : s.pareto) {
        json p = to_json(s.points[i]);
        p["row"] = i;
        pts.push_back(p);
    }
    std::size_t valid = 0;
    for (const auto& p : s.points) {
        valid += p.valid() ? 1 : 0;
    }
    return {{"objectives", {"eta_ZPL (max)", "Q_required (min)"}},
            {"points_total", s.points.size()},
            {"points_valid", valid},
            {"pareto", pts},
            {"fixed",
             {{"emitter_zpl_wavelength", quantity(s.emitter.zpl_wavelength_nm, "nm")},
              {"debye_waller", quantity(s.emitter.debye_waller, "1")},
              {"curvature_radius", quantity(s.settings.curvature_radius_um, "um")},
              {"kappa_loss", quantity(s.settings.kappa_loss_per_s, "1/s")},
              {"bottom_pairs", s.settings.bottom_mirror.pairs},
              {"top_pairs", s.settings.top_mirror.pairs}}}};
}

void write_dispersion_csv(std::ostream& out, const DispersionMap& map)
{
    struct Row
    {
        double L;
        int branch;
        const BranchSample* s;
        int order;
    };
    std::vector<Row> rows;
    for (const auto& b : map.branches) {
        for (const auto& s : b.samples) {
            rows.push_back({s.air_gap_nm, b.id, &s, b.transverse_order});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.L != b.L ? a.L < b.L : a.branch < b.branch;
    });
    CsvWriter w(out, {"L_nm", "branch_id", "lambda_nm", "dlambda_dL", "character", "transverse_order"});
    for (const auto& r : rows) {
        w.cell(r.L).cell(static_cast<long long>(r.branch)).cell(r.s->wavelength_nm);
        if (std::isfinite(r.s->slope)) {
            w.cell(r.s->slope);
        } else {
            w.cell(std::string("nan"));
        }
        w.cell(to_string(r.s->character)).cell(static_cast<long long>(r.order));
        w.end_row();
    }
}

void write_profile_csv(std::ostream& out, const FieldProfile& p, double scale)
{
    CsvWriter w(out, {"z_nm", "amplitude_rel", "eps_r", "layer", "E_vac_V_per_m"});
    for (const auto& s : p.samples) {
        w.cell(s.z_nm).cell(s.amplitude).cell(s.eps_r);
        w.cell(p.segments[static_cast<std::size_t>(s.segment)].name).cell(scale * s.amplitude);
        w.end_row();
    }
}

void write_design_csv(std::ostream& out, const std::vector<DesignPoint>& pts)
{
    std::vector<std::string> header{
        "t_d_nm",   "L_nm",        "termination",     "valid",          "reason",          "L_resonant_nm",
        "bottom_terminal", "interface_kind", "interface_amplitude", "waist_um", "A_eff_um2", "E_vac_kV_per_m",
        "g_per_s",  "kappa_per_s", "kappa_2g_per_s",  "kappa_numeric_per_s", "Q_required", "cold_Q",
        "F_P_ZPL",  "eta_ZPL",     "transform_limit_MHz"};
    std::vector<double> dws;
    for (const auto& p : pts) {
        if (p.valid()) {
            for (const auto& v : p.variants) {
                dws.push_back(v.debye_waller);
            }
            break;
        }
    }
    for (double dw : dws) {
        header.push_back("eta_ZPL_dw_" + dw_key(dw));
        header.push_back("transform_limit_MHz_dw_" + dw_key(dw));
    }
    CsvWriter w(out, header);
    for (const auto& p : pts) {
        w.cell(p.t_d_nm).cell(p.L_nm).cell(p.termination ? to_string(*p.termination) : std::string("any"));
        w.cell(std::string(p.valid() ? "1" : "0")).cell(p.valid() ? std::string("ok") : p.reason);
        if (!p.valid()) {
            for (std::size_t k = 5; k < header.size(); ++k) {
                w.cell(std::string(""));
            }
            w.end_row();
            continue;
        }
        w.cell(p.L_resonant_nm).cell(std::string(p.bottom_terminal_high_index ? "high" : "low"));
        w.cell(to_string(p.interface.kind)).cell(p.interface.relative_amplitude);
        w.cell(p.waist_um).cell(p.effective_area_um2).cell(p.evac_V_per_m * 1e-3);
        w.cell(p.g_per_s).cell(p.kappa_used_per_s).cell(p.kappa.kappa_rule_per_s).cell(p.kappa.kappa_numeric_per_s);
        w.cell(p.q_required).cell(p.cold_q).cell(p.purcell_zpl).cell(p.eta_zpl).cell(p.transform_limit_hz * 1e-6);
        for (std::size_t k = 0; k < dws.size(); ++k) {
            if (k < p.variants.size()) {
                w.cell(p.variants[k].eta_zpl).cell(p.variants[k].transform_limit_hz * 1e-6);
            } else {
                w.cell(std::string("")).cell(std::string(""));
            }
        }
        w.end_row();
    }
}

} // namespace cavityforge
