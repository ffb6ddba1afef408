#include "cavityforge/design.hpp"

#include <cmath>
#include <sstream>

#include "cavityforge/cqed.hpp"
#include "cavityforge/errors.hpp"
#include "cavityforge/parallel.hpp"

namespace cavityforge
{

namespace
{

double collected_flux(double kappa, double a, double gamma1, double kappa_loss)
{
    // eta_ZPL = a / (gamma1 kappa + a) with a = 4 g^2 gamma0 / gamma_R0.
    return a / (gamma1 * kappa + a) * kappa / (kappa + kappa_loss);
}

CavityAssembly build(const DesignSettings& s, double t_d_nm, double air_nm, bool bottom_high)
{
    MirrorSpec bottom = s.bottom_mirror;
    bottom.terminal_high_index = bottom_high;
    if ((t_d_nm + air_nm) * 1e-3 >= s.curvature_radius_um) {
        std::ostringstream msg;
        msg << "unstable_geometry: L + t_d = " << (t_d_nm + air_nm) * 1e-3 << " um >= R = " << s.curvature_radius_um
            << " um";
        throw DomainError(msg.str());
    }
    CavityAssembly c = assemble_cavity(bottom, t_d_nm, air_nm, s.top_mirror, s.curvature_radius_um, s.diamond_index);
    c.waist_fwhm_override_um = s.waist_fwhm_override_um;
    return c;
}

std::string reason_code(const std::string& what, const char* fallback)
{
    const auto colon = what.find(':');
    if (colon != std::string::npos && colon > 0) {
        const std::string head = what.substr(0, colon);
        if (head.find(' ') == std::string::npos) {
            return head;
        }
    }
    return fallback;
}

} // namespace

std::string to_string(Termination t) { return t == Termination::node ? "node" : "antinode"; }

Termination termination_from_string(const std::string& s)
{
    if (s == "node") {
        return Termination::node;
    }
    if (s == "antinode") {
        return Termination::antinode;
    }
    throw InputError("termination must be 'node' or 'antinode', got '" + s + "'");
}

KappaOptimum optimize_kappa(double g, double gamma0, double gamma1, double kappa_loss, double kappa_max)
{
    if (!(g > 0.0) || !(gamma0 > 0.0) || !(gamma1 >= 0.0) || !(kappa_loss >= 0.0)) {
        throw InputError("optimize_kappa needs g, gamma0 > 0 and gamma1, kappa_loss >= 0");
    }
    KappaOptimum out;
    out.kappa_loss_per_s = kappa_loss;
    out.kappa_rule_per_s = 2.0 * g;
    const double lo = 2.0 * g;
    const double hi = kappa_max > lo ? kappa_max : 1e4 * lo;
    const double a = 4.0 * g * g * gamma0 / (gamma0 + gamma1);
    auto f = [&](double log_k) { return collected_flux(std::exp(log_k), a, gamma1, kappa_loss); };

    // The objective is unimodal in log kappa.
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x0 = std::log(lo);
    double x1 = std::log(hi);
    double c = x1 - invphi * (x1 - x0);
    double d = x0 + invphi * (x1 - x0);
    double fc = f(c);
    double fd = f(d);
    while (x1 - x0 > 1e-12) {
        if (fc >= fd) {
            x1 = d;
            d = c;
            fd = fc;
            c = x1 - invphi * (x1 - x0);
            fc = f(c);
        } else {
            x0 = c;
            c = d;
            fc = fd;
            d = x0 + invphi * (x1 - x0);
            fd = f(d);
        }
    }
    double best = 0.5 * (x0 + x1);
    // The bracket ends are candidates too (monotone objectives).
    for (double edge : {std::log(lo), std::log(hi)}) {
        if (f(edge) >= f(best)) {
            best = edge;
        }
    }
    out.kappa_numeric_per_s = std::exp(best);
    out.objective_rule = collected_flux(out.kappa_rule_per_s, a, gamma1, kappa_loss);
    out.objective_numeric = collected_flux(out.kappa_numeric_per_s, a, gamma1, kappa_loss);

    std::ostringstream why;
    if (kappa_loss == 0.0) {
        why << "no outcoupling loss: eta_ZPL falls with kappa, so the optimum sits at the weak-coupling edge kappa = 2g";
    } else {
        why << "outcoupling loss " << kappa_loss << " /s: flux maximized at kappa = " << out.kappa_numeric_per_s
            << " /s within [2g, " << hi << "] /s";
    }
    out.rationale = why.str();
    return out;
}

DesignPoint evaluate_design(const DesignPoint& point, const EmitterSpec& emitter, const DesignSettings& settings)
{
    validate(emitter);
    validate(settings.constants);
    if (!(point.t_d_nm > 0.0) || !(point.L_nm > 0.0)) {
        throw InputError("invalid_input: design needs t_d > 0 and L > 0");
    }
    if (emitter.depth_nm > point.t_d_nm) {
        throw InputError("emitter_outside_membrane: emitter depth exceeds t_d");
    }
    if (point.kappa_per_s && point.q_target) {
        throw InputError("invalid_input: give kappa or a Q target, not both");
    }

    const double lam = emitter.zpl_wavelength_nm;
    std::vector<bool> choices;
    if (settings.bottom_terminal_high_index) {
        choices.push_back(*settings.bottom_terminal_high_index);
    } else {
        choices = {settings.bottom_mirror.terminal_high_index, !settings.bottom_mirror.terminal_high_index};
    }

    DesignPoint out = point;
    std::optional<CavityAssembly> chosen;
    std::optional<FieldProfile> profile;
    std::ostringstream seen;
    for (bool high : choices) {
        CavityAssembly c = build(settings, point.t_d_nm, point.L_nm, high);
        const double tuned = tune_air_gap(c, lam, point.L_nm);
        c = build(settings, point.t_d_nm, tuned, high);
        FieldProfile p = field_profile(c, lam);
        const InterfaceField f = classify_interface(p, c.diamond_air_interface_nm(), lam / 40.0);
        const bool match = !point.termination ||
                           (*point.termination == Termination::node && f.kind == InterfaceKind::node) ||
                           (*point.termination == Termination::antinode && f.kind == InterfaceKind::antinode);
        seen << (high ? " high-index" : " low-index") << " bottom termination gives " << to_string(f.kind) << ";";
        if (match) {
            out.bottom_terminal_high_index = high;
            out.L_resonant_nm = tuned;
            out.interface = f;
            chosen = c;
            profile = std::move(p);
            break;
        }
    }
    if (!chosen) {
        throw DomainError("termination_unrealizable: no bottom mirror gives a " + to_string(*point.termination) +
                          " at the diamond-air interface;" + seen.str());
    }

    out.wavelength_nm = lam;
    const TransverseMode mode = beam_waist(*chosen, lam);
    out.waist_source = mode.source;
    out.waist_um = mode.waist_um;
    out.effective_area_um2 = effective_area(mode);
    const ModeVolumeReport vac = vacuum_field(*profile, out.effective_area_um2, "diamond", settings.constants);
    out.evac_V_per_m = vac.evac_region_V_per_m;
    out.evac_global_V_per_m = vac.evac_global_V_per_m;

    const EmitterRates rates = emitter_rates(emitter);
    const double dipole = dipole_from_lifetime(rates.total_per_s, lam, emitter.host_index, settings.constants);
    out.g_per_s = coupling_rate(dipole, out.evac_V_per_m, emitter.dipole_orientation, settings.constants);

    out.kappa = optimize_kappa(out.g_per_s, rates.zpl_per_s, rates.sideband_per_s, settings.kappa_loss_per_s);
    if (point.kappa_per_s) {
        out.kappa_used_per_s = *point.kappa_per_s;
    } else if (point.q_target) {
        out.kappa_used_per_s = settings.constants.angular_frequency(lam) / *point.q_target;
    } else {
        out.kappa_used_per_s = settings.kappa_choice == KappaChoice::two_g ? out.kappa.kappa_rule_per_s
                                                                           : out.kappa.kappa_numeric_per_s;
    }
    out.q_required = required_q(out.kappa_used_per_s, lam, settings.constants);
    out.cold_q = lam / resonance_linewidth(*chosen, lam);

    out.purcell_zpl = purcell_zpl_theory(out.g_per_s, out.kappa_used_per_s, rates.total_per_s);
    out.eta_zpl = eta_zpl(out.purcell_zpl, rates.zpl_per_s, rates.sideband_per_s);
    out.transform_limit_hz = transform_limit_hz(out.purcell_zpl, rates.zpl_per_s, rates.sideband_per_s);

    out.variants.clear();
    for (double dw : settings.debye_waller_variants) {
        const double g0 = dw * rates.total_per_s;
        const double g1 = rates.total_per_s - g0;
        out.variants.push_back({dw, eta_zpl(out.purcell_zpl, g0, g1), transform_limit_hz(out.purcell_zpl, g0, g1)});
    }
    out.evaluated = true;
    out.reason.clear();
    return out;
}

CavityAssembly design_cavity(const DesignPoint& p, const DesignSettings& settings)
{
    if (!p.valid()) {
        throw InputError("design point has not been evaluated successfully");
    }
    return build(settings, p.t_d_nm, p.L_resonant_nm, p.bottom_terminal_high_index);
}

std::vector<std::size_t> pareto_front(const std::vector<DesignPoint>& pts)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!pts[i].valid()) {
            continue;
        }
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
            if (j == i || !pts[j].valid()) {
                continue;
            }
            const bool no_worse = pts[j].eta_zpl >= pts[i].eta_zpl && pts[j].q_required <= pts[i].q_required;
            const bool better = pts[j].eta_zpl > pts[i].eta_zpl || pts[j].q_required < pts[i].q_required;
            dominated = no_worse && better;
        }
        if (!dominated) {
            out.push_back(i);
        }
    }
    return out;
}

SweepResult sweep(const SweepRanges& ranges, const EmitterSpec& emitter, const DesignSettings& settings,
                  unsigned threads)
{
    if (ranges.t_d_nm.empty() || ranges.L_nm.empty() || ranges.terminations.empty()) {
        throw InputError("sweep grids must be non-empty");
    }
    SweepResult res;
    res.emitter = emitter;
    res.settings = settings;
    for (double t : ranges.t_d_nm) {
        for (double l : ranges.L_nm) {
            for (Termination term : ranges.terminations) {
                DesignPoint p;
                p.t_d_nm = t;
                p.L_nm = l;
                p.termination = term;
                res.points.push_back(p);
            }
        }
    }
    parallel_for(res.points.size(), threads, [&](std::size_t i) {
        DesignPoint& p = res.points[i];
        try {
            p = evaluate_design(p, emitter, settings);
        } catch (const DomainError& e) {
            p.evaluated = true;
            p.reason = reason_code(e.what(), "domain_error");
        } catch (const InputError& e) {
            p.evaluated = true;
            p.reason = reason_code(e.what(), "invalid_input");
        }
    });
    res.pareto = pareto_front(res.points);
    if (res.pareto.empty()) {
        throw DomainError("every sweep point is invalid");
    }
    return res;
}

} // namespace cavityforge
