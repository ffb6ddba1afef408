#include "cavityforge/cqed.hpp"

#include <cmath>

#include "cavityforge/errors.hpp"

namespace cavityforge
{

namespace
{

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InputError(std::string(what) + " must be > 0");
    }
}

} // namespace

double dipole_from_lifetime(double gamma_per_s, double wavelength_nm, double host_index,
                            const PhysicalConstants& k)
{
    require_positive(gamma_per_s, "decay rate");
    require_positive(wavelength_nm, "wavelength");
    require_positive(host_index, "host index");
    const double omega = k.angular_frequency(wavelength_nm);
    return std::sqrt(3.0 * kPi * k.eps0 * k.hbar * k.c * k.c * k.c * gamma_per_s /
                     (host_index * omega * omega * omega));
}

double coupling_rate(double dipole_Cm, double evac_V_per_m, double orientation, const PhysicalConstants& k)
{
    if (!(dipole_Cm >= 0.0) || !(evac_V_per_m >= 0.0)) {
        throw InputError("dipole and vacuum field must be >= 0");
    }
    if (!(orientation > 0.0 && orientation <= 1.0)) {
        throw InputError("dipole orientation factor must lie in (0, 1]");
    }
    return orientation * dipole_Cm * evac_V_per_m / k.hbar;
}

LinewidthConversions linewidth_conversions(double length_linewidth_pm, double slope, double wavelength_nm,
                                           const PhysicalConstants& k)
{
    require_positive(length_linewidth_pm, "length linewidth");
    require_positive(slope, "dispersion slope");
    require_positive(wavelength_nm, "wavelength");
    LinewidthConversions out;
    out.length_linewidth_pm = length_linewidth_pm;
    out.wavelength_linewidth_pm = length_linewidth_pm * slope;
    const double lam_pm = wavelength_nm * 1e3;
    out.q = lam_pm / out.wavelength_linewidth_pm;
    out.finesse = lam_pm / (2.0 * length_linewidth_pm);
    const double lam_m = wavelength_nm * 1e-9;
    out.frequency_linewidth_hz = k.c * out.wavelength_linewidth_pm * 1e-12 / (lam_m * lam_m);
    out.kappa_per_s = 2.0 * kPi * out.frequency_linewidth_hz;
    out.kappa_from_q_per_s = k.angular_frequency(wavelength_nm) / out.q;
    return out;
}

double purcell_zpl_theory(double g, double kappa, double gamma_total, bool* weak_coupling)
{
    if (!(g >= 0.0)) {
        throw InputError("coupling rate must be >= 0");
    }
    require_positive(kappa, "kappa");
    require_positive(gamma_total, "total decay rate");
    if (weak_coupling) {
        *weak_coupling = g < kappa;
    }
    return 4.0 * g * g / (kappa * gamma_total);
}

double eta_zpl(double purcell_zpl, double gamma0, double gamma1)
{
    const double zpl = purcell_zpl * gamma0;
    return zpl / (gamma1 + zpl);
}

void validate(const RatesMeasurement& m)
{
    require_positive(m.gamma_bulk_per_s, "bulk decay rate");
    require_positive(m.gamma_off_per_s, "off-resonant decay rate");
    if (!(m.gamma_on_per_s > m.gamma_off_per_s)) {
        throw InputError("on-resonant decay rate must exceed the off-resonant one");
    }
    if (!(m.debye_waller > 0.0 && m.debye_waller < 1.0)) {
        throw InputError("Debye-Waller fraction must lie in (0, 1)");
    }
}

RatesAlgebra rates_algebra(const RatesMeasurement& m)
{
    validate(m);
    RatesAlgebra out;
    out.gamma0_per_s = m.debye_waller * m.gamma_bulk_per_s;
    out.purcell_total = m.gamma_on_per_s / m.gamma_bulk_per_s;
    out.purcell_zpl = (m.gamma_on_per_s - m.gamma_off_per_s + out.gamma0_per_s) / out.gamma0_per_s;
    out.eta_zpl = out.purcell_zpl * out.gamma0_per_s / m.gamma_on_per_s;
    return out;
}

DebyeWallerInversion debye_waller_inversion(double gamma_on, double gamma_off, double gamma_bulk,
                                            double purcell_theory)
{
    require_positive(gamma_bulk, "bulk decay rate");
    if (!(purcell_theory > 1.0)) {
        throw InputError("theoretical Purcell factor must exceed 1");
    }
    DebyeWallerInversion out;
    if (!(gamma_on > gamma_off)) {
        out.degenerate = true;
        return out;
    }
    out.gamma0_per_s = (gamma_on - gamma_off) / (purcell_theory - 1.0);
    out.debye_waller = out.gamma0_per_s / gamma_bulk;
    return out;
}

double transform_limit_hz(double purcell_zpl, double gamma0, double gamma1)
{
    require_positive(purcell_zpl, "Purcell factor");
    require_positive(gamma0, "ZPL rate");
    if (!(gamma1 >= 0.0)) {
        throw InputError("sideband rate must be >= 0");
    }
    return (gamma1 + purcell_zpl * gamma0) / (2.0 * kPi);
}

double required_q(double kappa_per_s, double wavelength_nm, const PhysicalConstants& k)
{
    require_positive(kappa_per_s, "kappa");
    return k.angular_frequency(wavelength_nm) / kappa_per_s;
}

CouplingReport coupling_report(const CouplingInputs& in)
{
    validate(in.constants);
    CouplingReport rep;
    rep.inputs = in;
    rep.emitter_rates = emitter_rates(in.emitter);
    const double gamma_r0 = rep.emitter_rates.total_per_s;

    rep.dipole_Cm = dipole_from_lifetime(gamma_r0, in.emitter.zpl_wavelength_nm, in.emitter.host_index, in.constants);
    rep.dipole_over_e_nm = rep.dipole_Cm / in.constants.e_charge * 1e9;
    rep.g_per_s = coupling_rate(rep.dipole_Cm, in.evac_V_per_m, in.emitter.dipole_orientation, in.constants);

    if (in.length_linewidth_pm && in.slope) {
        rep.linewidth = linewidth_conversions(*in.length_linewidth_pm, *in.slope, in.wavelength_nm, in.constants);
        rep.kappa_per_s = rep.linewidth->kappa_per_s;
        if (in.kappa_per_s) {
            rep.warnings.push_back("kappa given together with a linewidth; the linewidth route is used");
        }
    } else if (in.kappa_per_s) {
        rep.kappa_per_s = *in.kappa_per_s;
    } else {
        throw InputError("cavity linewidth missing: give kappa or a length linewidth with its slope");
    }
    rep.q = required_q(rep.kappa_per_s, in.wavelength_nm, in.constants);

    rep.purcell_zpl_theory = purcell_zpl_theory(rep.g_per_s, rep.kappa_per_s, gamma_r0, &rep.weak_coupling);
    if (!rep.weak_coupling) {
        rep.warnings.push_back("g >= kappa: outside the weak-coupling regime");
    }
    rep.eta_zpl_theory =
        eta_zpl(rep.purcell_zpl_theory, rep.emitter_rates.zpl_per_s, rep.emitter_rates.sideband_per_s);
    rep.transform_limit_hz =
        transform_limit_hz(rep.purcell_zpl_theory, rep.emitter_rates.zpl_per_s, rep.emitter_rates.sideband_per_s);

    if (in.rates) {
        rep.measured = rates_algebra(*in.rates);
        if (rep.purcell_zpl_theory > 1.0) {
            rep.inversion = debye_waller_inversion(in.rates->gamma_on_per_s, in.rates->gamma_off_per_s,
                                                   in.rates->gamma_bulk_per_s, rep.purcell_zpl_theory);
        }
    }
    return rep;
}

} // namespace cavityforge
