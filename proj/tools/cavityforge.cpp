#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cavityforge/config.hpp"
#include "cavityforge/csv.hpp"
#include "cavityforge/design.hpp"
#include "cavityforge/errors.hpp"
#include "cavityforge/fit.hpp"
#include "cavityforge/report.hpp"
#include "cavityforge/tmm.hpp"

namespace cf = cavityforge;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;
constexpr int kExitFit = 4;

struct Common
{
    std::string config_path;
    bool paper_baseline = false;
    std::string output;
    unsigned threads = 0;
};

cf::RunConfig load(const Common& c)
{
    if (c.paper_baseline && !c.config_path.empty()) {
        throw cf::InputError("--config and --paper-baseline are mutually exclusive");
    }
    if (c.paper_baseline) {
        return cf::reference_config();
    }
    if (c.config_path.empty()) {
        throw cf::InputError("give --config FILE or --paper-baseline");
    }
    return cf::load_config(c.config_path);
}

// Writes through `body` into the -o file, or stdout.
template <class Body>
void emit(const std::string& path, Body&& body)
{
    if (path.empty() || path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw cf::InputError("cannot write '" + path + "'");
    }
    body(out);
}

void emit_json(const std::string& path, const nlohmann::json& j)
{
    emit(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

std::map<std::string, std::string> key_values(const std::vector<std::string>& tokens)
{
    std::map<std::string, std::string> kv;
    for (const auto& t : tokens) {
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw cf::InputError("expected key=value, got '" + t + "'");
        }
        kv[t.substr(0, eq)] = t.substr(eq + 1);
    }
    return kv;
}

double to_number(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty() || !std::isfinite(out)) {
        throw cf::InputError(key + ": '" + v + "' is not a number");
    }
    return out;
}

int run_dispersion(const Common& c, std::optional<double> l_start, std::optional<double> l_stop,
                   std::optional<double> l_step, std::optional<double> lam_min, std::optional<double> lam_max,
                   std::optional<int> max_order)
{
    cf::RunConfig cfg = load(c);
    if (!cfg.cavity) {
        throw cf::InputError("config has no cavity block");
    }
    auto req = cfg.dispersion;
    if (l_start) req.lengths.start_nm = *l_start;
    if (l_stop) req.lengths.stop_nm = *l_stop;
    if (l_step) req.lengths.step_nm = *l_step;
    if (lam_min) req.window.lower_nm = *lam_min;
    if (lam_max) req.window.upper_nm = *lam_max;
    if (max_order) req.max_transverse_order = *max_order;

    cf::DispersionOptions opt;
    opt.threads = c.threads;
    opt.max_transverse_order = req.max_transverse_order;
    const auto map = cf::dispersion_map(*cfg.cavity, req.lengths, req.window, opt);
    for (const auto& w : map.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    if (map.branches.empty()) {
        std::ostringstream msg;
        msg << "no resonance in [" << req.window.lower_nm << ", " << req.window.upper_nm << "] nm for L in ["
            << req.lengths.start_nm << ", " << req.lengths.stop_nm << "] nm";
        throw cf::DomainError(msg.str());
    }
    emit(c.output.empty() ? cfg.output.path : c.output,
         [&](std::ostream& os) { cf::write_dispersion_csv(os, map); });
    return kExitOk;
}

int run_report(const Common& c)
{
    const cf::RunConfig cfg = load(c);
    const auto rep = cf::run_report_chain(cfg);
    for (const auto& w : rep.coupling.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    emit_json(c.output.empty() ? cfg.output.path : c.output, cf::to_json(rep));
    return kExitOk;
}

int run_profile(const Common& c, std::optional<double> wavelength, bool no_tune)
{
    const cf::RunConfig cfg = load(c);
    if (!cfg.cavity) {
        throw cf::InputError("config has no cavity block");
    }
    const double lam = wavelength ? *wavelength : (cfg.emitter ? cfg.emitter->zpl_wavelength_nm : 637.0);
    cf::CavityAssembly cavity = *cfg.cavity;
    if (!no_tune) {
        cavity = cavity.with_air_gap(cf::tune_air_gap(cavity, lam, cavity.air_gap_nm()));
        cf::validate(cavity);
    }
    const auto profile = cf::field_profile(cavity, lam);
    const auto mode = cf::beam_waist(cavity, lam);
    const std::string region = cavity.has_diamond() ? "diamond" : "air";
    const auto vac = cf::vacuum_field(profile, cf::effective_area(mode), region, cfg.constants);
    std::cerr << "air gap " << cf::format_number(cavity.air_gap_nm()) << " nm, E_vac max in " << region << " "
              << cf::format_number(vac.evac_region_V_per_m * 1e-3) << " kV/m\n";
    emit(c.output, [&](std::ostream& os) { cf::write_profile_csv(os, profile, vac.field_scale_V_per_m); });
    return kExitOk;
}

struct FitFlags
{
    std::optional<double> irf_sigma_ns;
    std::optional<double> irf_center_ns;
    std::optional<double> window_start_ns;
    std::optional<double> period_ns;
    std::optional<double> g2_window_ns;
    std::optional<double> normalization_delay_ns;
};

int run_fit(const Common& c, const std::string& kind, const std::string& data_path, const FitFlags& f)
{
    cf::FitConfig fc;
    if (!c.config_path.empty() || c.paper_baseline) {
        fc = load(c).fit;
    }
    if (f.irf_sigma_ns) fc.irf_sigma_ns = *f.irf_sigma_ns;
    if (f.irf_center_ns) fc.irf_center_ns = *f.irf_center_ns;
    if (f.window_start_ns) fc.fit_window_start_ns = *f.window_start_ns;
    if (f.period_ns) fc.pulse_period_ns = f.period_ns;
    if (f.g2_window_ns) fc.g2_window_ns = f.g2_window_ns;
    if (f.normalization_delay_ns) fc.normalization_delay_ns = f.normalization_delay_ns;

    const cf::CsvTable table = cf::read_csv_file(data_path);
    const cf::XYSeries data = cf::to_series(table);
    const std::string xu = cf::unit_of(data.x_label);
    const std::string yu = cf::unit_of(data.y_label);

    if (kind == "g2") {
        if (!fc.pulse_period_ns) {
            throw cf::InputError("g2 fit needs --period-ns (or fit.pulse_period_ns)");
        }
        const double window = fc.g2_window_ns ? *fc.g2_window_ns : 0.5 * *fc.pulse_period_ns;
        const auto g2 = cf::g2_pulse_areas(data, *fc.pulse_period_ns, window, fc.normalization_delay_ns);
        emit_json(c.output, cf::to_json(g2));
        return kExitOk;
    }

    cf::FitResult fit;
    if (kind == "voigt") {
        fit = cf::fit_voigt(data);
    } else if (kind == "lorentzian") {
        fit = cf::fit_lorentzian(data);
    } else if (kind == "gaussian") {
        fit = cf::fit_gaussian(data);
    } else if (kind == "lifetime") {
        cf::DecayHistogram h;
        h.time_ns = data.x;
        h.counts = data.y;
        h.irf_sigma_ns = fc.irf_sigma_ns;
        h.irf_center_ns = fc.irf_center_ns;
        h.fit_window_start_ns = fc.fit_window_start_ns;
        fit = cf::fit_lifetime(h);
    } else {
        throw cf::InputError("unknown fit kind '" + kind + "'");
    }
    for (const auto& w : fit.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    emit_json(c.output, cf::to_json(fit, xu, yu));
    return fit.converged ? kExitOk : kExitFit;
}

int run_design(const Common& c, const std::vector<std::string>& single, const std::string& pareto_path)
{
    const cf::RunConfig cfg = load(c);
    cf::EmitterSpec emitter = cfg.emitter ? *cfg.emitter : cf::EmitterSpec{};
    emitter.debye_waller = cfg.design.debye_waller;
    cf::SweepRanges ranges = cfg.design.ranges;

    if (!single.empty()) {
        auto kv = key_values(single);
        if (!kv.count("t_d_nm") || !kv.count("L_nm")) {
            throw cf::InputError("--single needs t_d_nm=... and L_nm=...");
        }
        ranges.t_d_nm = {to_number("t_d_nm", kv["t_d_nm"])};
        ranges.L_nm = {to_number("L_nm", kv["L_nm"])};
        kv.erase("t_d_nm");
        kv.erase("L_nm");
        if (kv.count("termination")) {
            ranges.terminations = {cf::termination_from_string(kv["termination"])};
            kv.erase("termination");
        }
        if (!kv.empty()) {
            throw cf::InputError("--single: unknown key '" + kv.begin()->first + "'");
        }
    }

    cf::SweepResult res;
    if (!single.empty() && ranges.terminations.size() > 1) {
        // No termination requested: evaluate the mirrors as configured.
        cf::DesignPoint p;
        p.t_d_nm = ranges.t_d_nm.front();
        p.L_nm = ranges.L_nm.front();
        res.emitter = emitter;
        res.settings = cfg.design.settings;
        res.points.push_back(cf::evaluate_design(p, emitter, cfg.design.settings));
        res.pareto = cf::pareto_front(res.points);
    } else {
        res = cf::sweep(ranges, emitter, cfg.design.settings, c.threads);
    }

    const std::string out = c.output.empty() ? cfg.output.path : c.output;
    emit(out, [&](std::ostream& os) { cf::write_design_csv(os, res.points); });
    std::string pareto = pareto_path;
    if (pareto.empty() && !out.empty() && out != "-") {
        pareto = std::filesystem::path(out).replace_extension(".pareto.json").string();
    }
    if (!pareto.empty()) {
        emit_json(pareto, cf::pareto_json(res));
    }
    return kExitOk;
}

struct SynthFlags
{
    std::uint64_t seed = 1;
    std::optional<double> noise;
    std::optional<double> tau_ns;
    std::optional<double> g2_zero;
};

int run_synth(const Common& c, const std::string& kind, const SynthFlags& f)
{
    cf::CsvTable table;
    if (kind == "voigt") {
        auto s = cf::synth_voigt(cf::linspace_series(-300.0, 300.0, 200).x, {0.0, 1.0, 30.0, 60.6, 0.01},
                                 f.noise.value_or(0.02), f.seed);
        s.x_label = "delta_l_pm";
        s.y_label = "transmission_arb";
        table = cf::from_series(s);
    } else if (kind == "lorentzian") {
        auto s = cf::synth_lorentzian(cf::linspace_series(-1.5, 1.5, 301).x, {0.0, 0.32, 69.8e6, 88.2e6},
                                      f.noise.value_or(0.003), f.seed);
        s.x_label = "delta_l_nm";
        s.y_label = "rate_per_s";
        table = cf::from_series(s);
    } else if (kind == "gaussian") {
        auto s = cf::synth_gaussian(cf::linspace_series(-1.6, 1.6, 161).x, {0.0, 0.80, 69.8e6, 88.2e6},
                                    f.noise.value_or(0.005), f.seed);
        s.x_label = "x_um";
        s.y_label = "rate_per_s";
        table = cf::from_series(s);
    } else if (kind == "lifetime") {
        cf::DecaySynthesis d;
        d.decay.tau_ns = f.tau_ns.value_or(12.6);
        const auto h = cf::synth_decay(d, f.seed);
        table.header = {"time_ns", "counts"};
        table.columns = {h.time_ns, h.counts};
    } else if (kind == "g2") {
        cf::G2Synthesis g;
        g.center_fraction = f.g2_zero.value_or(0.27);
        const auto s = cf::synth_g2(g, f.seed);
        table = cf::from_series(s);
    } else {
        throw cf::InputError("unknown synth kind '" + kind + "'");
    }
    emit(c.output, [&](std::ostream& os) { cf::write_csv(os, table); });
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Membrane microcavity optics, coupling and fit toolkit"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--threads", common.threads, "Worker threads (default: $CAVITYFORGE_THREADS or all cores)");

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        sub->add_option("-o,--output", common.output, "Output file (default stdout)");
        if (needs_config) {
            sub->add_option("-c,--config", common.config_path, "JSON run configuration");
            sub->add_flag("--paper-baseline", common.paper_baseline, "Use the built-in reference configuration");
        }
    };

    auto* disp = app.add_subcommand("dispersion", "Resonance branches lambda(L) as CSV");
    add_common(disp, true);
    std::optional<double> l_start, l_stop, l_step, lam_min, lam_max;
    std::optional<int> max_order;
    disp->add_option("--L-start-nm", l_start);
    disp->add_option("--L-stop-nm", l_stop);
    disp->add_option("--L-step-nm", l_step);
    disp->add_option("--lambda-min-nm", lam_min);
    disp->add_option("--lambda-max-nm", lam_max);
    disp->add_option("--max-transverse-order", max_order);

    auto* rep = app.add_subcommand("report", "Coupling report (JSON) at the ZPL resonance");
    add_common(rep, true);

    auto* prof = app.add_subcommand("profile", "Standing-wave field profile as CSV");
    add_common(prof, true);
    std::optional<double> prof_lambda;
    bool no_tune = false;
    prof->add_option("--wavelength-nm", prof_lambda);
    prof->add_flag("--no-tune", no_tune, "Keep the configured air gap");

    auto* fit = app.add_subcommand("fit", "Fit a CSV data set");
    add_common(fit, true);
    std::string fit_kind;
    std::string fit_data;
    FitFlags ff;
    fit->add_option("kind", fit_kind, "voigt | lorentzian | gaussian | lifetime | g2")
        ->required()
        ->check(CLI::IsMember({"voigt", "lorentzian", "gaussian", "lifetime", "g2"}));
    fit->add_option("data", fit_data, "CSV with a unit-labelled header")->required();
    fit->add_option("--irf-sigma-ns", ff.irf_sigma_ns);
    fit->add_option("--irf-center-ns", ff.irf_center_ns);
    fit->add_option("--window-start-ns", ff.window_start_ns);
    fit->add_option("--period-ns", ff.period_ns);
    fit->add_option("--g2-window-ns", ff.g2_window_ns);
    fit->add_option("--normalization-delay-ns", ff.normalization_delay_ns);

    auto* des = app.add_subcommand("design", "Evaluate or sweep cavity designs");
    add_common(des, true);
    std::vector<std::string> single;
    std::string pareto_path;
    des->add_option("--single", single, "One design: t_d_nm=.. L_nm=.. [termination=node|antinode]")
        ->expected(1, -1);
    des->add_option("--pareto", pareto_path, "Pareto summary JSON path");

    auto* syn = app.add_subcommand("synth", "Seeded synthetic data sets");
    add_common(syn, false);
    std::string synth_kind;
    SynthFlags sf;
    syn->add_option("kind", synth_kind, "voigt | lorentzian | gaussian | lifetime | g2")
        ->required()
        ->check(CLI::IsMember({"voigt", "lorentzian", "gaussian", "lifetime", "g2"}));
    syn->add_option("--seed", sf.seed)->required();
    syn->add_option("--noise-rel", sf.noise);
    syn->add_option("--tau-ns", sf.tau_ns);
    syn->add_option("--g2-zero", sf.g2_zero);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*disp) {
            return run_dispersion(common, l_start, l_stop, l_step, lam_min, lam_max, max_order);
        }
        if (*rep) {
            return run_report(common);
        }
        if (*prof) {
            return run_profile(common, prof_lambda, no_tune);
        }
        if (*fit) {
            return run_fit(common, fit_kind, fit_data, ff);
        }
        if (*des) {
            return run_design(common, single, pareto_path);
        }
        if (*syn) {
            return run_synth(common, synth_kind, sf);
        }
    } catch (const cf::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const cf::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitInput;
}
