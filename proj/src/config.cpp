#include "cavityforge/config.hpp"

#include <fstream>
#include <set>

#include "cavityforge/errors.hpp"

namespace cavityforge
{

using nlohmann::json;

namespace
{

// Tracks which keys of an object were read so leftovers can be rejected.
class Section
{
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw InputError(path_ + " must be a JSON object");
        }
    }

    ~Section() = default;
    Section(const Section&) = delete;
    Section& operator=(const Section&) = delete;

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const json& raw(const std::string& key)
    {
        used_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key)
    {
        require(key);
        const json& v = raw(key);
        if (!v.is_number()) {
            throw InputError(where(key) + " must be a number");
        }
        return v.get<double>();
    }

    void number(const std::string& key, double& target)
    {
        mark(key);
        if (has(key)) {
            target = number(key);
        }
    }

    void number(const std::string& key, std::optional<double>& target)
    {
        mark(key);
        if (has(key)) {
            target = number(key);
        }
    }

    void integer(const std::string& key, int& target)
    {
        mark(key);
        if (!has(key)) {
            return;
        }
        const json& v = raw(key);
        if (!v.is_number_integer()) {
            throw InputError(where(key) + " must be an integer");
        }
        target = v.get<int>();
    }

    void boolean(const std::string& key, bool& target)
    {
        mark(key);
        if (!has(key)) {
            return;
        }
        const json& v = raw(key);
        if (!v.is_boolean()) {
            throw InputError(where(key) + " must be true or false");
        }
        target = v.get<bool>();
    }

    void string(const std::string& key, std::string& target)
    {
        mark(key);
        if (!has(key)) {
            return;
        }
        const json& v = raw(key);
        if (!v.is_string()) {
            throw InputError(where(key) + " must be a string");
        }
        target = v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) {
            throw InputError(where(key) + " must be a non-empty array of numbers");
        }
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) {
                throw InputError(where(key) + " must contain numbers only");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    void require(const std::string& key) const
    {
        if (!has(key)) {
            throw InputError(where(key) + " is required");
        }
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

    void mark(const std::string& key) { used_.insert(key); }

    void finish() const
    {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) {
                throw InputError("unknown key " + where(key));
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

MirrorSpec mirror_from(const json& j, const std::string& path)
{
    Section s(j, path);
    MirrorSpec m;
    s.integer("pairs", m.pairs);
    s.number("center_wavelength_nm", m.center_wavelength_nm);
    s.number("n_high", m.n_high);
    s.number("n_low", m.n_low);
    s.boolean("terminal_high_index", m.terminal_high_index);
    s.number("substrate_index", m.substrate_index);
    s.number("lumped_loss", m.lumped_loss);
    s.number("extinction_high", m.extinction_high);
    s.number("extinction_low", m.extinction_low);
    s.finish();
    validate(m);
    return m;
}

json mirror_to(const MirrorSpec& m)
{
    return {{"pairs", m.pairs},
            {"center_wavelength_nm", m.center_wavelength_nm},
            {"n_high", m.n_high},
            {"n_low", m.n_low},
            {"terminal_high_index", m.terminal_high_index},
            {"substrate_index", m.substrate_index},
            {"lumped_loss", m.lumped_loss},
            {"extinction_high", m.extinction_high},
            {"extinction_low", m.extinction_low}};
}

CavityAssembly cavity_from(const json& j, const std::string& path)
{
    Section s(j, path);
    CavityAssembly c;
    s.require("bottom_mirror");
    s.require("top_mirror");
    s.require("diamond");
    s.require("air_gap");
    c.bottom_mirror = mirror_from(s.raw("bottom_mirror"), path + ".bottom_mirror");
    c.top_mirror = mirror_from(s.raw("top_mirror"), path + ".top_mirror");
    {
        Section d(s.raw("diamond"), path + ".diamond");
        double n = 2.41;
        double k = 0.0;
        d.number("index", n);
        d.number("extinction", k);
        c.diamond.index = {n, k};
        c.diamond.thickness_nm = d.number("t_d_nm");
        d.finish();
    }
    {
        Section a(s.raw("air_gap"), path + ".air_gap");
        double n = 1.0;
        a.number("index", n);
        c.air_gap.index = {n, 0.0};
        c.air_gap.thickness_nm = a.number("L_nm");
        a.finish();
    }
    c.curvature_radius_um = s.number("curvature_radius_um");
    s.number("waist_fwhm_override_um", c.waist_fwhm_override_um);
    s.finish();
    validate(c);
    return c;
}

EmitterSpec emitter_from(const json& j, const std::string& path)
{
    Section s(j, path);
    EmitterSpec e;
    s.number("zpl_wavelength_nm", e.zpl_wavelength_nm);
    s.number("bulk_lifetime_ns", e.bulk_lifetime_ns);
    s.number("host_index", e.host_index);
    s.number("debye_waller", e.debye_waller);
    s.number("depth_nm", e.depth_nm);
    s.number("dipole_orientation", e.dipole_orientation);
    s.finish();
    validate(e);
    return e;
}

std::vector<Termination> terminations_from(const json& v, const std::string& path)
{
    if (!v.is_array() || v.empty()) {
        throw InputError(path + " must be a non-empty array of \"node\"/\"antinode\"");
    }
    std::vector<Termination> out;
    for (const auto& e : v) {
        if (!e.is_string()) {
            throw InputError(path + " must contain strings");
        }
        out.push_back(termination_from_string(e.get<std::string>()));
    }
    return out;
}

} // namespace

json to_json(const CavityAssembly& c)
{
    json j = {{"bottom_mirror", mirror_to(c.bottom_mirror)},
              {"top_mirror", mirror_to(c.top_mirror)},
              {"diamond",
               {{"index", c.diamond.index.real()},
                {"extinction", c.diamond.index.imag()},
                {"t_d_nm", c.diamond.thickness_nm}}},
              {"air_gap", {{"index", c.air_gap.index.real()}, {"L_nm", c.air_gap.thickness_nm}}},
              {"curvature_radius_um", c.curvature_radius_um}};
    if (c.waist_fwhm_override_um) {
        j["waist_fwhm_override_um"] = *c.waist_fwhm_override_um;
    }
    return j;
}

CavityAssembly cavity_from_json(const json& j) { return cavity_from(j, "cavity"); }

json to_json(const EmitterSpec& e)
{
    return {{"zpl_wavelength_nm", e.zpl_wavelength_nm}, {"bulk_lifetime_ns", e.bulk_lifetime_ns},
            {"host_index", e.host_index},               {"debye_waller", e.debye_waller},
            {"depth_nm", e.depth_nm},                   {"dipole_orientation", e.dipole_orientation}};
}

EmitterSpec emitter_from_json(const json& j) { return emitter_from(j, "emitter"); }

RunConfig parse_config(const json& doc)
{
    Section root(doc, "config");
    RunConfig cfg;
    root.mark("cavity");
    if (root.has("cavity")) {
        cfg.cavity = cavity_from(root.raw("cavity"), "cavity");
    }
    root.mark("emitter");
    if (root.has("emitter")) {
        cfg.emitter = emitter_from(root.raw("emitter"), "emitter");
    }
    root.mark("constants");
    if (root.has("constants")) {
        Section s(root.raw("constants"), "constants");
        s.number("c_m_per_s", cfg.constants.c);
        s.number("hbar_J_s", cfg.constants.hbar);
        s.number("eps0_F_per_m", cfg.constants.eps0);
        s.number("e_charge_C", cfg.constants.e_charge);
        s.finish();
        validate(cfg.constants);
    }
    root.mark("dispersion");
    if (root.has("dispersion")) {
        Section s(root.raw("dispersion"), "dispersion");
        auto& d = cfg.dispersion;
        s.number("L_start_nm", d.lengths.start_nm);
        s.number("L_stop_nm", d.lengths.stop_nm);
        s.number("L_step_nm", d.lengths.step_nm);
        s.number("lambda_min_nm", d.window.lower_nm);
        s.number("lambda_max_nm", d.window.upper_nm);
        s.integer("max_transverse_order", d.max_transverse_order);
        s.finish();
        d.lengths.values();
        if (d.max_transverse_order < 0) {
            throw InputError("dispersion.max_transverse_order must be >= 0");
        }
    }
    root.mark("measurement");
    if (root.has("measurement")) {
        Section s(root.raw("measurement"), "measurement");
        auto& m = cfg.measurement;
        s.number("linewidth_length_pm", m.length_linewidth_pm);
        s.number("dlambda_dL", m.slope);
        s.number("gamma_on_per_s", m.gamma_on_per_s);
        s.number("gamma_off_per_s", m.gamma_off_per_s);
        s.number("gamma_bulk_per_s", m.gamma_bulk_per_s);
        s.finish();
    }
    root.mark("design");
    if (root.has("design")) {
        Section s(root.raw("design"), "design");
        auto& d = cfg.design;
        s.mark("t_d_nm");
        if (s.has("t_d_nm")) {
            d.ranges.t_d_nm = s.numbers("t_d_nm");
        }
        s.mark("L_nm");
        if (s.has("L_nm")) {
            d.ranges.L_nm = s.numbers("L_nm");
        }
        s.mark("terminations");
        if (s.has("terminations")) {
            d.ranges.terminations = terminations_from(s.raw("terminations"), "design.terminations");
        }
        s.mark("bottom_mirror");
        if (s.has("bottom_mirror")) {
            d.settings.bottom_mirror = mirror_from(s.raw("bottom_mirror"), "design.bottom_mirror");
        }
        s.mark("top_mirror");
        if (s.has("top_mirror")) {
            d.settings.top_mirror = mirror_from(s.raw("top_mirror"), "design.top_mirror");
        }
        s.number("curvature_radius_um", d.settings.curvature_radius_um);
        s.number("waist_fwhm_override_um", d.settings.waist_fwhm_override_um);
        s.number("diamond_index", d.settings.diamond_index);
        s.number("kappa_loss_per_s", d.settings.kappa_loss_per_s);
        std::string choice = "two_g";
        s.string("kappa_choice", choice);
        if (choice == "two_g") {
            d.settings.kappa_choice = KappaChoice::two_g;
        } else if (choice == "numeric") {
            d.settings.kappa_choice = KappaChoice::numeric;
        } else {
            throw InputError("design.kappa_choice must be \"two_g\" or \"numeric\"");
        }
        s.number("debye_waller", d.debye_waller);
        s.finish();
        if (!(d.debye_waller > 0.0 && d.debye_waller < 1.0)) {
            throw InputError("design.debye_waller must lie in (0, 1)");
        }
    }
    root.mark("fit");
    if (root.has("fit")) {
        Section s(root.raw("fit"), "fit");
        auto& f = cfg.fit;
        s.number("irf_sigma_ns", f.irf_sigma_ns);
        s.number("irf_center_ns", f.irf_center_ns);
        s.number("fit_window_start_ns", f.fit_window_start_ns);
        s.number("pulse_period_ns", f.pulse_period_ns);
        s.number("g2_window_ns", f.g2_window_ns);
        s.number("normalization_delay_ns", f.normalization_delay_ns);
        s.finish();
    }
    root.mark("output");
    if (root.has("output")) {
        Section s(root.raw("output"), "output");
        s.string("path", cfg.output.path);
        s.finish();
    }
    root.finish();
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open config '" + path + "'");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw InputError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunConfig& cfg)
{
    json j = json::object();
    if (cfg.cavity) {
        j["cavity"] = to_json(*cfg.cavity);
    }
    if (cfg.emitter) {
        j["emitter"] = to_json(*cfg.emitter);
    }
    j["constants"] = {{"c_m_per_s", cfg.constants.c},
                      {"hbar_J_s", cfg.constants.hbar},
                      {"eps0_F_per_m", cfg.constants.eps0},
                      {"e_charge_C", cfg.constants.e_charge}};
    const auto& d = cfg.dispersion;
    j["dispersion"] = {{"L_start_nm", d.lengths.start_nm},      {"L_stop_nm", d.lengths.stop_nm},
                       {"L_step_nm", d.lengths.step_nm},        {"lambda_min_nm", d.window.lower_nm},
                       {"lambda_max_nm", d.window.upper_nm},    {"max_transverse_order", d.max_transverse_order}};
    json m = json::object();
    const auto put = [](json& o, const char* k, const std::optional<double>& v) {
        if (v) {
            o[k] = *v;
        }
    };
    put(m, "linewidth_length_pm", cfg.measurement.length_linewidth_pm);
    put(m, "dlambda_dL", cfg.measurement.slope);
    put(m, "gamma_on_per_s", cfg.measurement.gamma_on_per_s);
    put(m, "gamma_off_per_s", cfg.measurement.gamma_off_per_s);
    put(m, "gamma_bulk_per_s", cfg.measurement.gamma_bulk_per_s);
    j["measurement"] = m;

    const auto& ds = cfg.design;
    json terms = json::array();
    for (auto t : ds.ranges.terminations) {
        terms.push_back(to_string(t));
    }
    j["design"] = {{"t_d_nm", ds.ranges.t_d_nm},
                   {"L_nm", ds.ranges.L_nm},
                   {"terminations", terms},
                   {"bottom_mirror", mirror_to(ds.settings.bottom_mirror)},
                   {"top_mirror", mirror_to(ds.settings.top_mirror)},
                   {"curvature_radius_um", ds.settings.curvature_radius_um},
                   {"diamond_index", ds.settings.diamond_index},
                   {"kappa_loss_per_s", ds.settings.kappa_loss_per_s},
                   {"kappa_choice", ds.settings.kappa_choice == KappaChoice::two_g ? "two_g" : "numeric"},
                   {"debye_waller", ds.debye_waller}};
    if (ds.settings.waist_fwhm_override_um) {
        j["design"]["waist_fwhm_override_um"] = *ds.settings.waist_fwhm_override_um;
    }
    json f = {{"irf_sigma_ns", cfg.fit.irf_sigma_ns},
              {"irf_center_ns", cfg.fit.irf_center_ns},
              {"fit_window_start_ns", cfg.fit.fit_window_start_ns}};
    put(f, "pulse_period_ns", cfg.fit.pulse_period_ns);
    put(f, "g2_window_ns", cfg.fit.g2_window_ns);
    put(f, "normalization_delay_ns", cfg.fit.normalization_delay_ns);
    j["fit"] = f;
    if (!cfg.output.path.empty()) {
        j["output"] = {{"path", cfg.output.path}};
    }
    return j;
}

RunConfig reference_config()
{
    RunConfig cfg;
    cfg.cavity = reference_cavity();
    cfg.emitter = EmitterSpec{};
    cfg.measurement.length_linewidth_pm = 60.6;
    cfg.measurement.slope = 0.18;
    cfg.measurement.gamma_on_per_s = 158e6;
    cfg.measurement.gamma_off_per_s = 88.2e6;
    cfg.measurement.gamma_bulk_per_s = 79.4e6;
    return cfg;
}

} // namespace cavityforge
