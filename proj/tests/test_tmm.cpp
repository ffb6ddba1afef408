#include <doctest.h>

#include <cmath>
#include <random>

#include "cavityforge/constants.hpp"
#include "cavityforge/errors.hpp"
#include "cavityforge/stack.hpp"
#include "cavityforge/tmm.hpp"

using namespace cavityforge;

namespace
{

std::vector<Layer> random_stack(std::mt19937_64& rng, bool lossy = false)
{
    std::uniform_int_distribution<int> count(1, 12);
    std::uniform_real_distribution<double> n(1.0, 2.5);
    std::uniform_real_distribution<double> d(10.0, 500.0);
    std::uniform_real_distribution<double> k(0.0, 0.05);
    std::vector<Layer> out(static_cast<std::size_t>(count(rng)));
    for (auto& l : out) {
        l.name = "x";
        l.index = {n(rng), lossy ? k(rng) : 0.0};
        l.thickness_nm = d(rng);
    }
    return out;
}

// Airy sum for one slab between two half spaces; independent of the matrix code.
Complex airy_r(Complex n1, Complex n2, Complex n3, double d_nm, double lambda_nm)
{
    const Complex r12 = (n1 - n2) / (n1 + n2);
    const Complex r23 = (n2 - n3) / (n2 + n3);
    const Complex ph = std::exp(Complex(0.0, 2.0) * (2.0 * kPi * n2 * d_nm / lambda_nm));
    return (r12 + r23 * ph) / (1.0 + r12 * r23 * ph);
}

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

} // namespace

TEST_CASE("dbr layers are quarter wave")
{
    MirrorSpec m;
    m.center_wavelength_nm = 700.0;
    m.pairs = 7;
    const auto layers = build_dbr(m);
    REQUIRE(layers.size() == 14);
    CHECK(layers.front().index.real() == doctest::Approx(2.06));
    for (const auto& l : layers) {
        CHECK(std::abs(l.index.real() * l.thickness_nm / 175.0 - 1.0) < 1e-12);
    }
    m.terminal_high_index = false;
    CHECK(build_dbr(m).front().index.real() == doctest::Approx(1.46));
}

TEST_CASE("mirror validation")
{
    MirrorSpec m;
    m.pairs = 0;
    CHECK_THROWS_AS(build_dbr(m), InputError);
    m = {};
    m.n_low = m.n_high;
    CHECK_THROWS_AS(build_dbr(m), InputError);
    m = {};
    m.lumped_loss = 1.5;
    CHECK_THROWS_AS(validate(m), InputError);
    Layer bad{"b", {0.5, 0.0}, 10.0};
    CHECK_THROWS_AS(validate(bad), InputError);
    bad = {"b", {1.5, -0.1}, 10.0};
    CHECK_THROWS_AS(validate(bad), InputError);
}

TEST_CASE("stopband edges bracket the center and the mirror reflects inside")
{
    MirrorSpec m;
    const auto sb = stopband(m);
    CHECK(sb.lower_nm < 637.0);
    CHECK(sb.upper_nm > 637.0);
    const auto layers = build_dbr(m);
    const auto center = stack_response(layers, 1.0, m.substrate_index, 637.0);
    CHECK(center.reflectance > 0.9999);
    const auto outside = stack_response(layers, 1.0, m.substrate_index, sb.upper_nm * 1.15);
    CHECK(outside.reflectance < 0.5);
}

TEST_CASE("single interface and single slab against closed forms")
{
    // An index-matched layer only moves the reference plane.
    const auto bare = stack_response(std::vector<Layer>{{"a", {1.0, 0.0}, 100.0}}, 1.0, 1.5, 600.0);
    const double delta = 2.0 * kPi * 100.0 / 600.0;
    CHECK(close(bare.r, -0.2 * std::exp(Complex(0.0, 2.0 * delta)), 1e-12));
    CHECK(bare.reflectance == doctest::Approx(0.04).epsilon(1e-12));

    // Quarter-wave antireflection layer.
    const double nar = std::sqrt(1.5);
    const auto ar = stack_response(std::vector<Layer>{{"ar", {nar, 0.0}, 600.0 / (4.0 * nar)}}, 1.0, 1.5, 600.0);
    CHECK(ar.reflectance < 1e-20);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Complex n2{1.0 + 2.0 * u(rng), 0.1 * u(rng)};
        const Complex n3{1.0 + u(rng), 0.0};
        const double d = 10.0 + 500.0 * u(rng);
        const double lam = 400.0 + 400.0 * u(rng);
        const auto resp = stack_response(std::vector<Layer>{{"s", n2, d}}, 1.0, n3, lam);
        CHECK(close(resp.r, airy_r(1.0, n2, n3, d, lam), 1e-12));
    }
}

TEST_CASE("lossless stacks conserve energy, are reciprocal and unimodular")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lam(400.0, 900.0);
    std::uniform_real_distribution<double> sub(1.0, 2.0);
    double worst_energy = 0.0;
    double worst_recip = 0.0;
    double worst_det = 0.0;
    for (int i = 0; i < 10000; ++i) {
        auto layers = random_stack(rng);
        const double l = lam(rng);
        const double n_in = sub(rng);
        const double n_out = sub(rng);
        const auto fwd = stack_response(layers, n_in, n_out, l);
        std::vector<Layer> rev(layers.rbegin(), layers.rend());
        const auto bwd = stack_response(rev, n_out, n_in, l);
        worst_energy = std::max(worst_energy, std::abs(fwd.reflectance + fwd.transmittance - 1.0));
        worst_recip = std::max(worst_recip, std::abs(fwd.transmittance - bwd.transmittance));
        worst_det = std::max(worst_det, std::abs(stack_matrix(layers, l).determinant() - 1.0));
    }
    CHECK(worst_energy < 1e-10);
    CHECK(worst_recip < 1e-10);
    CHECK(worst_det < 1e-10);
}

TEST_CASE("absorbing stacks lose energy")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        auto layers = random_stack(rng, true);
        const auto r = stack_response(layers, 1.0, 1.46, 637.0);
        CHECK(r.reflectance + r.transmittance <= 1.0 + 1e-12);
        CHECK(r.reflectance >= 0.0);
        CHECK(r.transmittance >= 0.0);
    }
}

TEST_CASE("layer matrices compose")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Complex n{1.0 + 1.5 * u(rng), 0.02 * u(rng)};
        const double d1 = 10.0 + 300.0 * u(rng);
        const double d2 = 10.0 + 300.0 * u(rng);
        const double l = 400.0 + 500.0 * u(rng);
        const auto whole = characteristic_matrix(n, d1 + d2, l);
        const auto prod = characteristic_matrix(n, d1, l) * characteristic_matrix(n, d2, l);
        CHECK(close(whole.m11, prod.m11, 1e-12));
        CHECK(close(whole.m12, prod.m12, 1e-12));
        CHECK(close(whole.m21, prod.m21, 1e-12));
        CHECK(close(whole.m22, prod.m22, 1e-12));
    }
}

TEST_CASE("mirror lumped loss is realized as absorption")
{
    MirrorSpec m;
    m.lumped_loss = 2e-5;
    const double k = extinction_for_lumped_loss(m);
    CHECK(k > 0.0);
    const auto resp = stack_response(build_dbr(m), 1.0, m.substrate_index, m.center_wavelength_nm);
    CHECK(1.0 - resp.reflectance - resp.transmittance == doctest::Approx(2e-5).epsilon(1e-6));
}

TEST_CASE("bare air cavity resonates at 2L/q")
{
    CavityAssembly c = reference_cavity();
    c.diamond.thickness_nm = 0.0;
    c.air_gap.thickness_nm = 6.0 * 637.0 / 2.0;
    const auto found = find_resonances(c, {630.0, 644.0});
    REQUIRE(found.resonances.size() == 1);
    CHECK(std::abs(found.resonances[0].wavelength_nm - 637.0) < 2e-6);
    CHECK(found.resonances[0].peak_transmission > 0.5);
    CHECK(std::abs(tune_air_gap(c, 637.0, 1900.0) - 3.0 * 637.0) < 1e-6);
    // Phase-condition slope against a spectral finite difference.
    auto peak_at = [&](double L) {
        const auto r = find_resonances(c.with_air_gap(L), {630.0, 644.0});
        REQUIRE(r.resonances.size() == 1);
        return r.resonances[0].wavelength_nm;
    };
    const double fd = (peak_at(1912.0) - peak_at(1910.0)) / 2.0;
    CHECK(resonance_slope(c, 637.0, 1911.0) == doctest::Approx(fd).epsilon(1e-4));
    CHECK(fd < 637.0 / 1911.0);
}

TEST_CASE("resonance search respects the stopband")
{
    const CavityAssembly c = reference_cavity();
    CHECK_THROWS_AS(find_resonances(c, {500.0, 700.0}), InputError);
    const auto found = find_resonances(c, {600.0, 700.0});
    REQUIRE(found.resonances.size() >= 2);
    for (const auto& r : found.resonances) {
        CHECK(r.linewidth_nm > 0.0);
        CHECK(r.q_factor == doctest::Approx(r.wavelength_nm / r.linewidth_nm));
        const double t = cavity_response(c, r.wavelength_nm).transmittance;
        CHECK(t >= cavity_response(c, r.wavelength_nm + 1e-4).transmittance);
        CHECK(t >= cavity_response(c, r.wavelength_nm - 1e-4).transmittance);
    }
}

TEST_CASE("cold Q agrees with the length-scan finesse route")
{
    CavityAssembly c = reference_cavity();
    c = c.with_air_gap(tune_air_gap(c, 637.0, 1960.0));
    const auto found = find_resonances(c, {636.5, 637.5});
    REQUIRE(found.resonances.size() == 1);
    const double slope = resonance_slope(c, 637.0, c.air_gap_nm());
    const double gamma_l = length_scan_linewidth(c, 637.0);
    const double q_finesse = 637.0 / (gamma_l * slope);
    CHECK(found.resonances[0].q_factor == doctest::Approx(q_finesse).epsilon(0.01));
}

TEST_CASE("tuning puts a transmission peak at the target wavelength")
{
    const CavityAssembly c = reference_cavity();
    const double L = tune_air_gap(c, 637.0, 1960.0);
    CHECK(std::abs(L - 1960.0) < 637.0 / 2.0);
    const auto tuned = c.with_air_gap(L);
    const auto found = find_resonances(tuned, {636.9, 637.1});
    REQUIRE(found.resonances.size() == 1);
    CHECK(std::abs(found.resonances[0].wavelength_nm - 637.0) < 1e-5);
}

TEST_CASE("dispersion branches survive grid halving")
{
    const CavityAssembly c = reference_cavity();
    const WavelengthWindow w{620.0, 660.0};
    DispersionOptions opt;
    opt.threads = 2;
    const auto coarse = dispersion_map(c, {1900.0, 2000.0, 4.0}, w, opt);
    const auto fine = dispersion_map(c, {1900.0, 2000.0, 2.0}, w, opt);
    REQUIRE(!coarse.branches.empty());
    int compared = 0;
    for (const auto& b : coarse.branches) {
        for (const auto& s : b.samples) {
            double best = 1e9;
            for (const auto& fb : fine.branches) {
                for (const auto& fs : fb.samples) {
                    if (std::abs(fs.air_gap_nm - s.air_gap_nm) < 1e-9) {
                        best = std::min(best, std::abs(fs.wavelength_nm - s.wavelength_nm));
                    }
                }
            }
            CHECK(best < 1e-4);
            ++compared;
        }
    }
    CHECK(compared > 20);
}

TEST_CASE("dispersion map is independent of the worker count")
{
    const CavityAssembly c = reference_cavity();
    DispersionOptions one;
    one.threads = 1;
    DispersionOptions many;
    many.threads = 4;
    const auto a = dispersion_map(c, {1900.0, 1960.0, 3.0}, {610.0, 680.0}, one);
    const auto b = dispersion_map(c, {1900.0, 1960.0, 3.0}, {610.0, 680.0}, many);
    REQUIRE(a.branches.size() == b.branches.size());
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        REQUIRE(a.branches[i].samples.size() == b.branches[i].samples.size());
        for (std::size_t j = 0; j < a.branches[i].samples.size(); ++j) {
            CHECK(a.branches[i].samples[j].wavelength_nm == b.branches[i].samples[j].wavelength_nm);
            CHECK(a.branches[i].samples[j].slope == b.branches[i].samples[j].slope);
        }
    }
}

TEST_CASE("air-like and diamond-like branches have different slopes")
{
    const auto map = dispersion_map(reference_cavity(), {1900.0, 2000.0, 5.0}, {600.0, 700.0});
    bool air = false;
    bool diamond = false;
    for (const auto& b : map.branches) {
        for (const auto& s : b.samples) {
            if (s.character == ModeCharacter::air_like) {
                air = true;
                CHECK(s.slope > 0.15);
            }
            if (s.character == ModeCharacter::diamond_like) {
                diamond = true;
                CHECK(s.slope < 0.12);
            }
        }
    }
    CHECK(air);
    CHECK(diamond);
}

TEST_CASE("field profile of a resonance")
{
    CavityAssembly c = reference_cavity();
    c = c.with_air_gap(tune_air_gap(c, 637.0, 1960.0));
    const auto p = field_profile(c, 637.0);
    CHECK(p.global_max().amplitude == doctest::Approx(1.0));
    CHECK(p.samples.size() >= 2000);
    CHECK(p.total_length_nm() == doctest::Approx(c.air_end_nm() + 14 * (637.0 / 4 / 2.06 + 637.0 / 4 / 1.46)));

    // Tangential E is continuous at every interface.
    for (std::size_t j = 1; j < p.segments.size(); ++j) {
        const double z = p.segments[j].z_start_nm;
        CHECK(std::abs(p.field_at(z - 1e-9) - p.field_at(z + 1e-9)) < 1e-6);
    }
    // Nodes are local minima of |E|, antinodes local maxima.
    auto interior = [&](double z) {
        const auto& s = p.segments[static_cast<std::size_t>(p.segment_at(z))];
        return z - s.z_start_nm > 0.5 && s.z_start_nm + s.thickness_nm - z > 0.5;
    };
    for (double z : p.node_positions_nm) {
        if (interior(z)) {
            CHECK(p.amplitude_at(z) <= p.amplitude_at(z + 0.3) + 1e-12);
            CHECK(p.amplitude_at(z) <= p.amplitude_at(z - 0.3) + 1e-12);
        }
    }
    for (double z : p.antinode_positions_nm) {
        if (interior(z)) {
            CHECK(p.amplitude_at(z) >= p.amplitude_at(z + 0.3) - 1e-12);
            CHECK(p.amplitude_at(z) >= p.amplitude_at(z - 0.3) - 1e-12);
        }
    }
    CHECK(p.max_in("air").amplitude > p.max_in("diamond").amplitude);
    CHECK_THROWS_AS(field_profile(c, 640.0), InputError);
    CHECK_THROWS_AS(p.max_in("nothing"), InputError);
}

TEST_CASE("interface classification on a bare-cavity standing wave")
{
    // Seen from air, a high-index terminated mirror reflects with r = -1
    // (node) and a low-index terminated one with r = +1 (antinode).
    CavityAssembly c = reference_cavity();
    c.diamond.thickness_nm = 0.0;
    c.bottom_mirror.terminal_high_index = false;
    c = c.with_air_gap(tune_air_gap(c, 637.0, 3.0 * 637.0));
    const double halves = c.air_gap_nm() / (637.0 / 2.0) - 0.5;
    CHECK(std::abs(halves - std::round(halves)) < 1e-8);
    const auto p = field_profile(c, 637.0);
    const auto top = classify_interface(p, c.air_end_nm(), 637.0 / 40.0);
    CHECK(top.kind == InterfaceKind::node);
    CHECK(top.distance_to_node_nm < 1e-6);
    const auto bottom = classify_interface(p, c.diamond_start_nm(), 637.0 / 40.0);
    CHECK(bottom.kind == InterfaceKind::antinode);
    CHECK(bottom.relative_amplitude == doctest::Approx(p.max_in("air").amplitude).epsilon(1e-6));
}
