#include <doctest.h>

#include <cmath>

#include "cavityforge/constants.hpp"
#include "cavityforge/errors.hpp"
#include "cavityforge/gaussian_modes.hpp"
#include "cavityforge/tmm.hpp"

using namespace cavityforge;

namespace
{

// Composite Simpson over each segment; avoids the analytic integral used by
// the library.
double simpson_energy(const FieldProfile& p, double scale)
{
    double sum = 0.0;
    for (const auto& s : p.segments) {
        const int n = 400;
        const double h = s.thickness_nm / n;
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double z = s.z_start_nm + std::min(i * h, s.thickness_nm * (1.0 - 1e-15));
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double e = scale * std::abs(p.field_at(z));
            acc += w * (s.index * s.index).real() * e * e;
        }
        sum += acc * h / 3.0;
    }
    return sum;
}

} // namespace

TEST_CASE("waist and fwhm conversions")
{
    CHECK(fwhm_from_waist(1.0) == doctest::Approx(std::sqrt(2.0 * std::log(2.0))));
    CHECK(waist_from_fwhm(fwhm_from_waist(0.7)) == doctest::Approx(0.7));
    CHECK(effective_area_um2(2.0) == doctest::Approx(2.0 * kPi));
}

TEST_CASE("plano-concave waist")
{
    const auto m = beam_waist(16.0, 2.73, 637.0);
    const double expect = std::sqrt(0.637 / kPi * std::sqrt(2.73 * (16.0 - 2.73)));
    CHECK(m.waist_um == doctest::Approx(expect).epsilon(1e-12));
    CHECK(m.source == WaistSource::formula);
    CHECK_THROWS_AS(beam_waist(5.0, 5.0, 637.0), DomainError);
    CHECK_THROWS_AS(beam_waist(5.0, 6.0, 637.0), DomainError);

    // Symmetric in Lg <-> R - Lg.
    CHECK(beam_waist(10.0, 3.0, 637.0).waist_um == doctest::Approx(beam_waist(10.0, 7.0, 637.0).waist_um));
}

TEST_CASE("override wins over the formula")
{
    const CavityAssembly c = reference_cavity();
    const auto m = beam_waist(c, 637.0);
    CHECK(m.source == WaistSource::override_fwhm);
    CHECK(m.fwhm_um == doctest::Approx(0.83));
    CavityAssembly plain = c;
    plain.waist_fwhm_override_um.reset();
    CHECK(beam_waist(plain, 637.0).source == WaistSource::formula);
}

TEST_CASE("gouy offsets")
{
    const double R = 16.0;
    const double Lg = 2.73;
    const auto off = transverse_offsets(R, Lg, 637.0, 3);
    REQUIRE(off.size() == 4);
    CHECK(off[0] == 0.0);
    const double one = 637.0 / (2.0 * kPi) * std::acos(std::sqrt(1.0 - Lg / R));
    for (int k = 1; k <= 3; ++k) {
        CHECK(off[static_cast<std::size_t>(k)] == doctest::Approx(k * one).epsilon(1e-12));
    }
    CHECK(gouy_phase(R, Lg) > 0.0);
    CHECK(gouy_phase(R, Lg) < kPi / 2.0);
    CHECK(wavelength_offset(10.0, 0.2) == doctest::Approx(-2.0));
}

TEST_CASE("ideal sine mode has the closed-form vacuum field")
{
    FieldProfile p;
    p.resonant_wavelength_nm = 637.0;
    const double L = 5.0 * 637.0 / 2.0;
    // sin(kx) = (e^{ikx} - e^{-ikx}) / 2i
    p.segments.push_back({"air", {1.0, 0.0}, 0.0, L, Complex(0.0, -0.5), Complex(0.0, 0.5)});
    const double area = 1.7;
    const auto rep = vacuum_field(p, area, "air");
    const double omega = kCodata2018.angular_frequency(637.0);
    const double expect = std::sqrt(kCodata2018.hbar * omega / (kCodata2018.eps0 * area * 1e-12 * L * 1e-9));
    CHECK(std::abs(rep.evac_region_V_per_m / expect - 1.0) < 1e-6);
    CHECK(rep.longitudinal_integral_nm == doctest::Approx(L / 2.0).epsilon(1e-12));
    CHECK(rep.volume_um3 == doctest::Approx(area * L * 1e-3 / 2.0).epsilon(1e-12));
}

TEST_CASE("vacuum field normalization integrates to half a photon")
{
    CavityAssembly c = reference_cavity();
    c = c.with_air_gap(tune_air_gap(c, 637.0, 1960.0));
    const auto p = field_profile(c, 637.0);
    const double area = effective_area(beam_waist(c, 637.0));
    const auto rep = vacuum_field(p, area);
    const double integral_m = simpson_energy(p, rep.field_scale_V_per_m) * 1e-9;
    const double energy = kCodata2018.eps0 * integral_m * area * 1e-12;
    const double half_photon = kCodata2018.hbar * kCodata2018.angular_frequency(637.0) / 2.0;
    CHECK(std::abs(energy / half_photon - 1.0) < 1e-6);
    CHECK(rep.evac_global_V_per_m >= rep.evac_region_V_per_m);
    CHECK(rep.evac_at(p, rep.z_region_max_nm) == doctest::Approx(rep.evac_region_V_per_m));
    CHECK_THROWS_AS(vacuum_field(p, 0.0), InputError);
}

TEST_CASE("vacuum field scales as one over root area")
{
    CavityAssembly c = reference_cavity();
    c = c.with_air_gap(tune_air_gap(c, 637.0, 1960.0));
    const auto p = field_profile(c, 637.0);
    const double e1 = vacuum_field(p, 1.0).evac_region_V_per_m;
    const double e4 = vacuum_field(p, 4.0).evac_region_V_per_m;
    CHECK(e1 / e4 == doctest::Approx(2.0).epsilon(1e-12));
}
