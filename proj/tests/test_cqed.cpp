#include <doctest.h>

#include <cmath>
#include <random>

#include "cavityforge/constants.hpp"
#include "cavityforge/cqed.hpp"
#include "cavityforge/errors.hpp"

using namespace cavityforge;

TEST_CASE("dipole inverts the bulk decay rate")
{
    const auto& k = kCodata2018;
    const double gamma = 1.0 / 12.6e-9;
    const double d = dipole_from_lifetime(gamma, 637.0, 2.41);
    const double omega = k.angular_frequency(637.0);
    const double back = 2.41 * std::pow(omega, 3) * d * d / (3.0 * kPi * k.eps0 * k.hbar * std::pow(k.c, 3));
    CHECK(back == doctest::Approx(gamma).epsilon(1e-12));
    CHECK(d / k.e_charge * 1e9 == doctest::Approx(0.108).epsilon(0.01));
    CHECK_THROWS_AS(dipole_from_lifetime(-1.0, 637.0, 2.41), InputError);
}

TEST_CASE("coupling rate")
{
    const double d = 0.108e-9 * kCodata2018.e_charge;
    const double g = coupling_rate(d, 36.2e3);
    CHECK(g == doctest::Approx(5.97e9).epsilon(0.02));
    CHECK(coupling_rate(d, 36.2e3, 0.5) == doctest::Approx(g / 2.0));
}

TEST_CASE("linewidth conversions")
{
    const auto lc = linewidth_conversions(60.6, 0.18, 637.0);
    CHECK(lc.wavelength_linewidth_pm == doctest::Approx(60.6 * 0.18));
    CHECK(lc.q == doctest::Approx(58400.0).epsilon(200.0 / 58400.0));
    CHECK(lc.finesse == doctest::Approx(5255.0).epsilon(10.0 / 5255.0));
    CHECK(lc.frequency_linewidth_hz == doctest::Approx(8.0e9).epsilon(0.01));
    CHECK(lc.kappa_per_s == doctest::Approx(5.06e10).epsilon(0.01));
    CHECK(std::abs(lc.kappa_per_s / lc.kappa_from_q_per_s - 1.0) < 1e-10);
    CHECK_THROWS_AS(linewidth_conversions(0.0, 0.18, 637.0), InputError);
}

TEST_CASE("kappa routes agree for random inputs")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const auto lc = linewidth_conversions(1.0 + 200.0 * u(rng), 0.05 + u(rng), 500.0 + 300.0 * u(rng));
        CHECK(std::abs(lc.kappa_per_s / lc.kappa_from_q_per_s - 1.0) < 1e-10);
        CHECK(std::abs(lc.q - lc.finesse * 2.0 * lc.length_linewidth_pm / lc.wavelength_linewidth_pm) < 1e-6 * lc.q);
    }
}

TEST_CASE("purcell and eta")
{
    bool weak = false;
    const double f = purcell_zpl_theory(5.97e9, 5.06e10, 79.4e6, &weak);
    CHECK(f == doctest::Approx(4.0 * 5.97e9 * 5.97e9 / (5.06e10 * 79.4e6)));
    CHECK(f == doctest::Approx(35.5).epsilon(0.01));
    CHECK(weak);
    purcell_zpl_theory(5e10, 5e9, 1e8, &weak);
    CHECK_FALSE(weak);
    CHECK(eta_zpl(10.0, 1.0, 10.0) == doctest::Approx(0.5));
    CHECK(eta_zpl(0.0, 1.0, 10.0) == 0.0);
}

TEST_CASE("rates algebra")
{
    RatesMeasurement m{158e6, 88.2e6, 79.4e6, 0.024};
    auto r = rates_algebra(m);
    CHECK(r.gamma0_per_s == doctest::Approx(0.024 * 79.4e6));
    CHECK(r.purcell_zpl == doctest::Approx(37.7).epsilon(0.005));
    CHECK(r.eta_zpl == doctest::Approx(0.454).epsilon(0.002 / 0.454));
    CHECK(r.purcell_total == doctest::Approx(2.0).epsilon(0.01));
    m.debye_waller = 0.05;
    r = rates_algebra(m);
    CHECK(r.purcell_zpl == doctest::Approx(18.6).epsilon(0.005));
    CHECK(r.eta_zpl == doctest::Approx(0.467).epsilon(0.002 / 0.467));

    m.gamma_off_per_s = -1.0;
    CHECK_THROWS_AS(rates_algebra(m), InputError);
}

TEST_CASE("debye waller inversion round trip")
{
    const auto inv = debye_waller_inversion(158e6, 88.2e6, 79.4e6, 35.5);
    CHECK(inv.debye_waller == doctest::Approx(0.0255).epsilon(0.0005 / 0.0255));
    CHECK_FALSE(inv.degenerate);
    const auto back = rates_algebra({158e6, 88.2e6, 79.4e6, inv.debye_waller});
    CHECK(std::abs(back.purcell_zpl - 35.5) < 1e-10 * 35.5);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double bulk = 50e6 + 50e6 * u(rng);
        const double off = bulk * (0.9 + 0.2 * u(rng));
        const double on = off + bulk * u(rng);
        const double F = 2.0 + 500.0 * u(rng);
        const auto d = debye_waller_inversion(on, off, bulk, F);
        const auto rr = rates_algebra({on, off, bulk, d.debye_waller});
        CHECK(std::abs(rr.purcell_zpl / F - 1.0) < 1e-10);
    }
    CHECK(debye_waller_inversion(80e6, 88e6, 79.4e6, 35.5).degenerate);
    CHECK_THROWS_AS(debye_waller_inversion(158e6, 88.2e6, 79.4e6, 1.0), InputError);
}

TEST_CASE("transform limit and required Q")
{
    CHECK(transform_limit_hz(527.0, 2.02e6, 77.4e6) == doctest::Approx(182e6).epsilon(0.03));
    CHECK(transform_limit_hz(356.0, 2.02e6, 77.4e6) == doctest::Approx(127e6).epsilon(0.03));
    const double omega = kCodata2018.angular_frequency(637.0);
    CHECK(required_q(1e10, 637.0) == doctest::Approx(omega / 1e10));
    CHECK(required_q(2.0 * 2.09e10, 637.0) == doctest::Approx(70600.0).epsilon(0.005));
}

TEST_CASE("coupling report chains the pieces")
{
    CouplingInputs in;
    in.evac_V_per_m = 36.2e3;
    in.length_linewidth_pm = 60.6;
    in.slope = 0.18;
    in.rates = RatesMeasurement{158e6, 88.2e6, 79.4e6, 0.0255};
    const auto rep = coupling_report(in);
    REQUIRE(rep.linewidth);
    CHECK(rep.kappa_per_s == doctest::Approx(rep.linewidth->kappa_per_s));
    CHECK(rep.purcell_zpl_theory == doctest::Approx(35.5).epsilon(0.01));
    CHECK(rep.dipole_over_e_nm == doctest::Approx(0.108).epsilon(0.01));
    REQUIRE(rep.measured);
    REQUIRE(rep.inversion);
    CHECK(rep.inversion->debye_waller == doctest::Approx(0.0255).epsilon(0.02));

    CouplingInputs none;
    none.evac_V_per_m = 36.2e3;
    CHECK_THROWS_AS(coupling_report(none), InputError);
}
