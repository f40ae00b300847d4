#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/zeta.hpp>

#include "rwos/quadrature.hpp"
#include "rwos/special.hpp"

using namespace rwos;

TEST_CASE("erfc against reference values and its defining integral") {
    CHECK(rwos::erfc(0.0) == 1.0);
    CHECK(rwos::erfc(1.0) == doctest::Approx(0.157299207050285130658).epsilon(1e-14));
    CHECK(rwos::erfc(5.0) == doctest::Approx(1.5374597944280348502e-12).epsilon(1e-13));
    CHECK(rwos::erfc(-1.0) == doctest::Approx(1.842700792949714869342).epsilon(1e-14));
    for (double x : {0.1, 0.8, 2.5}) {
        const auto q = integrate([](double t) { return 2.0 / std::sqrt(kPi) * std::exp(-t * t); }, x,
                                 std::numeric_limits<double>::infinity(), 1e-13);
        CHECK(rwos::erfc(x) == doctest::Approx(q.value).epsilon(1e-12));
    }
}

TEST_CASE("normal distribution helpers") {
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
    CHECK(normal_sf(10.0) == doctest::Approx(7.619853024160526e-24).epsilon(1e-12));
    CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2 * kPi)));
}

TEST_CASE("Owen T special cases") {
    for (double a : {0.3, 1.0, 4.0}) {
        CHECK(owen_t(0.0, a) == doctest::Approx(std::atan(a) / (2 * kPi)).epsilon(1e-14));
        CHECK(owen_t_positive_exponent(0.0, a) == doctest::Approx(std::atan(a) / (2 * kPi)).epsilon(1e-12));
    }
    const double h = 0.7, p = normal_cdf(h);
    CHECK(owen_t(h, 1.0) == doctest::Approx(0.5 * p * (1 - p)).epsilon(1e-14));
    CHECK(owen_t(h, 0.0) == 0.0);
    // the positive-exponent variant grows with h where the classical one decays
    CHECK(owen_t_positive_exponent(h, 1.0) > owen_t(0.0, 1.0));
    CHECK(owen_t(h, 1.0) < owen_t(0.0, 1.0));
}

TEST_CASE("zeta evaluations") {
    CHECK(zeta_alternating(0.5) == doctest::Approx(-1.4603545088095868129).epsilon(1e-13));
    CHECK(zeta_alternating(0.5) == doctest::Approx(boost::math::zeta(0.5)).epsilon(1e-13));
    CHECK(zeta_alternating(2.0) == doctest::Approx(kPi * kPi / 6).epsilon(1e-13));
    CHECK(hurwitz_zeta(2.0, 1.0) == doctest::Approx(kPi * kPi / 6).epsilon(1e-13));
    CHECK(hurwitz_zeta(2.0, 0.5) == doctest::Approx(kPi * kPi / 2).epsilon(1e-13));
    CHECK(hurwitz_zeta(1.5, 3.0) == doctest::Approx(boost::math::zeta(1.5) - 1 - std::pow(2.0, -1.5)).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature on known integrals") {
    CHECK(integrate([](double x) { return x * x; }, 0, 1).value == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(integrate([](double x) { return std::sin(x); }, 0, kPi).value == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::exp(-x); }, 0, std::numeric_limits<double>::infinity()).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    const QuadResult g = integrate_global([](double x) { return std::sqrt(x); }, 0, 1, 1e-12, 1e-12);
    CHECK(g.converged);
    CHECK(g.value == doctest::Approx(2.0 / 3).epsilon(1e-11));
    // a narrow peak the global bisection must find
    const QuadResult peak =
        integrate_global([](double x) { return std::exp(-1e4 * (x - 0.3) * (x - 0.3)); }, 0, 1, 1e-13, 1e-12);
    CHECK(peak.value == doctest::Approx(std::sqrt(kPi / 1e4)).epsilon(1e-10));
}
