#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "rwos/error.hpp"
#include "rwos/stats.hpp"
#include "rwos/valley.hpp"

using namespace rwos;

namespace {

double chi3_sf(double x) { return cdf(complement(boost::math::chi_squared_distribution<>(3.0), x)); }

}  // namespace

TEST_CASE("K^a is the chi-square(3) tail of a^2 / t") {
    for (double a : {0.1, 1.0, 3.0})
        for (double t : {0.05, 1.0, 40.0}) CHECK(k_a(a, t) == doctest::Approx(chi3_sf(a * a / t)).epsilon(1e-13));
}

TEST_CASE("closed-form H^a against 2-D quadrature") {
    for (double a : {0.05, 0.3, 1.0, 2.5})
        for (double t : {0.05, 0.2, 2.0, 10.0}) CHECK(std::abs(h_a(a, t) - h_a_quadrature(a, t)) < 1e-9);
    CHECK(h_a(1.0, 2.0) == doctest::Approx(0.8853276).epsilon(1e-7));
    CHECK(h_a(1.0, 2.0) < k_a(1.0, 2.0));
    CHECK(h_a(1.0, 2.0) > k_a(1.0, 2.0) * k_a(1.0, 3.0));
}

TEST_CASE("printed pieces: I and II agree with quadrature, III and IV do not") {
    const HaPieces p = h_a_pieces(1.0, 2.0);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(p.corrected[i] - p.quadrature[i]) < 1e-9);
    CHECK(std::abs(p.printed[0] - p.quadrature[0]) < 1e-9);
    CHECK(std::abs(p.printed[1] - p.quadrature[1]) < 1e-9);
    CHECK(p.printed[2] == doctest::Approx(6.1400).epsilon(1e-4));
    CHECK(p.quadrature[2] == doctest::Approx(5.5664).epsilon(1e-4));
    CHECK(p.printed[3] == doctest::Approx(1.8566).epsilon(1e-4));
    CHECK(p.quadrature[3] == doctest::Approx(0.018459).epsilon(1e-4));
    CHECK(h_a_printed(1.0, 2.0, false) == doctest::Approx(1.2255).epsilon(1e-4));
    CHECK(h_a_printed(1.0, 2.0, true) == doctest::Approx(0.6831).epsilon(1e-4));
}

TEST_CASE("grid avoidance probability is stable under discretisation changes") {
    const GridAvoidance g(1.0);
    CHECK(g.g(0.5) == doctest::Approx(0.4152676074692).epsilon(1e-11));
    CHECK(std::abs(GridAvoidance(1.0, 30.0, 0.25).g(0.5) - g.g(0.5)) < 1e-11);
    CHECK(g.phi(1.5) < g.phi(3.0));
    // continuous-time avoidance from x is 1 - a/x; the grid can only miss more excursions
    for (double x : {1.5, 3.0, 20.0}) CHECK((g.phi(x) >= 1.0 - 1.0 / x && g.phi(x) <= 1.0));
    CHECK(g.g(0.5) < k_a(1.0, 0.5));
}

TEST_CASE("grid avoidance probability against single-arm simulation") {
    const int reps = 100000;
    int above = 0, truncated = 0;
    for (int r = 0; r < reps; ++r) {
        bool tr = false;
        above += sample_arm_above(1.0, 0.5, 1e12, replica_seed(61, r), &tr);
        truncated += tr;
    }
    const double p = above / double(reps);
    CHECK(truncated == 0);
    CHECK(std::abs(p - 0.4152676074692) < 4 * std::sqrt(p * (1 - p) / reps));
}

TEST_CASE("the literal product formula undershoots the avoidance probability") {
    ValleyEvaluator ev;
    ev.method = GaMethod::product;
    const double prod = ev.g_a(1.0, 0.5).value;
    CHECK(prod == doctest::Approx(0.38969).epsilon(1e-4));
    CHECK(GridAvoidance(1.0).g(0.5) - prod > 0.02);
}

TEST_CASE("valley mean equals -zeta(1/2) / sqrt(2 pi)") {
    CHECK(valley_mean_target() == doctest::Approx(0.5825971579390).epsilon(1e-12));
    ValleyEvaluator ev;
    ev.quad_tol = 1e-6;
    ev.mean_cutoff_tail = 1e-7;
    CHECK(std::abs(ev.valley_mean().value - valley_mean_target()) < 1e-5);
    ev.quad_tol = -1;
    CHECK_THROWS_AS(ev.validate(), Error);
}

TEST_CASE("Bessel(3) grid sampler") {
    std::vector<double> r1;
    double sq = 0;
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) {
        const auto v = sample_bes3_grid({0.5, 1.0, 2.0}, replica_seed(71, r));
        r1.push_back(v[1]);
        sq += v[2] * v[2];
    }
    CHECK(ks_one_sample(r1, [](double x) { return x <= 0 ? 0.0 : 1.0 - chi3_sf(x * x); }).p_value > 1e-3);
    // E R(2)^2 = 6, Var R(2)^2 = 2 * 3 * 4 = 24
    CHECK(std::abs(sq / reps - 6.0) < 4 * std::sqrt(24.0 / reps));
}

TEST_CASE("valley samples are ordered and the mean matches at small size") {
    const ValleySample s = sample_valley(3, 1e12, 5);
    REQUIRE(s.order_stats.size() == 4);
    CHECK(std::is_sorted(s.order_stats.begin(), s.order_stats.end()));
    CHECK((s.u >= 0.0 && s.u < 1.0));

    const ValleyMc mc = mc_valley_order_stats(2, 1e12, 20000, 77);
    CHECK(mc.nondecreasing);
    CHECK(mc.truncated == 0);
    CHECK(std::abs(mc.mean[0] - valley_mean_target()) < 4 * mc.se[0]);
}

TEST_CASE("discretisation gap: walk minimum minus Brownian minimum") {
    const Discretization exact = discretization_experiment(400, 1, 4000, 81, true);
    for (double d : exact.diff) REQUIRE(d >= 0.0);
    CHECK(std::abs(exact.mean - valley_mean_target()) < 4 * exact.se + 0.05);
    const Discretization grid = discretization_experiment(50, 100, 500, 82, false);
    for (double d : grid.diff) REQUIRE(d >= 0.0);
}
