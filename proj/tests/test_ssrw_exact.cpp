#include <doctest.h>

#include <cmath>

#include "rwos/error.hpp"
#include "rwos/rng.hpp"
#include "rwos/ssrw_exact.hpp"
#include "rwos/stats.hpp"

using namespace rwos;

namespace {

Rational enum_mean(unsigned n, const std::string& stat) { return enumerate_walks(n, Statistic::parse(stat)).mean(); }

}  // namespace

TEST_CASE("central terms and limits as exact rationals") {
    CHECK(to_string(central_term(0)) == "1");
    CHECK(to_string(central_term(2)) == "3/8");
    CHECK(to_string(central_term(5)) == "63/256");
    CHECK(to_string(expected_gap_limit(4)) == "3/16");
    CHECK(to_string(expected_gap_limit(5)) == "3/16");
    CHECK(to_string(spitzer_expected_max(3)) == "1");
}

TEST_CASE("ExactPmf bookkeeping") {
    ExactPmf a;
    a.add({0}, Rational(1, 2));
    a.add({1}, Rational(1, 4));
    a.add({1}, Rational(1, 4));
    CHECK(a.total() == 1);
    CHECK(a.mass({1}) == Rational(1, 2));
    CHECK(ExactPmf::from_json(a.to_json()) == a);
    const ExactPmf c = convolve(a, a);
    CHECK(c.mass({1}) == Rational(1, 2));
    CHECK(c.mean() == 1);
}

TEST_CASE("statistic grammar") {
    CHECK(Statistic::parse("d:3").describe() == "d:3");
    CHECK(Statistic::parse("order-stats").kind == Statistic::Kind::order_stats);
    CHECK_THROWS_AS(Statistic::parse("d:x"), Error);
    CHECK_THROWS_AS(Statistic::parse("nope"), Error);
    CHECK_THROWS_AS(enumerate_walks(kMaxEnumerate + 1, Statistic::parse("min")), Error);
}

TEST_CASE("Wendel convolution equals the enumerated order-statistic law") {
    for (unsigned n = 0; n <= 9; ++n)
        for (unsigned k = 0; k <= n; ++k)
            CHECK_MESSAGE(wendel_convolution(k, n) == enumerate_walks(n, Statistic::parse("m:" + std::to_string(k))),
                          "k=" << k << " n=" << n);
}

TEST_CASE("gap expectations: identity, positive part and palindrome") {
    for (unsigned k = 1; k <= 10; ++k) CHECK(enum_mean(k, "pos") / k == expected_gap_limit(k));
    const unsigned n = 8;
    for (unsigned k = 1; k <= n; ++k) {
        const Rational lhs = enum_mean(n, "d:" + std::to_string(k));
        const Rational rhs = enum_mean(k, "pos") / k + enum_mean(n - k + 1, "neg") / (n - k + 1);
        CHECK(lhs == rhs);
        CHECK(lhs == enum_mean(n, "d:" + std::to_string(n - k + 1)));
    }
}

TEST_CASE("expected maximum matches enumeration") {
    for (unsigned n = 1; n <= 12; ++n) CHECK(spitzer_expected_max(n) == enum_mean(n, "max"));
}

TEST_CASE("third-kind Chebyshev and the generating functions") {
    CHECK(chebyshev_v<Rational>(2, Rational(3, 2)) == 5);
    CHECK(chebyshev_v<double>(2, 1.5) == 5.0);
    for (unsigned k = 0; k < 8; ++k) CHECK(chebyshev_v<Rational>(k, Rational(1)) == 1);
    CHECK(passage_gf(1, Rational(1, 2)) == Rational(1, 3));
    CHECK(passage_gf(2, Rational(1, 2)) == Rational(1, 11));
    CHECK(eta_gf(1, Rational(1, 2)) == Rational(1, 33));
    CHECK(eta_gf(3, 0.7) == doctest::Approx(eta_gf(3, Rational(7, 10)).get_d()).epsilon(1e-14));
    // derivative at z = 1 gives E eta_k = V_k'(1) + V_{k+1}'(1) = 2 (k+1)^2
    const double h = 1e-6;
    CHECK((eta_gf(1, 1.0) - eta_gf(1, 1.0 - h)) / h == doctest::Approx(8.0).epsilon(1e-4));
}

TEST_CASE("geometric samplers") {
    Rng rng(3);
    double s0 = 0, s1 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        s0 += double(sample_geo0(rng, 0.25));
        s1 += double(sample_geo1(rng, 0.25));
    }
    // means 3 and 4, sd sqrt(12) for both
    CHECK(std::abs(s0 / n - 3.0) < 4 * std::sqrt(12.0 / n));
    CHECK(std::abs(s1 / n - 4.0) < 4 * std::sqrt(12.0 / n));
}

TEST_CASE("occupation at level 0 is Geometric(1/2) on {1,2,...}") {
    Rng rng(17);
    const int n = 50000;
    std::vector<std::uint64_t> obs(30, 0);
    double eta1 = 0, eta1_sq = 0;
    for (int i = 0; i < n; ++i) {
        const OccupationCounts o = sample_chain_occupation(2, rng).total();
        ++obs[std::min<std::uint64_t>(o.l[0], 29)];
        eta1 += double(o.eta[1]);
        eta1_sq += double(o.eta[1]) * double(o.eta[1]);
    }
    std::vector<double> p(30, 0.0);
    for (int k = 1; k < 29; ++k) p[k] = std::ldexp(1.0, -k);
    p[29] = std::ldexp(1.0, -28);
    CHECK(obs[0] == 0);
    CHECK(chi_square_gof(obs, p).p_value > 1e-3);
    const double m = eta1 / n, se = std::sqrt((eta1_sq / n - m * m) / n);
    CHECK(std::abs(m - 8.0) < 4 * se);
}

TEST_CASE("the three passage variables have mean k (k + 1)") {
    Rng rng(23);
    const int n = 20000;
    for (auto f : {&sample_eta_up, &sample_nonneg_before_passage, &sample_reflected_passage}) {
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(double(f(2, rng)));
        const MeanEstimate m = mc_mean(v);
        CHECK(std::abs(m.mean - 6.0) < 4 * m.se);
    }
}

TEST_CASE("unique minimum probability: exact DP against enumeration") {
    CHECK(prob_unique_minimum(1) == 1.0);
    CHECK(prob_unique_minimum(2) == doctest::Approx(0.75).epsilon(1e-15));
    for (unsigned n = 1; n <= 14; ++n)
        CHECK(prob_unique_minimum(n) ==
              doctest::Approx(enumerate_walks(n, Statistic::parse("d:1")).mass({1}).get_d()).epsilon(1e-13));
    Rng rng(29);
    int once = 0;
    const int reps = 40000;
    for (int r = 0; r < reps; ++r) once += sample_min_multiplicity(2, rng) == 1;
    CHECK(std::abs(once / double(reps) - 0.75) < 4 * std::sqrt(0.1875 / reps));
}
