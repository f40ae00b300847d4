#include <doctest.h>

#include <cmath>

#include "rwos/error.hpp"
#include "rwos/quadrature.hpp"
#include "rwos/rng.hpp"
#include "rwos/special.hpp"
#include "rwos/stats.hpp"

using namespace rwos;

namespace {

DiscretePmf pmf(std::initializer_list<std::pair<long, double>> m) {
    DiscretePmf p;
    for (auto [k, v] : m) p.mass[{k}] = v;
    return p;
}

DiscretePmf random_pmf(Rng& rng) {
    DiscretePmf p;
    double tot = 0;
    for (long k = 0; k < 6; ++k) tot += p.mass[{k}] = rng.uniform();
    for (auto& [k, v] : p.mass) v /= tot;
    return p;
}

}  // namespace

TEST_CASE("total variation of hand-computed pmfs") {
    const DiscretePmf p = pmf({{0, 0.5}, {1, 0.5}});
    const DiscretePmf q = pmf({{0, 0.25}, {1, 0.25}, {2, 0.5}});
    CHECK(tv_distance(p, q) == doctest::Approx(0.5));
    CHECK(tv_distance(p, p) == 0.0);
    CHECK(tv_distance(p, pmf({{5, 1.0}})) == doctest::Approx(1.0));
    DiscretePmf binned = p;
    binned.step = 0.1;
    CHECK_THROWS_AS(tv_distance(p, binned), Error);
}

TEST_CASE("total variation is a metric") {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const DiscretePmf a = random_pmf(rng), b = random_pmf(rng), c = random_pmf(rng);
        CHECK(tv_distance(a, b) == doctest::Approx(tv_distance(b, a)));
        CHECK(tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-15);
        CHECK(tv_distance(a, b) <= 1.0);
    }
}

TEST_CASE("empirical distributions bin by step") {
    const EmpiricalDist e = EmpiricalDist::from_scalars({0.04, 0.06, 0.11, -0.01}, 0.05);
    CHECK(e.n() == 4);
    CHECK(e.counts().at({0}) == 1);
    CHECK(e.counts().at({1}) == 1);
    CHECK(e.counts().at({2}) == 1);
    CHECK(e.counts().at({-1}) == 1);
    CHECK(e.pmf().total() == doctest::Approx(1.0));
}

TEST_CASE("Kolmogorov-Smirnov") {
    CHECK(kolmogorov_sf(1.3580986) == doctest::Approx(0.05).epsilon(1e-5));
    CHECK(kolmogorov_sf(0.0) == 1.0);
    Rng rng(2);
    std::vector<double> u, v, w;
    for (int i = 0; i < 5000; ++i) {
        u.push_back(rng.uniform());
        v.push_back(rng.uniform());
        w.push_back(rng.uniform() * 0.9);
    }
    const auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(ks_one_sample({0.25, 0.75}, uniform_cdf).statistic == doctest::Approx(0.25));
    CHECK_THROWS_AS(ks_one_sample({0.5}, uniform_cdf), Error);
    CHECK(ks_one_sample(u, uniform_cdf).p_value > 1e-3);
    CHECK(ks_one_sample(w, uniform_cdf).p_value < 1e-6);
    CHECK(ks_two_sample(u, v).p_value > 1e-3);
    CHECK(ks_two_sample(u, w).p_value < 1e-6);
}

TEST_CASE("chi-square goodness of fit is calibrated") {
    CHECK(chi_square_gof({25, 25, 50}, {0.25, 0.25, 0.5}).statistic == 0.0);
    CHECK(chi_square_gof({25, 25, 50}, {0.25, 0.25, 0.5}).p_value == doctest::Approx(1.0));
    CHECK_THROWS_AS(chi_square_gof({1, 2}, {0.3, 0.3}), Error);
    Rng rng(4);
    int rejections = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        std::vector<std::uint64_t> obs(6, 0);
        for (int i = 0; i < 600; ++i) ++obs[rng.below(6)];
        rejections += chi_square_gof(obs, std::vector<double>(6, 1.0 / 6)).p_value < 0.05;
    }
    // Binomial(400, 0.05): mean 20, sd 4.4
    CHECK(rejections > 5);
    CHECK(rejections < 38);
}

TEST_CASE("two-sample chi-square") {
    Rng rng(5);
    std::vector<long> a, b, c;
    for (int i = 0; i < 5000; ++i) {
        a.push_back(long(rng.below(10)));
        b.push_back(long(rng.below(10)));
        c.push_back(long(rng.below(11)));
    }
    const auto ea = EmpiricalDist::from_integers(a);
    CHECK(chi_square_two_sample(ea, EmpiricalDist::from_integers(b)).p_value > 1e-3);
    CHECK(chi_square_two_sample(ea, EmpiricalDist::from_integers(c)).p_value < 1e-6);
}

TEST_CASE("Monte Carlo mean and standard error") {
    const MeanEstimate m = mc_mean(std::vector<double>{1, 2, 3, 4});
    CHECK(m.mean == 2.5);
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    const MeanEstimate a = mc_mean([](std::uint64_t s) { return double(s & 7); }, 64, 0, 1);
    const MeanEstimate b = mc_mean([](std::uint64_t s) { return double(s & 7); }, 64, 0, 3);
    CHECK(a.mean == 3.5);
    CHECK(a.mean == b.mean);
    CHECK(a.se == b.se);
}

TEST_CASE("shifted order statistics") {
    CHECK(shifted_order_stats({3, 1, 4, 1.5, 9}, 2) == std::vector<double>{0.5, 2.0});
}

TEST_CASE("block-skipping sampler agrees with the direct walk") {
    const auto spec = IncrementSpec::gaussian(1.0);
    Rng r1(6), r2(7);
    std::vector<double> a1, b1, a2, b2;
    for (int i = 0; i < 4000; ++i) {
        const auto a = sample_low_order_stats(spec, 2000, 2, r1, true);
        const auto b = sample_low_order_stats(spec, 2000, 2, r2, false);
        a1.push_back(a[0]);
        a2.push_back(a[1]);
        b1.push_back(b[0]);
        b2.push_back(b[1]);
    }
    CHECK(ks_two_sample(a1, b1).p_value > 1e-3);
    CHECK(ks_two_sample(a2, b2).p_value > 1e-3);
}

TEST_CASE("rate fit preconditions") {
    RateSettings s;
    CHECK_THROWS_AS(rate_fit(IncrementSpec::simple_symmetric(), s), Error);
    CHECK_THROWS_AS(rate_fit(IncrementSpec::gaussian(1.0, 0.1), s), Error);
    s.n_grid = {100, 1000, 10000};
    CHECK_THROWS_AS(rate_fit(IncrementSpec::gaussian(1.0), s), Error);
}

TEST_CASE("mixture positive part against quadrature of the Gaussian density") {
    const auto spec = IncrementSpec::parse("mix:0.4*gaussian:1:0.5,0.6*gaussian:2:-0.2");
    for (std::size_t k : {1u, 5u, 30u}) {
        double q = 0;
        for (const auto& [w, c] : spec.components()) {
            const double m = double(k) * c.mean(), sd = c.sigma() * std::sqrt(double(k));
            q += w * integrate([&](double x) { return x * normal_pdf((x - m) / sd) / sd; }, 0,
                               std::numeric_limits<double>::infinity(), 1e-12)
                         .value;
        }
        CHECK(mixture_expected_positive_part(spec, k) == doctest::Approx(q).epsilon(1e-10));
        // E S^+ - E S^- = E S
        CHECK(mixture_expected_positive_part(spec, k) - mixture_expected_negative_part(spec, k) ==
              doctest::Approx(double(k) * (0.4 * 0.5 - 0.6 * 0.2)).epsilon(1e-10));
    }
    // a one-component mixture is the plain Gaussian
    const auto single = IncrementSpec::parse("mix:1*gaussian:1");
    CHECK(mixture_expected_positive_part(single, 4) == doctest::Approx(2.0 * normal_pdf(0.0)));
}

TEST_CASE("drifted mixture gap checks at small size") {
    const auto spec = IncrementSpec::parse("mix:0.5*gaussian:1:-1,0.5*gaussian:1:1");
    const MixtureReport r = mixture_gap_checks(spec, 3, 200, 20000, 91);
    CHECK(r.passed);
    CHECK(r.limit_gap > 0.0);
}
