#include <doctest.h>

#include <cmath>

#include "rwos/error.hpp"
#include "rwos/feller.hpp"
#include "rwos/ssrw_exact.hpp"
#include "rwos/stats.hpp"

using namespace rwos;

namespace {

WalkPath riffle_of(const WalkPath& p) {
    const FellerPair f = decompose(p);
    return riffle_reconstruct(chain_segments(f.up, SegmentKind::ascending),
                              chain_segments(f.down, SegmentKind::descending));
}

}  // namespace

TEST_CASE("decomposition of a hand-computed path") {
    const WalkPath p({1.0, -2.0, 0.5});
    const FellerPair f = decompose(p);
    CHECK(f.up.increments() == std::vector<double>{1.0});
    CHECK(f.down.increments() == std::vector<double>{-2.0, 0.5});
    CHECK(f.n_plus == 1);
    CHECK(f.n_minus == 2);
    CHECK(f.indicator == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(recover_reverse_induction(f) == p);
    CHECK(recover_reverse_induction(FellerPair::from_json(f.to_json())) == p);
}

TEST_CASE("both recovery routes invert the decomposition on every short SSRW path") {
    for (unsigned n = 1; n <= 10; ++n) {
        bool all = true;
        for_each_ssrw_path(n, [&](const std::vector<long>& s) {
            std::vector<double> x(n);
            for (unsigned i = 0; i < n; ++i) x[i] = double(s[i + 1] - s[i]);
            const WalkPath p(x);
            all = all && recover_reverse_induction(decompose(p)) == p && riffle_of(p) == p;
        });
        CHECK_MESSAGE(all, "n = " << n);
    }
}

TEST_CASE("both recovery routes invert the decomposition on Gaussian and Laplace paths") {
    for (const char* spec : {"gaussian:1", "laplace:1", "gaussian:1:0.3"}) {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const WalkPath p = sample_path(IncrementSpec::parse(spec), 150, seed);
            REQUIRE(recover_reverse_induction(decompose(p)) == p);
            REQUIRE(riffle_of(p) == p);
        }
    }
}

TEST_CASE("segments serialise and ties go to the ascending chain first") {
    const WalkPath p = sample_path(IncrementSpec::simple_symmetric(), 40, 5);
    const FellerPair f = decompose(p);
    const auto asc = chain_segments(f.up, SegmentKind::ascending);
    const auto desc = chain_segments(f.down, SegmentKind::descending);
    CHECK(riffle_reconstruct(segments_from_json(segments_to_json(asc), SegmentKind::ascending),
                             segments_from_json(segments_to_json(desc), SegmentKind::descending)) == p);
    for (const auto& s : asc) CHECK(s.increments.size() + 1 == s.values.size());
}

TEST_CASE("ladder records of hand-computed paths") {
    const LadderRecord a = ladder_variables(WalkPath({1.0, -2.0, 0.5}));
    REQUIRE(a.strict_ascending.size() == 1);
    CHECK(a.strict_ascending[0] == std::pair<std::size_t, double>{1, 1.0});
    REQUIRE(a.weak_descending.size() == 1);
    CHECK(a.weak_descending[0] == std::pair<std::size_t, double>{2, -1.0});

    const LadderRecord b = ladder_variables(WalkPath({-1.0, 1.0, -1.0}));
    CHECK(b.strict_ascending.empty());
    REQUIRE(b.weak_descending.size() == 2);
    CHECK(b.weak_descending[1] == std::pair<std::size_t, double>{3, -1.0});
}

TEST_CASE("smallest chain values and the W_1 tail product") {
    CHECK(smallest_chain_values({0, 2, 1, 3}, {0, -0.5, -2}, 3) == std::vector<double>{0.5, 1, 2});
    CHECK(smallest_chain_values({0}, {0}, 2).empty());
    const double t = w1_tail([](double w) { return std::exp(-w); }, [](double w) { return std::exp(-2 * w); }, 0.7);
    CHECK(t == doctest::Approx(std::exp(-2.1)));
}

TEST_CASE("limit order statistics reject drift") {
    CHECK_THROWS_AS(limit_order_stats(IncrementSpec::gaussian(1, 0.2), 1, 100000, 4.0, 1), Error);
    CHECK_THROWS_AS(limit_order_stats(IncrementSpec::parse("mix:0.5*gaussian:1:1,0.5*gaussian:1:-1"), 1, 100000, 4.0, 1),
                    Error);
}

TEST_CASE("SSRW limit: the minimum is unique with probability one half") {
    const int reps = 20000;
    int zero = 0;
    for (int r = 0; r < reps; ++r) {
        const auto l = limit_order_stats(IncrementSpec::simple_symmetric(), 1, 100000000, 4.0, replica_seed(41, r));
        REQUIRE(l.certified);
        zero += l.w.at(0) == 0.0;
    }
    CHECK(std::abs(zero / double(reps) - 0.5) < 4 * std::sqrt(0.25 / reps));
}

TEST_CASE("Gaussian limit: E W_1 equals 1 / sqrt(2 pi)") {
    std::vector<double> w;
    for (int r = 0; r < 20000; ++r)
        w.push_back(limit_order_stats(IncrementSpec::gaussian(1.0), 1, 100000000, 4.0, replica_seed(43, r)).w.at(0));
    const MeanEstimate m = mc_mean(w);
    CHECK(std::abs(m.mean - 1.0 / std::sqrt(2 * 3.14159265358979)) < 4 * m.se);
}

TEST_CASE("ladder-segment and walk-decomposition samplers agree in law") {
    std::vector<double> a, b;
    for (int r = 0; r < 3000; ++r) {
        const auto spec = IncrementSpec::gaussian(1.0);
        a.push_back(limit_order_stats(spec, 2, 100000000, 4.0, replica_seed(51, r)).w.at(1));
        b.push_back(limit_order_stats(spec, 2, 1000000, 4.0, replica_seed(52, r), LimitMethod::walk_decomposition).w.at(1));
    }
    CHECK(ks_two_sample(a, b).p_value > 1e-3);
}
