#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/laplace.hpp>
#include <boost/math/distributions/normal.hpp>

#include "rwos/error.hpp"
#include "rwos/stats.hpp"
#include "rwos/walk.hpp"

using namespace rwos;

TEST_CASE("increment specs parse and reject bad parameters") {
    const auto g = IncrementSpec::parse("gaussian:2:0.5");
    CHECK(g.kind() == IncrementSpec::Kind::gaussian);
    CHECK(g.sigma() == 2.0);
    CHECK(g.mean() == 0.5);
    CHECK(g.has_drift());
    CHECK(IncrementSpec::parse("laplace:1.5").stddev() == doctest::Approx(1.5 * std::sqrt(2.0)));
    CHECK(IncrementSpec::parse("ssrw").is_lattice());

    const auto m = IncrementSpec::parse("mix:0.25*gaussian:1,0.75*laplace:2");
    REQUIRE(m.components().size() == 2);
    CHECK(m.components()[0].first == 0.25);
    CHECK(IncrementSpec::from_json(m.to_json()).describe() == m.describe());

    for (const char* bad : {"gaussian:-1", "gaussian:0", "laplace:0", "bogus", "gaussian:x", "mix:", "mix:-1*ssrw"})
        CHECK_THROWS_AS(IncrementSpec::parse(bad), Error);
}

TEST_CASE("order statistics of a hand-computed path") {
    const WalkPath p({1.0, -2.0, 0.5});
    CHECK(p.sums() == std::vector<double>{0.0, 1.0, -1.0, -0.5});
    const OrderStats o = order_statistics(p);
    CHECK(o.values == std::vector<double>{-1.0, -0.5, 0.0, 1.0});
    CHECK(o.gaps == std::vector<double>{0.5, 0.5, 1.0});
    CHECK(o.shifted == std::vector<double>{0.0, 0.5, 1.0, 2.0});
    CHECK(o.argmin_last == 2);
    CHECK(o.min == -1.0);
    CHECK(o.max == 1.0);

    CHECK(last_argmin({0.0, -1.0, -1.0, 0.0}) == 2);
    CHECK(reverse_path(p).increments() == std::vector<double>{0.5, -2.0, 1.0});
}

TEST_CASE("serialisation round-trips exactly") {
    const WalkPath p({0.1, 1.0 / 3.0, -1e-300, 12345.678901234567, -0.0});
    CHECK(WalkPath::from_csv(p.to_csv()) == p);
    CHECK(WalkPath::from_json(p.to_json()) == p);
    CHECK_THROWS_AS(WalkPath::from_csv("y\n1\n"), Error);
    CHECK_THROWS_AS(WalkPath::from_csv("x\n1\nabc\n"), Error);
}

TEST_CASE("sample_path is a deterministic function of the seed") {
    const auto spec = IncrementSpec::parse("gaussian:1");
    CHECK(sample_path(spec, 100, 7) == sample_path(spec, 100, 7));
    CHECK(!(sample_path(spec, 100, 7) == sample_path(spec, 100, 8)));
    const WalkPath s = sample_path(IncrementSpec::simple_symmetric(), 1000, 3);
    for (double x : s.increments()) CHECK((x == 1.0 || x == -1.0));
}

TEST_CASE("increment laws match their distribution functions") {
    const auto gauss = sample_path(IncrementSpec::gaussian(2.0, 0.5), 20000, 11).increments();
    boost::math::normal_distribution<> nd(0.5, 2.0);
    CHECK(ks_one_sample(gauss, [&](double x) { return cdf(nd, x); }).p_value > 1e-3);

    const auto lap = sample_path(IncrementSpec::laplace(1.5), 20000, 12).increments();
    boost::math::laplace_distribution<> ld(0.0, 1.5);
    CHECK(ks_one_sample(lap, [&](double x) { return cdf(ld, x); }).p_value > 1e-3);
}

TEST_CASE("a mixture draws one component per path") {
    // sigma 1 and sigma 100 paths are told apart by their sample variance
    const auto spec = IncrementSpec::parse("mix:0.3*gaussian:1,0.7*gaussian:100");
    int wide = 0;
    const int paths = 2000;
    for (int r = 0; r < paths; ++r) {
        const auto x = sample_path(spec, 50, 1000 + r).increments();
        double ss = 0;
        for (double v : x) ss += v * v;
        const double sd = std::sqrt(ss / 50);
        CHECK((sd < 3.0 || sd > 30.0));
        wide += sd > 30.0;
    }
    const double se = std::sqrt(0.7 * 0.3 / paths);
    CHECK(std::abs(wide / double(paths) - 0.7) < 4 * se);
}
