#include "rwos/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rwos/error.hpp"
#include "rwos/feller.hpp"
#include "rwos/parallel.hpp"
#include "rwos/rng.hpp"
#include "rwos/special.hpp"
#include "rwos/ssrw_exact.hpp"
#include "rwos/stats.hpp"
#include "rwos/valley.hpp"
#include "rwos/walk.hpp"

namespace rwos {

nlohmann::json Check::to_json() const {
    nlohmann::json j = {{"name", name},           {"value", value}, {"target", target}, {"tolerance", tolerance},
                        {"rule", rule},           {"provenance", provenance}, {"passed", passed}};
    if (!info.is_null()) j["info"] = info;
    return j;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& x : checks) c.push_back(x.to_json());
    return {{"schema", 1}, {"name", name},     {"settings", settings},     {"seed", seed},
            {"checks", c}, {"passed", passed}, {"wall_clock", wall_clock}};
}

namespace {

using json = nlohmann::json;

Check exact_check(std::string name, json value, json target, bool equal, std::string provenance) {
    Check c;
    c.name = std::move(name);
    c.value = std::move(value);
    c.target = std::move(target);
    c.rule = "exact";
    c.provenance = std::move(provenance);
    c.passed = equal;
    return c;
}

Check abs_check(std::string name, double value, double target, double tol, std::string provenance) {
    Check c;
    c.name = std::move(name);
    c.value = value;
    c.target = target;
    c.tolerance = tol;
    c.rule = "abs";
    c.provenance = std::move(provenance);
    c.passed = std::abs(value - target) <= tol;
    return c;
}

Check se_check(std::string name, const MeanEstimate& m, double target, std::string provenance) {
    Check c;
    c.name = std::move(name);
    c.value = m.mean;
    c.target = target;
    c.tolerance = 3.0 * m.se;
    c.rule = "3se";
    c.provenance = std::move(provenance);
    c.passed = std::abs(m.mean - target) <= c.tolerance;
    c.info = {{"se", m.se}, {"reps", m.reps}, {"z", m.se > 0 ? (m.mean - target) / m.se : 0.0}};
    return c;
}

Check rel_check(std::string name, double value, double target, double rel, std::string provenance) {
    Check c;
    c.name = std::move(name);
    c.value = value;
    c.target = target;
    c.tolerance = rel * std::abs(target);
    c.rule = "rel";
    c.provenance = std::move(provenance);
    c.passed = std::abs(value - target) <= c.tolerance;
    return c;
}

Check p_check(std::string name, const TestResult& t, double alpha, std::string provenance) {
    Check c;
    c.name = std::move(name);
    c.value = t.p_value;
    c.target = alpha;
    c.tolerance = 0.0;
    c.rule = "p>";
    c.provenance = std::move(provenance);
    c.passed = t.p_value > alpha;
    c.info = {{"statistic", t.statistic}, {"df", t.df}};
    return c;
}

std::size_t get_size(const json& s, const char* key) { return s.at(key).get<std::size_t>(); }
unsigned get_uint(const json& s, const char* key) { return s.at(key).get<unsigned>(); }
double get_double(const json& s, const char* key) { return s.at(key).get<double>(); }

Statistic stat(Statistic::Kind kind, unsigned k = 0) {
    Statistic s;
    s.kind = kind;
    s.k = k;
    return s;
}

// --- exact SSRW identities ---------------------------------------------------------------------

void run_wendel(const json& s, std::uint64_t, unsigned, std::vector<Check>& out) {
    const unsigned n_max = get_uint(s, "n_max");
    require(n_max <= kMaxEnumerate, "n_max too large for enumeration");
    std::size_t equal = 0, total = 0;
    json failures = json::array();
    for (unsigned n = 0; n <= n_max; ++n) {
        for (unsigned k = 0; k <= n; ++k) {
            ++total;
            if (wendel_convolution(k, n) == enumerate_walks(n, stat(Statistic::Kind::order_stat, k)))
                ++equal;
            else
                failures.push_back({k, n});
        }
    }
    Check c = exact_check("wendel_convolution_equals_enumeration", equal, total, equal == total,
                          "enumeration of all sign sequences");
    if (!failures.empty()) c.info = {{"failures", failures}};
    out.push_back(std::move(c));
}

void run_gap_expectation(const json& s, std::uint64_t, unsigned, std::vector<Check>& out) {
    const unsigned n_max = get_uint(s, "n_max");
    require(n_max >= 1 && n_max <= kMaxEnumerate, "n_max must be in [1, 24]");
    std::vector<Rational> pos(n_max + 2), neg(n_max + 2);
    for (unsigned m = 1; m <= n_max; ++m) {
        pos[m] = enumerate_walks(m, stat(Statistic::Kind::positive_part)).mean() / m;
        neg[m] = enumerate_walks(m, stat(Statistic::Kind::negative_part)).mean() / m;
    }
    std::size_t ok_identity = 0, ok_palin = 0, total = 0;
    json bad = json::array();
    for (unsigned n = 1; n <= n_max; ++n) {
        std::vector<Rational> ed(n + 1);
        for (unsigned k = 1; k <= n; ++k) ed[k] = enumerate_walks(n, stat(Statistic::Kind::gap, k)).mean();
        for (unsigned k = 1; k <= n; ++k) {
            ++total;
            const bool id = ed[k] == pos[k] + neg[n - k + 1];
            ok_identity += id;
            ok_palin += ed[n - k + 1] == ed[k];
            if (!id) bad.push_back({k, n});
        }
    }
    std::size_t ok_limit = 0;
    for (unsigned k = 1; k <= n_max; ++k) ok_limit += pos[k] == expected_gap_limit(k);

    Check a = exact_check("gap_mean_equals_positive_plus_negative_part", ok_identity, total, ok_identity == total,
                          "enumeration of gaps and of S_k^+, S_k^-");
    if (!bad.empty()) a.info = {{"failures", bad}};
    out.push_back(std::move(a));
    out.push_back(exact_check("positive_part_mean_equals_half_central_term", ok_limit, n_max, ok_limit == n_max,
                              "enumeration vs C(2m,m)/4^m"));
    out.push_back(exact_check("gap_means_palindromic", ok_palin, total, ok_palin == total, "enumeration"));
}

void run_round_trip(const json& s, std::uint64_t seed, unsigned threads, std::vector<Check>& out) {
    const unsigned n_max = get_uint(s, "n_max");
    const std::size_t paths = get_size(s, "gaussian_paths");
    const std::size_t gn = get_size(s, "gaussian_n");
    require(n_max >= 1 && n_max <= kMaxEnumerate, "n_max must be in [1, 24]");
    require(gn >= 1, "gaussian_n must be positive");

    auto roundtrip = [](const WalkPath& p, bool& ri, bool& rf) {
        const FellerPair fp = decompose(p);
        ri = recover_reverse_induction(fp) == p;
        rf = riffle_reconstruct(chain_segments(fp.up, SegmentKind::ascending),
                                chain_segments(fp.down, SegmentKind::descending)) == p;
    };
    std::size_t count = 0, bad_ri = 0, bad_rf = 0;
    for (unsigned n = 1; n <= n_max; ++n) {
        for_each_ssrw_path(n, [&](const std::vector<long>& sums) {
            std::vector<double> inc(n);
            for (unsigned i = 0; i < n; ++i) inc[i] = static_cast<double>(sums[i + 1] - sums[i]);
            bool ri = false, rf = false;
            roundtrip(WalkPath(std::move(inc)), ri, rf);
            ++count;
            bad_ri += !ri;
            bad_rf += !rf;
        });
    }
    out.push_back(exact_check("reverse_induction_ssrw_mismatches", bad_ri, 0, bad_ri == 0, "input path"));
    out.back().info = {{"paths", count}};
    out.push_back(exact_check("riffle_ssrw_mismatches", bad_rf, 0, bad_rf == 0, "input path"));
    out.back().info = {{"paths", count}};

    const auto spec = IncrementSpec::gaussian(1.0);
    std::vector<std::uint8_t> ri(paths), rf(paths);
    parallel_for(paths, threads, [&](std::size_t r) {
        bool a = false, b = false;
        roundtrip(sample_path(spec, gn, replica_seed(seed, r)), a, b);
        ri[r] = a;
        rf[r] = b;
    });
    const auto gri = static_cast<std::size_t>(std::count(ri.begin(), ri.end(), 0));
    const auto grf = static_cast<std::size_t>(std::count(rf.begin(), rf.end(), 0));
    out.push_back(exact_check("reverse_induction_gaussian_mismatches", gri, 0, gri == 0, "input path"));
    out.back().info = {{"paths", paths}};
    out.push_back(exact_check("riffle_gaussian_mismatches", grf, 0, grf == 0, "input path"));
    out.back().info = {{"paths", paths}};
}

void run_feller_split(const json& s, std::uint64_t, unsigned, std::vector<Check>& out) {
    const unsigned n_max = get_uint(s, "n_max");
    require(n_max >= 1 && n_max <= kMaxEnumerate, "n_max must be in [1, 24]");
    std::size_t equal = 0;
    json failures = json::array();
    for (unsigned n = 1; n <= n_max; ++n) {
        if (enumerate_walks(n, stat(Statistic::Kind::split_pair)) == enumerate_walks(n, stat(Statistic::Kind::feller_pair)))
            ++equal;
        else
            failures.push_back(n);
    }
    Check c = exact_check("split_pair_law_equals_feller_pair_law", equal, n_max, equal == n_max,
                          "enumeration of all sign sequences");
    if (!failures.empty()) c.info = {{"failures", failures}};
    out.push_back(std::move(c));
}

// --- SSRW occupation laws ----------------------------------------------------------------------

/// Exact law of (L_0, L_1) from the double-immigration branching process: Z_{-1} = 1,
/// Z_0 = 2 + Geo0(1/2), Z_1 = 2 + NegBin(Z_0, 1/2), L_0 = Z_0 - 1, L_1 = Z_0 + Z_1 - 2.
DiscretePmf occupation_pair_pmf(double cut = 1e-15) {
    DiscretePmf p;
    for (long z0 = 2;; ++z0) {
        const double pz = std::ldexp(1.0, -static_cast<int>(z0 - 1));
        if (pz < cut) break;
        // NegBin(r, 1/2): C(j + r - 1, j) 2^{-(j + r)}
        const double r = static_cast<double>(z0);
        for (long j = 0;; ++j) {
            const double lp = std::lgamma(j + r) - std::lgamma(j + 1.0) - std::lgamma(r) - (j + r) * std::log(2.0);
            const double q = std::exp(lp);
            p.mass[{z0 - 1, z0 + j}] += pz * q;
            // past the mode the terms fall at least geometrically, ratio -> 1/2
            if (static_cast<double>(j) > r && q < cut) break;
        }
    }
    return p;
}

void run_geomhits(const json& s, std::uint64_t seed, unsigned threads, std::vector<Check>& out) {
    const std::size_t reps = get_size(s, "reps");
    const double tv_tol = get_double(s, "tv_tolerance");
    const double alpha = get_double(s, "alpha");
    require(reps >= 100, "reps must be at least 100");
    std::vector<EmpiricalDist::Key> dec(reps), br(reps);
    const std::uint64_t s_dec = derive_seed(seed, 1), s_br = derive_seed(seed, 2);
    parallel_for(reps, threads, [&](std::size_t r) {
        Rng rng(replica_seed(s_dec, r));
        const auto o = sample_chain_occupation(1, rng).total();
        dec[r] = {static_cast<long>(o.l[0]), static_cast<long>(o.l[1])};
        Rng rng2(replica_seed(s_br, r));
        const auto b = occupation_from_branching(sample_double_immigration(1, rng2));
        br[r] = {static_cast<long>(b.l[0]), static_cast<long>(b.l[1])};
    });

    constexpr std::size_t cells = 40;
    std::vector<std::uint64_t> obs(cells + 1, 0);
    std::vector<double> probs(cells + 1);
    for (std::size_t k = 1; k <= cells; ++k) probs[k - 1] = std::ldexp(1.0, -static_cast<int>(k));
    probs[cells] = std::ldexp(1.0, -static_cast<int>(cells));
    for (const auto& k : dec) {
        require(k[0] >= 1, "L_0 must be at least 1");
        ++obs[std::min<std::size_t>(static_cast<std::size_t>(k[0]), cells + 1) - 1];
    }
    out.push_back(p_check("level_zero_occupation_geometric", chi_square_gof(obs, probs), alpha,
                          "P(L_0 = k) = 2^-k"));

    const EmpiricalDist ed = EmpiricalDist::from_keys(dec);
    const DiscretePmf exact = occupation_pair_pmf();
    Check c;
    c.name = "decomposition_vs_branching_pair_law_tv";
    c.value = tv_distance(ed.pmf(), exact);
    c.target = 0.0;
    c.tolerance = tv_tol;
    c.rule = "abs";
    c.provenance = "exact branching-process pmf of (L_0, L_1)";
    c.passed = c.value.get<double>() < tv_tol;
    const EmpiricalDist eb = EmpiricalDist::from_keys(br);
    c.info = {{"two_sample_tv_vs_branching_sampler", tv_distance(ed.pmf(), eb.pmf())},
              {"branching_sampler_tv_vs_exact", tv_distance(eb.pmf(), exact)},
              {"cells", ed.counts().size()}};
    out.push_back(std::move(c));
    out.push_back(p_check("decomposition_vs_branching_sampler_chi_square", chi_square_two_sample(ed, eb), alpha,
                          "branching-process sampler"));
}

void run_eta_gf(const json& s, std::uint64_t seed, unsigned threads, std::vector<Check>& out) {
    const std::size_t reps = get_size(s, "reps");
    const auto zs = s.at("z").get<std::vector<double>>();
    const auto ks = s.at("k").get<std::vector<unsigned>>();
    const std::size_t eq_reps = get_size(s, "equidistribution_reps");
    const unsigned eq_k = get_uint(s, "equidistribution_k");
    const double alpha = get_double(s, "alpha");
    require(reps >= 2 && eq_reps >= 100 && !zs.empty() && !ks.empty(), "bad eta-gf settings");
    for (double z : zs) require(z > 0.0 && z < 1.0, "z must lie in (0, 1)");
    for (unsigned k : ks) require(k >= 1 && k <= 50, "k must lie in [1, 50]");
    require(eq_k >= 1, "equidistribution_k must be at least 1");
    const unsigned top = *std::max_element(ks.begin(), ks.end());

    std::vector<std::vector<std::uint64_t>> eta(reps);
    const std::uint64_t s1 = derive_seed(seed, 1);
    parallel_for(reps, threads, [&](std::size_t r) {
        Rng rng(replica_seed(s1, r));
        eta[r] = sample_chain_occupation(top, rng).total().eta;
    });
    for (double z : zs) {
        for (unsigned k : ks) {
            std::vector<double> v(reps);
            for (std::size_t r = 0; r < reps; ++r) v[r] = std::pow(z, static_cast<double>(eta[r][k]));
            char name[64];
            std::snprintf(name, sizeof name, "eta_gf_k%u_z%g", k, z);
            out.push_back(se_check(name, mc_mean(v), eta_gf(k, z), "1/(V_k(1/z) V_{k+1}(1/z))"));
        }
    }

    std::vector<long> a(eq_reps), b(eq_reps), c(eq_reps);
    const std::uint64_t sa = derive_seed(seed, 2), sb = derive_seed(seed, 3), sc = derive_seed(seed, 4);
    parallel_for(eq_reps, threads, [&](std::size_t r) {
        Rng ra(replica_seed(sa, r)), rb(replica_seed(sb, r)), rc(replica_seed(sc, r));
        a[r] = static_cast<long>(sample_eta_up(eq_k, ra));
        b[r] = static_cast<long>(sample_nonneg_before_passage(eq_k, rb));
        c[r] = static_cast<long>(sample_reflected_passage(eq_k, rc));
    });
    const auto ea = EmpiricalDist::from_integers(a), eb = EmpiricalDist::from_integers(b),
               ec = EmpiricalDist::from_integers(c);
    out.push_back(p_check("upward_chain_count_vs_nonneg_time", chi_square_two_sample(ea, eb), alpha, "two-sample"));
    out.push_back(p_check("upward_chain_count_vs_reflected_passage", chi_square_two_sample(ea, ec), alpha, "two-sample"));
    out.push_back(p_check("nonneg_time_vs_reflected_passage", chi_square_two_sample(eb, ec), alpha, "two-sample"));
}

void run_unique_min(const json& s, std::uint64_t seed, unsigned threads, std::vector<Check>& out) {
    const std::size_t n = get_size(s, "n");
    const std::size_t reps = get_size(s, "reps");
    require(n >= 1 && reps >= 2, "need n >= 1 and reps >= 2");
    std::vector<double> hit(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        Rng rng(replica_seed(seed, r));
        hit[r] = sample_min_multiplicity(n, rng) == 1 ? 1.0 : 0.0;
    });
    Check c = se_check("unique_minimum_probability", mc_mean(hit), 0.5, "limit value 1/2");
    if (n <= 100000) {
        const double exact = prob_unique_minimum(static_cast<unsigned>(n));
        c.info["finite_n_exact"] = exact;
        c.info["z_vs_finite_n_exact"] = (c.value.get<double>() - exact) / c.info["se"].get<double>();
    }
    out.push_back(std::move(c));
}

// --- Brownian valley ---------------------------------------------------------------------------

void run_valley(const json& s, std::uint64_t seed, unsigned threads, std::vector<Check>& out) {
    const auto as = s.at("grid_a").get<std::vector<double>>();
    const auto ts = s.at("grid_t").get<std::vector<double>>();
    const double h_tol = get_double(s, "h_tolerance");
    const double mean_tol = get_double(s, "mean_tolerance");
    const std::size_t reps = get_size(s, "mc_reps");
    const double horizon = get_double(s, "mc_horizon");
    for (double a : as) require(a > 0.0, "grid_a must be positive");
    for (double t : ts) require(t > 0.0, "grid_t must be positive");

    double worst = 0.0, printed_classical = 0.0, printed_positive = 0.0;
    double piece_fixed[4] = {0, 0, 0, 0}, piece_printed[4] = {0, 0, 0, 0};
    for (double a : as) {
        for (double t : ts) {
            const double q = h_a_quadrature(a, t);
            worst = std::max(worst, std::abs(h_a(a, t) - q));
            printed_classical = std::max(printed_classical, std::abs(h_a_printed(a, t, false) - q));
            printed_positive = std::max(printed_positive, std::abs(h_a_printed(a, t, true) - q));
            const HaPieces p = h_a_pieces(a, t);
            for (int i = 0; i < 4; ++i) {
                const double scale = std::max(1.0, std::abs(p.quadrature[i]));
                piece_fixed[i] = std::max(piece_fixed[i], std::abs(p.corrected[i] - p.quadrature[i]) / scale);
                piece_printed[i] = std::max(piece_printed[i], std::abs(p.printed[i] - p.quadrature[i]) / scale);
            }
        }
    }
    static const char* roman[4] = {"I", "II", "III", "IV"};
    json failing = json::array(), pieces = json::object();
    for (int i = 0; i < 4; ++i) {
        if (piece_printed[i] > h_tol) failing.push_back(roman[i]);
        pieces[roman[i]] = {{"printed_max_rel_error", piece_printed[i]}, {"corrected_max_rel_error", piece_fixed[i]}};
    }
    Check h = abs_check("h_closed_form_vs_2d_quadrature_max_abs", worst, 0.0, h_tol, "nested adaptive quadrature");
    h.info = {{"grid_points", as.size() * ts.size()},
              {"printed_form_max_abs_error_classical_t", printed_classical},
              {"printed_form_max_abs_error_positive_exponent_t", printed_positive},
              {"printed_pieces_failing", failing},
              {"pieces", pieces}};
    out.push_back(std::move(h));
    double fixed_worst = *std::max_element(piece_fixed, piece_fixed + 4);
    out.push_back(abs_check("h_pieces_vs_1d_quadrature_max_rel", fixed_worst, 0.0, h_tol, "1-D quadrature per piece"));

    ValleyEvaluator ev;
    const double target = valley_mean_target();
    const Estimate m = ev.valley_mean();
    Check mc = abs_check("valley_mean_vs_zeta", m.value, target, mean_tol, "-zeta(1/2)/sqrt(2 pi)");
    mc.info = {{"error_estimate", m.error_estimate}, {"converged", m.converged}, {"settings", ev.settings()}};
    if (s.at("report_product_mean").get<bool>()) {
        ValleyEvaluator prod;
        prod.method = GaMethod::product;
        prod.product_tol = 1e-7;
        prod.quad_tol = 1e-7;
        mc.info["product_formula_mean"] = prod.valley_mean().value;
    }
    out.push_back(std::move(mc));

    const ValleyMc sim = mc_valley_order_stats(1, horizon, reps, seed, threads);
    MeanEstimate me;
    me.mean = sim.mean[0];
    me.se = sim.se[0];
    me.reps = sim.reps;
    Check v = se_check("valley_mc_mean_vs_zeta", me, target, "-zeta(1/2)/sqrt(2 pi)");
    v.info["truncated"] = sim.truncated;
    out.push_back(std::move(v));
}

// --- limit laws --------------------------------------------------------------------------------

void run_asymptotics(const json& s, std::uint64_t seed, unsigned threads, std::vector<Check>& out) {
    const std::size_t k = get_size(s, "k");
    const std::size_t reps = get_size(s, "reps");
    const double rel = get_double(s, "relative_tolerance");
    require(k >= 2 && reps >= 2, "need k >= 2 and reps >= 2");
    const auto spec = IncrementSpec::gaussian(1.0);
    std::vector<double> d(reps), w(reps);
    const double rk = std::sqrt(static_cast<double>(k));
    const std::size_t budget = std::max<std::size_t>(100000000, 10000 * k);
    parallel_for(reps, threads, [&](std::size_t r) {
        const auto x = limit_order_stats(spec, k, budget, 4.0, replica_seed(seed, r));
        require(x.certified, "limit sample not certified within the draw budget");
        d[r] = (x.w[k - 1] - x.w[k - 2]) * rk;
        w[r] = x.w[k - 1] / rk;
    });
    const MeanEstimate md = mc_mean(d), mw = mc_mean(w);
    double exact_w = 0.0;
    for (std::size_t j = 1; j <= k; ++j) exact_w += 1.0 / std::sqrt(2.0 * kPi * static_cast<double>(j));
    Check a = rel_check("gap_times_sqrt_k", md.mean, 1.0 / std::sqrt(2.0 * kPi), rel, "1/sqrt(2 pi)");
    a.info = {{"se", md.se}, {"finite_k_limit", 1.0 / std::sqrt(2.0 * kPi)}};
    Check b = rel_check("shifted_order_stat_over_sqrt_k", mw.mean, std::sqrt(2.0 / kPi), rel, "sqrt(2/pi)");
    b.info = {{"se", mw.se}, {"finite_k_limit", exact_w / rk}};
    out.push_back(std::move(a));
    out.push_back(std::move(b));
}

void run_rate(const json& s, std::uint64_t seed, unsigned threads, std::vector<Check>& out) {
    RateSettings rs;
    rs.K = get_size(s, "K");
    rs.n_grid = s.at("n_grid").get<std::vector<std::size_t>>();
    rs.reps = get_size(s, "reps");
    rs.ref_reps = get_size(s, "ref_reps");
    rs.bootstrap = get_size(s, "bootstrap");
    rs.bin_width = get_double(s, "bin_width");
    rs.seed = seed;
    rs.threads = threads;
    const RateFit fit = rate_fit(IncrementSpec::parse(s.at("spec").get<std::string>()), rs);
    Check c;
    c.name = "log_tv_slope_upper_ci";
    c.value = fit.slope_hi;
    c.target = 0.0;
    c.rule = "<";
    c.provenance = "TV decays in n";
    c.passed = std::isfinite(fit.slope_hi) && fit.slope_hi < 0.0;
    c.info = fit.to_json();
    out.push_back(std::move(c));
    Check m;
    m.name = "log_tv_slope";
    m.value = fit.slope;
    m.target = get_double(s, "max_slope");
    m.rule = "<=";
    m.provenance = "decay at a measurable power";
    m.passed = fit.used >= 2 && fit.slope <= m.target.get<double>();
    out.push_back(std::move(m));
}

void add_mixture(const MixtureReport& rep, const std::string& prefix, std::vector<Check>& out) {
    for (const auto& mc : rep.checks) {
        Check c;
        c.name = prefix + mc.name;
        c.value = mc.estimate;
        c.target = mc.target;
        c.tolerance = mc.tolerance;
        c.rule = mc.rule;
        c.provenance = "component means and variances";
        c.passed = mc.passed;
        c.info = {{"se", mc.se}, {"limit_gap", rep.limit_gap}};
        out.push_back(std::move(c));
    }
}

void run_mixture(const json& s, std::uint64_t seed, unsigned threads, std::vector<Check>& out) {
    const std::size_t reps = get_size(s, "reps");
    const auto drift = IncrementSpec::parse(s.at("drifted_spec").get<std::string>());
    const auto centred = IncrementSpec::parse(s.at("centred_spec").get<std::string>());

    // E[E(X|component)^-] for the drifted mixture, from the component means
    double mu_neg = 0.0, mu_abs = 0.0;
    for (const auto& [w, c] : drift.components()) {
        mu_neg += w * std::max(0.0, -c.mean());
        mu_abs += w * std::abs(c.mean());
    }
    out.push_back(abs_check("mean_negative_part_of_component_mean", mu_neg, get_double(s, "expected_negative_part"),
                            1e-12, "closed form"));

    add_mixture(mixture_gap_checks(drift, get_size(s, "k"), get_size(s, "n"), reps, derive_seed(seed, 1), threads),
                "drifted_", out);
    const std::size_t kl = get_size(s, "k_large");
    const MixtureReport big = mixture_gap_checks(drift, kl, get_size(s, "n_large"), reps, derive_seed(seed, 2), threads);
    add_mixture(big, "drifted_large_k_", out);
    out.push_back(abs_check("limit_gap_large_k_vs_mean_abs_component_mean", big.limit_gap, mu_abs, 1e-6,
                            "E|E(X|component)|"));
    add_mixture(mixture_gap_checks(centred, get_size(s, "k_centred"), get_size(s, "n_centred"), reps,
                                   derive_seed(seed, 3), threads),
                "centred_", out);
}

using Runner = void (*)(const json&, std::uint64_t, unsigned, std::vector<Check>&);

struct Entry {
    ExperimentInfo info;
    Runner run;
};

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r = {
        {{"wendel", "order statistic law equals max (k steps) convolved with min (n-k steps), SSRW", false,
          {{"n_max", 12}}},
         run_wendel},
        {{"gap-expectation", "exact gap means, their central-term limit and palindromic symmetry, SSRW", false,
          {{"n_max", 12}}},
         run_gap_expectation},
        {{"round-trip", "both chain recovery algorithms reproduce the input path", true,
          {{"n_max", 12}, {"gaussian_paths", 10000}, {"gaussian_n", 200}}},
         run_round_trip},
        {{"feller-split", "pair split at the last argmin has the law of the Feller pair, SSRW", false,
          {{"n_max", 10}}},
         run_feller_split},
        {{"geomhits", "level-zero occupation is geometric; decomposition and branching occupation laws agree", true,
          {{"reps", 100000}, {"tv_tolerance", 0.015}, {"alpha", 0.01}}},
         run_geomhits},
        {{"eta-gf", "occupation generating function and equidistribution of three passage counts", true,
          {{"reps", 1000000},
           {"z", {0.5, 0.7}},
           {"k", {1, 2, 3}},
           {"equidistribution_reps", 100000},
           {"equidistribution_k", 2},
           {"alpha", 0.01}}},
         run_eta_gf},
        {{"unique-min", "probability that the SSRW minimum is attained once", true, {{"n", 10000}, {"reps", 100000}}},
         run_unique_min},
        {{"valley", "joint BES(3) tail closed form, valley mean and its Monte Carlo estimate", true,
          {{"grid_a", log_grid(0.05, 5.0, 7)},
           {"grid_t", log_grid(0.05, 50.0, 7)},
           {"h_tolerance", 1e-8},
           {"mean_tolerance", 1e-3},
           {"mc_reps", 1000000},
           {"mc_horizon", 1e12},
           {"report_product_mean", true}}},
         run_valley},
        {{"asymptotics", "large-k gap and order statistic scaling, gaussian limit law", true,
          {{"k", 400}, {"reps", 100000}, {"relative_tolerance", 0.05}}},
         run_asymptotics},
        {{"rate", "log-log slope of binned TV between finite-n and limit order statistics", true,
          {{"spec", "gaussian:1"},
           {"K", 1},
           {"n_grid", {100, 316, 1000, 3162, 10000}},
           {"reps", 1000000},
           {"ref_reps", 4000000},
           {"bootstrap", 200},
           {"bin_width", 0.0},
           {"max_slope", -0.2}}},
         run_rate},
        {{"mixture", "gap means for exchangeable (mixture) increments", true,
          {{"drifted_spec", "mix:0.5*gaussian:1:-1,0.5*gaussian:1:1"},
           {"expected_negative_part", 0.5},
           {"k", 5},
           {"n", 2000},
           {"k_large", 100},
           {"n_large", 5000},
           {"centred_spec", "mix:0.5*gaussian:1,0.5*gaussian:2"},
           {"k_centred", 400},
           {"n_centred", 1000},
           {"reps", 100000}}},
         run_mixture},
    };
    return r;
}

const Entry& find(const std::string& name) {
    for (const auto& e : registry())
        if (e.info.name == name) return e;
    throw Error(Status::invalid_argument, "unknown experiment '" + name + "'");
}

/// Override value converted to the type of the default, or invalid_argument.
json coerce(const std::string& key, const json& def, const json& v) {
    auto bad = [&](const char* why) { return Error(Status::invalid_argument, "setting '" + key + "' " + why); };
    if (def.is_number_integer()) {
        if (!v.is_number()) throw bad("must be a number");
        const double x = v.get<double>();
        if (x < 0 || x != std::floor(x)) throw bad("must be a non-negative integer");
        return json(static_cast<std::uint64_t>(x));
    }
    if (def.is_number_float()) {
        if (!v.is_number()) throw bad("must be a number");
        return json(v.get<double>());
    }
    if (def.type() != v.type()) throw bad("has the wrong type");
    return v;
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
    static const std::vector<ExperimentInfo> v = [] {
        std::vector<ExperimentInfo> out;
        for (const auto& e : registry()) out.push_back(e.info);
        return out;
    }();
    return v;
}

const ExperimentInfo& experiment_info(const std::string& name) { return find(name).info; }

ExperimentReport run_experiment(const std::string& name, const nlohmann::json& overrides, std::uint64_t seed,
                                unsigned threads) {
    const Entry& e = find(name);
    json settings = e.info.defaults;
    if (!overrides.is_null()) {
        require(overrides.is_object(), "overrides must be a JSON object");
        for (const auto& [k, v] : overrides.items()) {
            if (!settings.contains(k)) throw Error(Status::invalid_argument, "experiment '" + name + "' has no setting '" + k + "'");
            settings[k] = coerce(k, settings[k], v);
        }
    }
    ExperimentReport rep;
    rep.name = name;
    rep.settings = settings;
    rep.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    e.run(settings, derive_seed(seed, 0), threads, rep.checks);
    rep.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.passed = !rep.checks.empty();
    for (const auto& c : rep.checks) rep.passed = rep.passed && c.passed;
    return rep;
}

}  // namespace rwos
