#include "rwos.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "rwos/error.hpp"
#include "rwos/experiments.hpp"
#include "rwos/feller.hpp"
#include "rwos/parallel.hpp"
#include "rwos/ssrw_exact.hpp"
#include "rwos/stats.hpp"
#include "rwos/valley.hpp"
#include "rwos/walk.hpp"

struct rwos_context {
    unsigned threads = 1;
    std::string last_error;
};

struct rwos_walk {
    rwos::WalkPath path;
};

namespace {

using json = nlohmann::json;
using rwos::Error;
using rwos::Status;

template <class F>
rwos_status guarded(rwos_context* ctx, F&& body) {
    if (!ctx) return RWOS_INVALID_ARGUMENT;
    ctx->last_error.clear();
    try {
        body();
        return RWOS_OK;
    } catch (const Error& e) {
        ctx->last_error = e.what();
        return static_cast<rwos_status>(e.code());
    } catch (const json::exception& e) {
        ctx->last_error = std::string("bad JSON: ") + e.what();
        return RWOS_INVALID_ARGUMENT;
    } catch (const std::invalid_argument& e) {
        ctx->last_error = e.what();
        return RWOS_INVALID_ARGUMENT;
    } catch (const std::out_of_range& e) {
        ctx->last_error = e.what();
        return RWOS_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        ctx->last_error = "out of memory";
        return RWOS_INTERNAL;
    } catch (const std::exception& e) {
        ctx->last_error = e.what();
        return RWOS_INTERNAL;
    }
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

void need(const void* p, const char* what) {
    if (!p) throw Error(Status::invalid_argument, std::string(what) + " must not be null");
}

json parse_params(const char* text) {
    if (!text || !*text) return json::object();
    json j = json::parse(text);
    rwos::require(j.is_object(), "parameters must be a JSON object");
    return j;
}

template <class T>
T opt(const json& p, const char* key, T fallback) {
    return p.contains(key) ? p.at(key).get<T>() : fallback;
}

template <class T>
T req(const json& p, const char* key) {
    if (!p.contains(key)) throw Error(Status::invalid_argument, std::string("missing parameter '") + key + "'");
    return p.at(key).get<T>();
}

unsigned req_uint(const json& p, const char* key) {
    const json& v = p.contains(key) ? p.at(key) : json();
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw Error(Status::invalid_argument, std::string("parameter '") + key + "' must be a non-negative integer");
    return v.get<unsigned>();
}

rwos::Rational parse_rational(const std::string& s) {
    rwos::Rational q;
    if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0)
        throw Error(Status::invalid_argument, "not a rational number: " + s);
    q.canonicalize();
    return q;
}

json with_schema(json j) {
    j["schema"] = 1;
    return j;
}

// --- exact ---------------------------------------------------------------------------------------

json exact_op(const std::string& op, const json& p) {
    using namespace rwos;
    json out = {{"op", op}, {"params", p}};
    // rational argument keeps the result exact; a number gives a double
    auto gf_like = [&](auto exact_fn, auto float_fn) {
        const unsigned k = req_uint(p, "k");
        const char* name = p.contains("z") ? "z" : "x";
        const json& z = p.at(name);
        if (z.is_string()) out["value"] = to_string(exact_fn(k, parse_rational(z.get<std::string>())));
        else out["value"] = float_fn(k, z.get<double>());
    };
    if (op == "u") {
        out["value"] = to_string(central_term(req_uint(p, "m")));
    } else if (op == "ed") {
        const unsigned k = req_uint(p, "k");
        require(k >= 1, "k must be at least 1");
        out["value"] = to_string(expected_gap_limit(k));
    } else if (op == "cheb") {
        gf_like([](unsigned k, const Rational& x) { return chebyshev_v(k, x); },
                [](unsigned k, double x) { return chebyshev_v(k, x); });
    } else if (op == "gf") {
        gf_like([](unsigned k, const Rational& z) { return passage_gf(k, z); },
                [](unsigned k, double z) { return passage_gf(k, z); });
    } else if (op == "eta-gf") {
        gf_like([](unsigned k, const Rational& z) { return eta_gf(k, z); },
                [](unsigned k, double z) { return eta_gf(k, z); });
    } else if (op == "enumerate") {
        const unsigned n = req_uint(p, "n");
        const Statistic st = Statistic::parse(req<std::string>(p, "stat"));
        out["statistic"] = st.describe();
        out["pmf"] = enumerate_walks(n, st).to_json();
    } else if (op == "wendel") {
        const unsigned k = req_uint(p, "k"), n = req_uint(p, "n");
        require(k <= n, "need k <= n");
        const ExactPmf w = wendel_convolution(k, n);
        out["pmf"] = w.to_json();
        if (n <= kMaxEnumerate) {
            Statistic st;
            st.kind = Statistic::Kind::order_stat;
            st.k = k;
            out["equals_enumeration"] = w == enumerate_walks(n, st);
        }
    } else if (op == "spitzer") {
        const unsigned n = req_uint(p, "n");
        out["value"] = to_string(spitzer_expected_max(n));
        if (n <= 20) {
            Statistic st;
            st.kind = Statistic::Kind::max;
            out["enumerated"] = to_string(enumerate_walks(n, st).mean());
        }
    } else {
        throw Error(Status::invalid_argument, "unknown exact op '" + op + "'");
    }
    return out;
}

// --- valley --------------------------------------------------------------------------------------

rwos::ValleyEvaluator evaluator(const json& p) {
    rwos::ValleyEvaluator ev;
    if (p.contains("tol")) {
        const double tol = p.at("tol").get<double>();
        rwos::require(tol > 0 && tol < 1, "tol must lie in (0, 1)");
        ev.quad_tol = tol / 10.0;
        ev.mean_cutoff_tail = std::min(ev.mean_cutoff_tail, tol / 10.0);
    }
    const std::string m = opt<std::string>(p, "method", "transfer");
    if (m == "product") ev.method = rwos::GaMethod::product;
    else rwos::require(m == "transfer", "method must be transfer or product");
    ev.validate();
    return ev;
}

json estimate_json(const rwos::Estimate& e, const rwos::ValleyEvaluator& ev) {
    return {{"value", e.value},
            {"error_estimate", e.error_estimate},
            {"converged", e.converged},
            {"settings", ev.settings()}};
}

json valley_op(const std::string& op, const json& p, unsigned threads) {
    using namespace rwos;
    json out = {{"op", op}};
    if (op == "h") {
        const double a = req<double>(p, "a"), t = req<double>(p, "t");
        require(a > 0 && t > 0, "a and t must be positive");
        const double q = h_a_quadrature(a, t);
        out.update({{"value", h_a(a, t)}, {"quadrature", q}, {"error_estimate", std::abs(h_a(a, t) - q)},
                    {"k_a", k_a(a, t)}, {"settings", {{"a", a}, {"t", t}}}});
    } else if (op == "pieces") {
        const double a = req<double>(p, "a"), t = req<double>(p, "t");
        require(a > 0 && t > 0, "a and t must be positive");
        const HaPieces hp = h_a_pieces(a, t);
        out.update({{"printed", hp.printed},
                    {"corrected", hp.corrected},
                    {"quadrature", hp.quadrature},
                    {"printed_total_classical_t", h_a_printed(a, t, false)},
                    {"printed_total_positive_exponent_t", h_a_printed(a, t, true)},
                    {"value", h_a(a, t)},
                    {"settings", {{"a", a}, {"t", t}}}});
    } else if (op == "tail") {
        const ValleyEvaluator ev = evaluator(p);
        const double a = req<double>(p, "a");
        require(a >= 0, "a must be non-negative");
        out.update(estimate_json(ev.valley_tail(a), ev));
        out["settings"]["a"] = a;
    } else if (op == "mean") {
        const ValleyEvaluator ev = evaluator(p);
        out.update(estimate_json(ev.valley_mean(), ev));
        out["target"] = valley_mean_target();
    } else if (op == "mc") {
        const auto K = opt<std::size_t>(p, "K", 0);
        const auto reps = req<std::size_t>(p, "reps");
        const double horizon = opt<double>(p, "horizon", 1e12);
        const auto seed = req<std::uint64_t>(p, "seed");
        const ValleyMc mc = mc_valley_order_stats(K, horizon, reps, seed, threads);
        out.update(mc.to_json(opt<bool>(p, "include_samples", false)));
        out["value"] = mc.mean.at(0);
        out["error_estimate"] = mc.se.at(0);
    } else if (op == "discretization") {
        const Discretization d = discretization_experiment(req<std::size_t>(p, "n"), opt<std::size_t>(p, "substeps", 1000),
                                                           req<std::size_t>(p, "reps"), req<std::uint64_t>(p, "seed"),
                                                           opt<bool>(p, "exact_bridge", false), threads);
        out.update(d.to_json(opt<bool>(p, "include_samples", false)));
        out["value"] = d.mean;
        out["error_estimate"] = d.se;
    } else {
        throw Error(Status::invalid_argument, "unknown valley op '" + op + "'");
    }
    return out;
}

json limit_op(const json& p, unsigned threads) {
    using namespace rwos;
    const IncrementSpec spec = IncrementSpec::parse(req<std::string>(p, "spec"));
    const auto K = req<std::size_t>(p, "K");
    const auto reps = opt<std::size_t>(p, "reps", 1);
    const auto seed = req<std::uint64_t>(p, "seed");
    const auto horizon = opt<std::size_t>(p, "max_horizon", 100000000);
    const double safety = opt<double>(p, "safety", 4.0);
    const std::string m = opt<std::string>(p, "method", "ladder-segments");
    LimitMethod method = LimitMethod::ladder_segments;
    if (m == "walk-decomposition") method = LimitMethod::walk_decomposition;
    else require(m == "ladder-segments", "method must be ladder-segments or walk-decomposition");
    require(K >= 1 && reps >= 1, "K and reps must be positive");

    std::vector<LimitOrderStats> rows(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        rows[r] = limit_order_stats(spec, K, horizon, safety, replica_seed(seed, r), method);
    });
    json samples = json::array();
    std::vector<double> mean(K, 0.0);
    std::size_t uncertified = 0;
    for (const auto& r : rows) {
        samples.push_back(r.to_json());
        for (std::size_t i = 0; i < K; ++i) mean[i] += r.w[i] / static_cast<double>(reps);
        uncertified += !r.certified;
    }
    return {{"spec", spec.to_json()}, {"K", K},       {"reps", reps},   {"seed", seed},
            {"method", m},            {"mean", mean}, {"uncertified", uncertified}, {"samples", samples}};
}

}  // namespace

extern "C" {

const char* rwos_version(void) { return "1.0.0"; }

const char* rwos_status_name(rwos_status s) { return rwos::status_name(static_cast<Status>(s)); }

rwos_status rwos_context_new(rwos_context** out) {
    if (!out) return RWOS_INVALID_ARGUMENT;
    *out = new (std::nothrow) rwos_context();
    return *out ? RWOS_OK : RWOS_INTERNAL;
}

void rwos_context_free(rwos_context* ctx) { delete ctx; }

rwos_status rwos_context_set_threads(rwos_context* ctx, unsigned threads) {
    return guarded(ctx, [&] { ctx->threads = threads; });
}

const char* rwos_last_error(const rwos_context* ctx) { return ctx ? ctx->last_error.c_str() : "null context"; }

void rwos_free_string(char* s) { std::free(s); }

rwos_status rwos_walk_simulate(rwos_context* ctx, const char* spec, size_t n, uint64_t seed, rwos_walk** out) {
    return guarded(ctx, [&] {
        need(spec, "spec");
        need(out, "out");
        *out = new rwos_walk{rwos::sample_path(rwos::IncrementSpec::parse(spec), n, seed)};
    });
}

rwos_status rwos_walk_parse(rwos_context* ctx, const char* text, const char* format, rwos_walk** out) {
    return guarded(ctx, [&] {
        need(text, "text");
        need(format, "format");
        need(out, "out");
        const std::string f = format;
        if (f == "json") *out = new rwos_walk{rwos::WalkPath::from_json(json::parse(text))};
        else if (f == "csv") *out = new rwos_walk{rwos::WalkPath::from_csv(text)};
        else throw Error(Status::invalid_argument, "format must be json or csv");
    });
}

rwos_status rwos_walk_from_increments(rwos_context* ctx, const double* x, size_t n, rwos_walk** out) {
    return guarded(ctx, [&] {
        need(out, "out");
        if (n) need(x, "x");
        *out = new rwos_walk{rwos::WalkPath(std::vector<double>(x, x + n))};
    });
}

void rwos_walk_free(rwos_walk* w) { delete w; }

size_t rwos_walk_length(const rwos_walk* w) { return w ? w->path.size() : 0; }

rwos_status rwos_walk_sums(rwos_context* ctx, const rwos_walk* w, double* out, size_t capacity) {
    return guarded(ctx, [&] {
        need(w, "walk");
        need(out, "out");
        const auto& s = w->path.sums();
        rwos::require(capacity >= s.size(), "output buffer too small");
        std::copy(s.begin(), s.end(), out);
    });
}

rwos_status rwos_walk_serialize(rwos_context* ctx, const rwos_walk* w, const char* format, char** out) {
    return guarded(ctx, [&] {
        need(w, "walk");
        need(format, "format");
        need(out, "out");
        const std::string f = format;
        if (f == "json") *out = dup(with_schema(w->path.to_json()).dump());
        else if (f == "csv") *out = dup(w->path.to_csv());
        else throw Error(Status::invalid_argument, "format must be json or csv");
    });
}

rwos_status rwos_walk_order_stats(rwos_context* ctx, const rwos_walk* w, char** out_json) {
    return guarded(ctx, [&] {
        need(w, "walk");
        need(out_json, "out_json");
        const rwos::OrderStats o = rwos::order_statistics(w->path);
        *out_json = dup(with_schema({{"n", w->path.size()},
                                     {"values", o.values},
                                     {"gaps", o.gaps},
                                     {"shifted", o.shifted},
                                     {"min", o.min},
                                     {"max", o.max},
                                     {"argmin_last", o.argmin_last}})
                            .dump());
    });
}

rwos_status rwos_feller_decompose(rwos_context* ctx, const rwos_walk* w, char** out_json) {
    return guarded(ctx, [&] {
        need(w, "walk");
        need(out_json, "out_json");
        *out_json = dup(with_schema(rwos::decompose(w->path).to_json()).dump());
    });
}

rwos_status rwos_feller_recover(rwos_context* ctx, const char* pair_json, rwos_walk** out) {
    return guarded(ctx, [&] {
        need(pair_json, "pair_json");
        need(out, "out");
        *out = new rwos_walk{rwos::recover_reverse_induction(rwos::FellerPair::from_json(json::parse(pair_json)))};
    });
}

rwos_status rwos_feller_segments(rwos_context* ctx, const rwos_walk* w, size_t horizon, char** out_json) {
    return guarded(ctx, [&] {
        need(w, "walk");
        need(out_json, "out_json");
        const rwos::FellerPair fp = rwos::decompose(w->path);
        const std::size_t h = horizon ? horizon : std::numeric_limits<std::size_t>::max();
        *out_json = dup(
            with_schema({{"ascending", rwos::segments_to_json(rwos::chain_segments(fp.up, rwos::SegmentKind::ascending, h))},
                         {"descending",
                          rwos::segments_to_json(rwos::chain_segments(fp.down, rwos::SegmentKind::descending, h))}})
                .dump());
    });
}

rwos_status rwos_feller_riffle(rwos_context* ctx, const char* segments_json, rwos_walk** out) {
    return guarded(ctx, [&] {
        need(segments_json, "segments_json");
        need(out, "out");
        const json j = json::parse(segments_json);
        rwos::require(j.contains("ascending") && j.contains("descending"), "need ascending and descending segment lists");
        *out = new rwos_walk{
            rwos::riffle_reconstruct(rwos::segments_from_json(j.at("ascending"), rwos::SegmentKind::ascending),
                                     rwos::segments_from_json(j.at("descending"), rwos::SegmentKind::descending))};
    });
}

rwos_status rwos_limit_order_stats(rwos_context* ctx, const char* params_json, char** out_json) {
    return guarded(ctx, [&] {
        need(out_json, "out_json");
        *out_json = dup(with_schema(limit_op(parse_params(params_json), ctx->threads)).dump());
    });
}

rwos_status rwos_exact_ssrw(rwos_context* ctx, const char* op, const char* params_json, char** out_json) {
    return guarded(ctx, [&] {
        need(op, "op");
        need(out_json, "out_json");
        *out_json = dup(with_schema(exact_op(op, parse_params(params_json))).dump());
    });
}

rwos_status rwos_valley(rwos_context* ctx, const char* op, const char* params_json, char** out_json) {
    return guarded(ctx, [&] {
        need(op, "op");
        need(out_json, "out_json");
        *out_json = dup(with_schema(valley_op(op, parse_params(params_json), ctx->threads)).dump());
    });
}

rwos_status rwos_verify_list(rwos_context* ctx, char** out_json) {
    return guarded(ctx, [&] {
        need(out_json, "out_json");
        json arr = json::array();
        for (const auto& e : rwos::experiments())
            arr.push_back({{"name", e.name}, {"summary", e.summary}, {"stochastic", e.stochastic}, {"defaults", e.defaults}});
        *out_json = dup(with_schema({{"experiments", arr}}).dump());
    });
}

rwos_status rwos_verify_run(rwos_context* ctx, const char* name, const char* overrides_json, uint64_t seed,
                            char** report_json, int* passed) {
    return guarded(ctx, [&] {
        need(name, "name");
        need(report_json, "report_json");
        const json ov = overrides_json && *overrides_json ? json::parse(overrides_json) : json();
        const rwos::ExperimentReport r = rwos::run_experiment(name, ov, seed, ctx->threads);
        *report_json = dup(r.to_json().dump());
        if (passed) *passed = r.passed ? 1 : 0;
    });
}

}  // extern "C"
