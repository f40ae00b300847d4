#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwos.h"

using nlohmann::json;

namespace {

struct Ctx {
    rwos_context* c = nullptr;
    Ctx() { REQUIRE(rwos_context_new(&c) == RWOS_OK); }
    ~Ctx() { rwos_context_free(c); }
};

json take(char* s) {
    json j = json::parse(s);
    rwos_free_string(s);
    return j;
}

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(rwos_version()).size() > 0);
    CHECK(std::string(rwos_status_name(RWOS_OK)) == "ok");
    CHECK(std::string(rwos_status_name(RWOS_INVALID_ARGUMENT)) == "invalid argument");
}

TEST_CASE("null arguments are reported, not dereferenced") {
    Ctx ctx;
    CHECK(rwos_context_new(nullptr) == RWOS_INVALID_ARGUMENT);
    rwos_walk* w = nullptr;
    CHECK(rwos_walk_simulate(ctx.c, nullptr, 10, 1, &w) == RWOS_INVALID_ARGUMENT);
    CHECK(std::string(rwos_last_error(ctx.c)).size() > 0);
    CHECK(rwos_walk_simulate(ctx.c, "gaussian:1", 10, 1, nullptr) == RWOS_INVALID_ARGUMENT);
    CHECK(rwos_walk_order_stats(ctx.c, nullptr, nullptr) == RWOS_INVALID_ARGUMENT);
    rwos_walk_free(nullptr);
    rwos_free_string(nullptr);
}

TEST_CASE("walk round trip through the C API") {
    Ctx ctx;
    const double x[] = {1.0, -2.0, 0.5};
    rwos_walk* w = nullptr;
    REQUIRE(rwos_walk_from_increments(ctx.c, x, 3, &w) == RWOS_OK);
    CHECK(rwos_walk_length(w) == 3);
    double s[4];
    REQUIRE(rwos_walk_sums(ctx.c, w, s, 4) == RWOS_OK);
    CHECK(s[2] == -1.0);
    CHECK(rwos_walk_sums(ctx.c, w, s, 3) == RWOS_INVALID_ARGUMENT);

    char* out = nullptr;
    REQUIRE(rwos_walk_order_stats(ctx.c, w, &out) == RWOS_OK);
    const json o = take(out);
    CHECK(o["schema"] == 1);
    CHECK(o["gaps"] == json({0.5, 0.5, 1.0}));
    CHECK(o["argmin_last"] == 2);

    for (const char* fmt : {"json", "csv"}) {
        REQUIRE(rwos_walk_serialize(ctx.c, w, fmt, &out) == RWOS_OK);
        rwos_walk* back = nullptr;
        REQUIRE(rwos_walk_parse(ctx.c, out, fmt, &back) == RWOS_OK);
        rwos_free_string(out);
        CHECK(rwos_walk_length(back) == 3);
        rwos_walk_free(back);
    }
    CHECK(rwos_walk_serialize(ctx.c, w, "xml", &out) == RWOS_INVALID_ARGUMENT);
    rwos_walk_free(w);
}

TEST_CASE("bad specs and malformed input map to error codes") {
    Ctx ctx;
    rwos_walk* w = nullptr;
    CHECK(rwos_walk_simulate(ctx.c, "gaussian:-1", 10, 1, &w) == RWOS_INVALID_ARGUMENT);
    CHECK(w == nullptr);
    CHECK(rwos_walk_parse(ctx.c, "{not json", "json", &w) == RWOS_INVALID_ARGUMENT);
    CHECK(rwos_walk_parse(ctx.c, "y\n1\n", "csv", &w) == RWOS_INVALID_ARGUMENT);
    char* out = nullptr;
    CHECK(rwos_limit_order_stats(ctx.c, R"({"spec":"gaussian:1","K":1})", &out) == RWOS_INVALID_ARGUMENT);
    CHECK(std::string(rwos_last_error(ctx.c)).find("seed") != std::string::npos);
    CHECK(rwos_exact_ssrw(ctx.c, "nope", "{}", &out) == RWOS_INVALID_ARGUMENT);
    CHECK(rwos_valley(ctx.c, "h", R"({"a":-1,"t":1})", &out) == RWOS_INVALID_ARGUMENT);
}

TEST_CASE("Feller decomposition, recovery and riffle through the C API") {
    Ctx ctx;
    rwos_walk* w = nullptr;
    REQUIRE(rwos_walk_simulate(ctx.c, "gaussian:1", 300, 9, &w) == RWOS_OK);
    std::vector<double> s(301), s2(301), s3(301);
    rwos_walk_sums(ctx.c, w, s.data(), s.size());

    char* pair = nullptr;
    REQUIRE(rwos_feller_decompose(ctx.c, w, &pair) == RWOS_OK);
    rwos_walk* rec = nullptr;
    REQUIRE(rwos_feller_recover(ctx.c, pair, &rec) == RWOS_OK);
    rwos_free_string(pair);
    rwos_walk_sums(ctx.c, rec, s2.data(), s2.size());
    CHECK(s2 == s);

    char* segs = nullptr;
    REQUIRE(rwos_feller_segments(ctx.c, w, 0, &segs) == RWOS_OK);
    rwos_walk* rif = nullptr;
    REQUIRE(rwos_feller_riffle(ctx.c, segs, &rif) == RWOS_OK);
    rwos_free_string(segs);
    rwos_walk_sums(ctx.c, rif, s3.data(), s3.size());
    CHECK(s3 == s);
    rwos_walk_free(w);
    rwos_walk_free(rec);
    rwos_walk_free(rif);
}

TEST_CASE("exact SSRW operations") {
    Ctx ctx;
    char* out = nullptr;
    REQUIRE(rwos_exact_ssrw(ctx.c, "ed", R"({"k":4})", &out) == RWOS_OK);
    CHECK(take(out)["value"] == "3/16");
    REQUIRE(rwos_exact_ssrw(ctx.c, "wendel", R"({"k":2,"n":6})", &out) == RWOS_OK);
    CHECK(take(out)["equals_enumeration"] == true);
    REQUIRE(rwos_exact_ssrw(ctx.c, "eta-gf", R"({"k":1,"z":"1/2"})", &out) == RWOS_OK);
    CHECK(take(out)["value"] == "1/33");
}

TEST_CASE("valley and limit operations") {
    Ctx ctx;
    char* out = nullptr;
    REQUIRE(rwos_valley(ctx.c, "mean", R"({"tol":1e-3})", &out) == RWOS_OK);
    const json m = take(out);
    CHECK(std::abs(m["value"].get<double>() - 0.5825971579390) < 1e-3);
    REQUIRE(rwos_valley(ctx.c, "h", R"({"a":1,"t":2})", &out) == RWOS_OK);
    CHECK(take(out)["error_estimate"].get<double>() < 1e-9);
    REQUIRE(rwos_limit_order_stats(ctx.c, R"({"spec":"ssrw","K":2,"reps":10,"seed":3})", &out) == RWOS_OK);
    const json l = take(out);
    CHECK(l["samples"].size() == 10);
}

TEST_CASE("verification registry and reproducible reports") {
    Ctx ctx;
    char* out = nullptr;
    REQUIRE(rwos_verify_list(ctx.c, &out) == RWOS_OK);
    CHECK(take(out)["experiments"].size() == 11);

    int passed = 0;
    REQUIRE(rwos_verify_run(ctx.c, "wendel", R"({"n_max":6})", 0, &out, &passed) == RWOS_OK);
    CHECK(passed == 1);
    rwos_free_string(out);

    CHECK(rwos_verify_run(ctx.c, "no-such-experiment", nullptr, 0, &out, &passed) == RWOS_INVALID_ARGUMENT);
    CHECK(rwos_verify_run(ctx.c, "wendel", R"({"bogus":1})", 0, &out, &passed) == RWOS_INVALID_ARGUMENT);
    CHECK(rwos_verify_run(ctx.c, "wendel", R"({"n_max":"x"})", 0, &out, &passed) == RWOS_INVALID_ARGUMENT);

    const char* small = R"({"reps":2000,"equidistribution_reps":2000})";
    REQUIRE(rwos_verify_run(ctx.c, "eta-gf", small, 5, &out, &passed) == RWOS_OK);
    json a = take(out);
    REQUIRE(rwos_context_set_threads(ctx.c, 3) == RWOS_OK);
    REQUIRE(rwos_verify_run(ctx.c, "eta-gf", small, 5, &out, &passed) == RWOS_OK);
    json b = take(out);
    a.erase("wall_clock");
    b.erase("wall_clock");
    CHECK(a.dump() == b.dump());
}
