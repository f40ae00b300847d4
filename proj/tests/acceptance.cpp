// Acceptance suite: runs every verification experiment through the C API with the pre-declared
// seed and prints one PASS/FAIL line per criterion. A criterion fails if any of its checks fails
// or it exceeds its wall-clock budget. Full reports go to the path in argv[1], if given.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "rwos.h"

namespace {

constexpr std::uint64_t kSeed = 20261019;

struct Criterion {
    int id;
    const char* experiment;
    double budget_s;
};

constexpr Criterion kCriteria[] = {
    {1, "wendel", 30},        {2, "gap-expectation", 30}, {3, "round-trip", 60}, {4, "feller-split", 60},
    {5, "geomhits", 120},     {6, "eta-gf", 300},         {7, "unique-min", 300}, {8, "valley", 600},
    {9, "asymptotics", 600},  {10, "rate", 900},          {11, "mixture", 600},
};

}  // namespace

int main(int argc, char** argv) {
    rwos_context* ctx = nullptr;
    if (rwos_context_new(&ctx) != RWOS_OK) return 2;
    rwos_context_set_threads(ctx, 0);
    nlohmann::json all = nlohmann::json::array();
    int failed = 0;
    for (const Criterion& c : kCriteria) {
        const auto t0 = std::chrono::steady_clock::now();
        char* report = nullptr;
        int passed = 0;
        const rwos_status st = rwos_verify_run(ctx, c.experiment, nullptr, kSeed, &report, &passed);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string detail;
        if (st != RWOS_OK) {
            detail = std::string(rwos_status_name(st)) + ": " + rwos_last_error(ctx);
            passed = 0;
        } else {
            const auto j = nlohmann::json::parse(report);
            rwos_free_string(report);
            int n = 0, ok = 0;
            for (const auto& chk : j["checks"]) {
                ++n;
                if (chk["passed"].get<bool>()) ++ok;
                else detail += " failed:" + chk["name"].get<std::string>();
            }
            detail = std::to_string(ok) + "/" + std::to_string(n) + " checks" + detail;
            all.push_back(j);
        }
        const bool in_budget = secs < c.budget_s;
        if (!in_budget) detail += " over budget";
        const bool ok = passed && in_budget;
        failed += !ok;
        std::printf("criterion %2d %-16s %s  %s  %.1f s (budget %.0f s)\n", c.id, c.experiment, ok ? "PASS" : "FAIL",
                    detail.c_str(), secs, c.budget_s);
        std::fflush(stdout);
    }
    rwos_context_free(ctx);
    if (argc > 1) std::ofstream(argv[1]) << all.dump(2) << '\n';
    std::printf("%d/%zu criteria passed (seed %llu)\n", int(std::size(kCriteria)) - failed, std::size(kCriteria),
                static_cast<unsigned long long>(kSeed));
    return failed == 0 ? 0 : 1;
}
