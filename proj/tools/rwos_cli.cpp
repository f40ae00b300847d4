// Command-line front end. Talks to the library only through the C API in rwos.h.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rwos.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBreach = 3;

const char* kHelpFooter = R"(Exit codes: 0 success, 2 validation error, 3 experiment failure (tolerance breach),
1 other library failure.

Output goes to stdout unless --out is given. A relative --out path is resolved against
$RWOS_OUTPUT_DIR when that variable is set.

CSV columns:
  simulate                 k,x,s          step index, increment X_k (empty for k=0), partial sum S_k
  feller recover|riffle    k,x,s          as simulate
  limit / feller limit     rep,w1..wK     one row per replica
  exact enumerate|wendel   key,numerator,denominator   one row per support point, keys joined by ';'
  verify                   experiment,check,value,target,tolerance,rule,passed
  anything else            key,value      top-level scalar fields of the JSON report)";

struct CliError {
    int code;
    std::string message;
};

class Library {
public:
    Library() {
        if (rwos_context_new(&ctx_) != RWOS_OK) throw CliError{kExitFailure, "cannot create library context"};
    }
    ~Library() { rwos_context_free(ctx_); }
    Library(const Library&) = delete;
    Library& operator=(const Library&) = delete;

    rwos_context* ctx() const { return ctx_; }

    void check(rwos_status s) const {
        if (s == RWOS_OK) return;
        const int code = s == RWOS_INVALID_ARGUMENT || s == RWOS_INCONSISTENT || s == RWOS_IO_ERROR ? kExitValidation
                                                                                                     : kExitFailure;
        throw CliError{code, std::string(rwos_status_name(s)) + ": " + rwos_last_error(ctx_)};
    }

    json take_json(char* s) const {
        std::string text(s);
        rwos_free_string(s);
        return json::parse(text);
    }

private:
    rwos_context* ctx_ = nullptr;
};

struct WalkHandle {
    rwos_walk* w = nullptr;
    WalkHandle() = default;
    WalkHandle(const WalkHandle&) = delete;
    WalkHandle& operator=(const WalkHandle&) = delete;
    ~WalkHandle() { rwos_walk_free(w); }
};

struct Global {
    unsigned threads = 1;
    std::string out;
    std::string format = "json";
    std::vector<std::string> argv;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{kExitValidation, "cannot read " + path};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string csv_walk(const json& walk) {
    const auto x = walk.at("increments").get<std::vector<double>>();
    std::ostringstream os;
    os.precision(17);
    os << "k,x,s\n0,,0\n";
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += x[i];
        os << i + 1 << ',' << x[i] << ',' << s << '\n';
    }
    return os.str();
}

std::string csv_pmf(const json& pmf) {
    // one common denominator for the whole support
    const std::string den = scalar_text(pmf.at("denominator"));
    std::ostringstream os;
    os << "key,numerator,denominator\n";
    const auto& sup = pmf.at("support");
    for (std::size_t i = 0; i < sup.size(); ++i) {
        std::string key;
        if (sup[i].is_array()) {
            for (std::size_t j = 0; j < sup[i].size(); ++j) key += (j ? ";" : "") + sup[i][j].dump();
        } else {
            key = sup[i].dump();
        }
        os << key << ',' << scalar_text(pmf.at("numerator")[i]) << ',' << den << '\n';
    }
    return os.str();
}

std::string csv_flat(const json& j) {
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : j.items())
        if (v.is_primitive()) os << k << ',' << scalar_text(v) << '\n';
    return os.str();
}

std::string csv_verify(const json& reports) {
    std::ostringstream os;
    os << "experiment,check,value,target,tolerance,rule,passed\n";
    for (const auto& r : reports) {
        for (const auto& c : r.at("checks"))
            os << r.at("name").get<std::string>() << ',' << c.at("name").get<std::string>() << ','
               << scalar_text(c.at("value")) << ',' << scalar_text(c.at("target")) << ',' << c.at("tolerance").dump()
               << ',' << c.at("rule").get<std::string>() << ',' << (c.at("passed").get<bool>() ? "true" : "false")
               << '\n';
    }
    return os.str();
}

std::filesystem::path output_path(const std::string& out) {
    std::filesystem::path p(out);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("RWOS_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
    }
    return p;
}

void emit(const Global& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        std::cout.flush();
        return;
    }
    const auto p = output_path(g.out);
    std::ofstream f(p);
    if (!f) throw CliError{kExitValidation, "cannot write " + p.string()};
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
    if (!f) throw CliError{kExitValidation, "cannot write " + p.string()};
}

void emit_json(const Global& g, json j) {
    j["schema"] = 1;
    j["argv"] = g.argv;
    emit(g, j.dump(2));
}

/// CSV if requested, else JSON. csv may be empty to use the generic flattening.
void emit_report(const Global& g, const json& j, const std::string& csv = {}) {
    if (g.format == "csv") emit(g, csv.empty() ? csv_flat(j) : csv);
    else emit_json(g, j);
}

json walk_json(const Library& lib, rwos_walk* w) {
    char* s = nullptr;
    lib.check(rwos_walk_serialize(lib.ctx(), w, "json", &s));
    return lib.take_json(s);
}

/// Walk from --input (JSON or CSV by extension/content) or from --spec/--n/--seed.
void load_walk(const Library& lib, const std::string& input, const std::string& spec, std::optional<std::size_t> n,
               std::optional<std::uint64_t> seed, WalkHandle& h) {
    if (!input.empty()) {
        const std::string text = read_file(input);
        const bool is_json = text.find('{') != std::string::npos;
        lib.check(rwos_walk_parse(lib.ctx(), text.c_str(), is_json ? "json" : "csv", &h.w));
        return;
    }
    if (spec.empty() || !n || !seed)
        throw CliError{kExitValidation, "give --input, or --spec with --n and --seed"};
    lib.check(rwos_walk_simulate(lib.ctx(), spec.c_str(), *n, *seed, &h.w));
}

json parse_set_value(const std::string& v) {
    try {
        return json::parse(v);
    } catch (const json::exception&) {
        return json(v);
    }
}

}  // namespace

int main(int argc, char** argv) {
    Global g;
    for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);

    CLI::App app{"Random-walk extreme order statistics: simulation, Feller chains, exact SSRW identities, "
                 "Brownian valley numerics and verification experiments."};
    app.footer(kHelpFooter);
    app.set_config("--config", "", "TOML/INI file with option values");
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    app.add_option("--threads", g.threads, "worker threads (0 = all hardware threads)")->capture_default_str();
    app.add_option("--out", g.out, "output file (default stdout)");
    app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    std::function<void(Library&)> action;

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate one walk and its order statistics");
    std::string sim_spec;
    std::size_t sim_n = 0;
    std::uint64_t sim_seed = 0;
    sim->add_option("--spec", sim_spec, "increment law: ssrw | gaussian:S[:M] | laplace:B | mix:W*SPEC,...")->required();
    sim->add_option("--n", sim_n, "number of steps")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "RNG seed")->required();
    sim->callback([&] {
        action = [&](Library& lib) {
            WalkHandle h;
            lib.check(rwos_walk_simulate(lib.ctx(), sim_spec.c_str(), sim_n, sim_seed, &h.w));
            char* os = nullptr;
            lib.check(rwos_walk_order_stats(lib.ctx(), h.w, &os));
            const json path = walk_json(lib, h.w);
            json out = {{"spec", sim_spec}, {"n", sim_n}, {"seed", sim_seed}, {"path", path},
                        {"order_stats", lib.take_json(os)}};
            emit_report(g, out, csv_walk(path));
        };
    });

    // feller
    auto* fel = app.add_subcommand("feller", "Feller chain decomposition, recovery and limit laws");
    fel->require_subcommand(1);
    std::string f_input, f_spec;
    std::optional<std::size_t> f_n;
    std::optional<std::uint64_t> f_seed;
    std::size_t f_horizon = 0;
    auto add_walk_source = [&](CLI::App* c) {
        c->add_option("--input", f_input, "walk file, JSON {\"increments\":[...]} or CSV with header x");
        c->add_option("--spec", f_spec, "increment law, to simulate instead of reading");
        c->add_option("--n", f_n, "steps to simulate");
        c->add_option("--seed", f_seed, "RNG seed for simulation");
    };
    auto* f_dec = fel->add_subcommand("decompose", "split a walk into its upward and downward Feller chains");
    add_walk_source(f_dec);
    f_dec->callback([&] {
        action = [&](Library& lib) {
            WalkHandle h;
            load_walk(lib, f_input, f_spec, f_n, f_seed, h);
            char* s = nullptr;
            lib.check(rwos_feller_decompose(lib.ctx(), h.w, &s));
            emit_report(g, lib.take_json(s));
        };
    });
    auto* f_seg = fel->add_subcommand("segments", "split both chains at future extremes, ready for riffle");
    add_walk_source(f_seg);
    f_seg->add_option("--horizon", f_horizon, "use only the first H chain steps (0 = all)");
    f_seg->callback([&] {
        action = [&](Library& lib) {
            WalkHandle h;
            load_walk(lib, f_input, f_spec, f_n, f_seed, h);
            char* s = nullptr;
            lib.check(rwos_feller_segments(lib.ctx(), h.w, f_horizon, &s));
            emit_report(g, lib.take_json(s));
        };
    });
    auto* f_rec = fel->add_subcommand("recover", "rebuild the walk from a decomposed pair (reverse induction)");
    f_rec->add_option("--input", f_input, "pair JSON from feller decompose")->required();
    f_rec->callback([&] {
        action = [&](Library& lib) {
            WalkHandle h;
            lib.check(rwos_feller_recover(lib.ctx(), read_file(f_input).c_str(), &h.w));
            const json p = walk_json(lib, h.w);
            emit_report(g, {{"path", p}}, csv_walk(p));
        };
    });
    auto* f_rif = fel->add_subcommand("riffle", "rebuild the walk by riffling chain segments");
    f_rif->add_option("--input", f_input, "segments JSON from feller segments")->required();
    f_rif->callback([&] {
        action = [&](Library& lib) {
            WalkHandle h;
            lib.check(rwos_feller_riffle(lib.ctx(), read_file(f_input).c_str(), &h.w));
            const json p = walk_json(lib, h.w);
            emit_report(g, {{"path", p}}, csv_walk(p));
        };
    });

    // limit (also reachable as feller limit)
    std::string l_spec, l_method = "ladder-segments";
    std::size_t l_K = 1, l_reps = 1, l_horizon = 100000000;
    double l_safety = 4.0;
    std::uint64_t l_seed = 0;
    auto limit_action = [&] {
        action = [&](Library& lib) {
            const json p = {{"spec", l_spec},     {"K", l_K},           {"reps", l_reps},
                            {"seed", l_seed},     {"method", l_method}, {"max_horizon", l_horizon},
                            {"safety", l_safety}};
            char* s = nullptr;
            lib.check(rwos_limit_order_stats(lib.ctx(), p.dump().c_str(), &s));
            const json r = lib.take_json(s);
            std::ostringstream os;
            os.precision(17);
            os << "rep";
            for (std::size_t i = 1; i <= l_K; ++i) os << ",w" << i;
            os << '\n';
            std::size_t rep = 0;
            for (const auto& row : r.at("samples")) {
                os << rep++;
                for (const auto& w : row.at("w")) os << ',' << w.get<double>();
                os << '\n';
            }
            emit_report(g, r, os.str());
        };
    };
    auto add_limit = [&](CLI::App* c) {
        c->add_option("--spec", l_spec, "centred increment law")->required();
        c->add_option("--K", l_K, "number of order statistics W_1..W_K")->check(CLI::PositiveNumber);
        c->add_option("--reps", l_reps, "independent replicas")->check(CLI::PositiveNumber);
        c->add_option("--seed", l_seed, "RNG seed")->required();
        c->add_option("--method", l_method, "ladder-segments or walk-decomposition")
            ->check(CLI::IsMember({"ladder-segments", "walk-decomposition"}));
        c->add_option("--max-horizon", l_horizon, "draw budget (ladder) or walk length (decomposition)");
        c->add_option("--safety", l_safety, "certification margin for walk-decomposition");
        c->callback(limit_action);
    };
    add_limit(fel->add_subcommand("limit", "sample the limiting order statistics near the minimum"));
    add_limit(app.add_subcommand("limit", "sample the limiting order statistics near the minimum"));

    // exact
    auto* ex = app.add_subcommand("exact", "exact rational identities");
    ex->require_subcommand(1);
    auto* ssrw = ex->add_subcommand("ssrw", "simple symmetric walk");
    std::string e_op, e_stat, e_z, e_x;
    std::optional<unsigned> e_k, e_n, e_m;
    ssrw->add_option("--op", e_op, "u | ed | cheb | gf | eta-gf | enumerate | wendel | spitzer")
        ->required()
        ->check(CLI::IsMember({"u", "ed", "cheb", "gf", "eta-gf", "enumerate", "wendel", "spitzer"}));
    ssrw->add_option("--k", e_k, "index k");
    ssrw->add_option("--n", e_n, "walk length n");
    ssrw->add_option("--m", e_m, "central term index m (op u)");
    ssrw->add_option("--z", e_z, "gf argument; p/q for an exact result, decimal for floating point");
    ssrw->add_option("--x", e_x, "Chebyshev argument; p/q or decimal");
    ssrw->add_option("--stat", e_stat,
                     "enumerate statistic: min | max | m:K | d:K | order-stats | gaps | reversed-gaps | argmin | sum | "
                     "pos | neg | feller | split | ladder | nminus");
    ssrw->callback([&] {
        action = [&](Library& lib) {
            json p = json::object();
            if (e_k) p["k"] = *e_k;
            if (e_n) p["n"] = *e_n;
            if (e_m) p["m"] = *e_m;
            if (!e_stat.empty()) p["stat"] = e_stat;
            auto number_or_rational = [](const std::string& v) -> json {
                if (v.find('/') != std::string::npos || v.find('.') == std::string::npos) return v;
                return std::stod(v);
            };
            if (!e_z.empty()) p["z"] = number_or_rational(e_z);
            if (!e_x.empty()) p["x"] = number_or_rational(e_x);
            char* s = nullptr;
            lib.check(rwos_exact_ssrw(lib.ctx(), e_op.c_str(), p.dump().c_str(), &s));
            const json r = lib.take_json(s);
            emit_report(g, r, r.contains("pmf") ? csv_pmf(r.at("pmf")) : std::string());
        };
    });

    // valley
    auto* va = app.add_subcommand("valley", "Brownian valley numerics");
    va->require_subcommand(1);
    double v_a = 0.0, v_t = 0.0, v_horizon = 1e12;
    std::optional<double> v_tol;
    std::string v_method = "transfer";
    std::size_t v_k = 0, v_reps = 0, v_n = 0, v_sub = 1000;
    std::uint64_t v_seed = 0;
    bool v_exact = false, v_samples = false;
    auto valley_run = [&](const std::string& op, json p) {
        action = [&, op, p](Library& lib) {
            char* s = nullptr;
            lib.check(rwos_valley(lib.ctx(), op.c_str(), p.dump().c_str(), &s));
            emit_report(g, lib.take_json(s));
        };
    };
    auto* v_h = va->add_subcommand("h", "joint BES(3) tail P(R(t) > a, R(t+1) > a), closed form and quadrature");
    v_h->add_option("--a", v_a)->required();
    v_h->add_option("--t", v_t)->required();
    v_h->callback([&] { valley_run("h", {{"a", v_a}, {"t", v_t}}); });
    auto* v_p = va->add_subcommand("pieces", "closed-form pieces of the joint tail against quadrature");
    v_p->add_option("--a", v_a)->required();
    v_p->add_option("--t", v_t)->required();
    v_p->callback([&] { valley_run("pieces", {{"a", v_a}, {"t", v_t}}); });
    auto* v_tail = va->add_subcommand("tail", "P(M_0 > a) for the valley minimum on a unit grid");
    v_tail->add_option("--a", v_a)->required();
    v_tail->add_option("--tol", v_tol, "target absolute accuracy");
    v_tail->add_option("--method", v_method, "transfer (exact) or product")->check(CLI::IsMember({"transfer", "product"}));
    v_tail->callback([&] {
        json p = {{"a", v_a}, {"method", v_method}};
        if (v_tol) p["tol"] = *v_tol;
        valley_run("tail", p);
    });
    auto* v_mean = va->add_subcommand("mean", "E M_0, compared with -zeta(1/2)/sqrt(2 pi)");
    v_mean->add_option("--tol", v_tol, "target absolute accuracy");
    v_mean->add_option("--method", v_method, "transfer (exact) or product")->check(CLI::IsMember({"transfer", "product"}));
    v_mean->callback([&] {
        json p = {{"method", v_method}};
        if (v_tol) p["tol"] = *v_tol;
        valley_run("mean", p);
    });
    auto* v_mc = va->add_subcommand("mc", "Monte Carlo of the valley order statistics M_0..M_K");
    v_mc->add_option("--k", v_k, "highest order statistic index K");
    v_mc->add_option("--horizon", v_horizon, "time cap per arm");
    v_mc->add_option("--reps", v_reps)->required()->check(CLI::PositiveNumber);
    v_mc->add_option("--seed", v_seed)->required();
    v_mc->add_flag("--samples", v_samples, "include per-replica M_0");
    v_mc->callback([&] {
        valley_run("mc", {{"K", v_k}, {"horizon", v_horizon}, {"reps", v_reps}, {"seed", v_seed},
                          {"include_samples", v_samples}});
    });
    auto* v_dis = va->add_subcommand("discretization", "walk minimum minus Brownian minimum on [0, n]");
    v_dis->add_option("--n", v_n)->required()->check(CLI::PositiveNumber);
    v_dis->add_option("--substeps", v_sub, "fine-grid points per unit time");
    v_dis->add_option("--reps", v_reps)->required()->check(CLI::PositiveNumber);
    v_dis->add_option("--seed", v_seed)->required();
    v_dis->add_flag("--exact-bridge", v_exact, "exact bridge minima instead of the fine grid");
    v_dis->add_flag("--samples", v_samples, "include per-replica differences");
    v_dis->callback([&] {
        valley_run("discretization", {{"n", v_n}, {"substeps", v_sub}, {"reps", v_reps}, {"seed", v_seed},
                                      {"exact_bridge", v_exact}, {"include_samples", v_samples}});
    });

    // verify
    auto* ver = app.add_subcommand("verify", "run a named verification experiment, all of them, or list them");
    std::string ver_name;
    std::optional<std::uint64_t> ver_seed;
    std::optional<double> ver_n, ver_reps, ver_k;
    std::vector<std::string> ver_set;
    ver->add_option("name", ver_name, "experiment name, 'all' or 'list'")->required();
    ver->add_option("--seed", ver_seed, "RNG seed (required for stochastic experiments)");
    ver->add_option("--n", ver_n, "size override: n_max or n");
    ver->add_option("--reps", ver_reps, "replica override: reps or mc_reps");
    ver->add_option("--k", ver_k, "k override");
    ver->add_option("--set", ver_set, "KEY=VALUE setting override (VALUE parsed as JSON when possible)");
    ver->callback([&] {
        action = [&](Library& lib) {
            char* ls = nullptr;
            lib.check(rwos_verify_list(lib.ctx(), &ls));
            const json list = lib.take_json(ls).at("experiments");
            if (ver_name == "list") {
                emit_report(g, {{"experiments", list}});
                return;
            }
            std::vector<json> chosen;
            for (const auto& e : list)
                if (ver_name == "all" || e.at("name") == ver_name) chosen.push_back(e);
            if (chosen.empty()) throw CliError{kExitValidation, "unknown experiment '" + ver_name + "'"};

            json reports = json::array();
            bool all_passed = true;
            for (const auto& e : chosen) {
                const json& d = e.at("defaults");
                json ov = json::object();
                auto map_to = [&](const std::optional<double>& v, std::initializer_list<const char*> keys, const char* flag) {
                    if (!v) return;
                    for (const char* k : keys)
                        if (d.contains(k)) {
                            ov[k] = *v;
                            return;
                        }
                    if (ver_name != "all")
                        throw CliError{kExitValidation, std::string(flag) + " does not apply to " + ver_name};
                };
                map_to(ver_n, {"n_max", "n"}, "--n");
                map_to(ver_reps, {"reps", "mc_reps"}, "--reps");
                map_to(ver_k, {"k"}, "--k");
                for (const auto& kv : ver_set) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos || eq == 0) throw CliError{kExitValidation, "--set needs KEY=VALUE"};
                    const std::string key = kv.substr(0, eq);
                    if (!d.contains(key)) {
                        if (ver_name == "all") continue;
                        throw CliError{kExitValidation, "experiment '" + ver_name + "' has no setting '" + key + "'"};
                    }
                    ov[key] = parse_set_value(kv.substr(eq + 1));
                }
                const bool stochastic = e.at("stochastic").get<bool>();
                if (stochastic && !ver_seed)
                    throw CliError{kExitValidation, "--seed is required for " + e.at("name").get<std::string>()};
                char* rs = nullptr;
                int passed = 0;
                lib.check(rwos_verify_run(lib.ctx(), e.at("name").get<std::string>().c_str(), ov.dump().c_str(),
                                          ver_seed.value_or(0), &rs, &passed));
                json r = lib.take_json(rs);
                if (!stochastic) r.erase("seed");
                std::cerr << (passed ? "PASS " : "FAIL ") << r.at("name").get<std::string>() << '\n';
                all_passed = all_passed && passed;
                reports.push_back(std::move(r));
            }
            const json out = ver_name == "all" ? json{{"reports", reports}, {"passed", all_passed}} : reports.at(0);
            emit_report(g, out, csv_verify(reports));
            if (!all_passed) throw CliError{kExitBreach, ""};
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        Library lib;
        lib.check(rwos_context_set_threads(lib.ctx(), g.threads));
        if (action) action(lib);
    } catch (const CliError& e) {
        if (!e.message.empty()) std::cerr << "error: " << e.message << '\n';
        return e.code;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
