#include "rwos/ssrw_exact.hpp"

#include <algorithm>
#include <cmath>

#include "rwos/error.hpp"

namespace rwos {

std::string to_string(const Rational& q) { return q.get_str(); }

// ---------------------------------------------------------------------------
// ExactPmf
// ---------------------------------------------------------------------------

void ExactPmf::add(const Key& k, const Rational& mass) {
    auto [it, inserted] = mass_.try_emplace(k, mass);
    if (!inserted) it->second += mass;
}

Rational ExactPmf::total() const {
    Rational t = 0;
    for (const auto& [k, m] : mass_) t += m;
    return t;
}

Rational ExactPmf::mass(const Key& k) const {
    auto it = mass_.find(k);
    return it == mass_.end() ? Rational(0) : it->second;
}

Rational ExactPmf::mean() const {
    Rational e = 0;
    for (const auto& [k, m] : mass_) {
        require(!k.empty(), "mean of an empty key");
        e += m * Rational(k[0]);
    }
    return e;
}

namespace {

nlohmann::json big_to_json(const mpz_class& z) {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
}

mpz_class big_from_json(const nlohmann::json& j) {
    if (j.is_string()) return mpz_class(j.get<std::string>());
    return mpz_class(j.get<long>());
}

}  // namespace

nlohmann::json ExactPmf::to_json() const {
    mpz_class den = 1;
    for (const auto& [k, m] : mass_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), m.get_den_mpz_t());
    nlohmann::json support = nlohmann::json::array(), num = nlohmann::json::array();
    for (const auto& [k, m] : mass_) {
        if (k.size() == 1) support.push_back(k[0]);
        else support.push_back(k);
        mpz_class scaled = m.get_num() * (den / m.get_den());
        num.push_back(big_to_json(scaled));
    }
    return {{"support", support}, {"numerator", num}, {"denominator", big_to_json(den)}};
}

ExactPmf ExactPmf::from_json(const nlohmann::json& j) {
    require(j.contains("support") && j.contains("numerator") && j.contains("denominator"),
            "pmf JSON needs support, numerator, denominator");
    const auto& sup = j["support"];
    const auto& num = j["numerator"];
    require(sup.size() == num.size(), "support and numerator lengths differ");
    const mpz_class den = big_from_json(j["denominator"]);
    ExactPmf p;
    for (std::size_t i = 0; i < sup.size(); ++i) {
        Key k = sup[i].is_array() ? sup[i].get<Key>() : Key{sup[i].get<long>()};
        Rational m(big_from_json(num[i]), den);
        m.canonicalize();
        p.add(k, m);
    }
    return p;
}

ExactPmf convolve(const ExactPmf& a, const ExactPmf& b) {
    ExactPmf c;
    for (const auto& [ka, ma] : a.masses())
        for (const auto& [kb, mb] : b.masses()) {
            require(ka.size() == 1 && kb.size() == 1, "convolution needs scalar supports");
            c.add({ka[0] + kb[0]}, ma * mb);
        }
    return c;
}

// ---------------------------------------------------------------------------
// Central terms and gap expectations
// ---------------------------------------------------------------------------

Rational central_term(unsigned m) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), 2UL * m, m);
    mpz_class d = 1;
    d <<= 2 * m;
    Rational q(c, d);
    q.canonicalize();
    return q;
}

Rational expected_gap_limit(unsigned k) {
    require(k >= 1, "k must be at least 1");
    return central_term(k / 2) / 2;
}

Rational spitzer_expected_max(unsigned n) {
    require(n >= 1, "n must be at least 1");
    Rational s = 0;
    for (unsigned k = 1; k <= n; ++k) s += expected_gap_limit(k);
    return s;
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

Statistic Statistic::parse(const std::string& text) {
    Statistic s;
    auto with_k = [&](Kind kind, const std::string& rest) {
        s.kind = kind;
        try {
            s.k = static_cast<unsigned>(std::stoul(rest));
        } catch (const std::exception&) {
            fail("statistic index must be a nonnegative integer: " + text);
        }
        return s;
    };
    if (text == "min") s.kind = Kind::min;
    else if (text == "max") s.kind = Kind::max;
    else if (text.rfind("m:", 0) == 0) return with_k(Kind::order_stat, text.substr(2));
    else if (text.rfind("d:", 0) == 0) return with_k(Kind::gap, text.substr(2));
    else if (text == "order-stats") s.kind = Kind::order_stats;
    else if (text == "gaps") s.kind = Kind::gaps;
    else if (text == "reversed-gaps") s.kind = Kind::reversed_gaps;
    else if (text == "argmin") s.kind = Kind::argmin;
    else if (text == "sum") s.kind = Kind::sum;
    else if (text == "pos") s.kind = Kind::positive_part;
    else if (text == "neg") s.kind = Kind::negative_part;
    else if (text == "feller") s.kind = Kind::feller_pair;
    else if (text == "split") s.kind = Kind::split_pair;
    else if (text == "ladder") s.kind = Kind::ladder;
    else if (text == "nminus") s.kind = Kind::n_minus;
    else fail("unknown statistic: " + text);
    return s;
}

std::string Statistic::describe() const {
    switch (kind) {
    case Kind::min: return "min";
    case Kind::max: return "max";
    case Kind::order_stat: return "m:" + std::to_string(k);
    case Kind::gap: return "d:" + std::to_string(k);
    case Kind::order_stats: return "order-stats";
    case Kind::gaps: return "gaps";
    case Kind::reversed_gaps: return "reversed-gaps";
    case Kind::argmin: return "argmin";
    case Kind::sum: return "sum";
    case Kind::positive_part: return "pos";
    case Kind::negative_part: return "neg";
    case Kind::feller_pair: return "feller";
    case Kind::split_pair: return "split";
    case Kind::ladder: return "ladder";
    case Kind::n_minus: return "nminus";
    }
    return "?";
}

namespace {

std::size_t argmin_last(const std::vector<long>& s) {
    std::size_t a = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] <= s[a]) a = i;
    return a;
}

ExactPmf::Key evaluate(const Statistic& st, const std::vector<long>& s, std::vector<long>& sorted) {
    using K = Statistic::Kind;
    const std::size_t n = s.size() - 1;
    auto need_sorted = [&] {
        sorted = s;
        std::sort(sorted.begin(), sorted.end());
    };
    switch (st.kind) {
    case K::min: return {*std::min_element(s.begin(), s.end())};
    case K::max: return {*std::max_element(s.begin(), s.end())};
    case K::order_stat:
        need_sorted();
        return {sorted[st.k]};
    case K::gap:
        need_sorted();
        return {sorted[st.k] - sorted[st.k - 1]};
    case K::order_stats:
        need_sorted();
        return sorted;
    case K::gaps:
    case K::reversed_gaps: {
        need_sorted();
        ExactPmf::Key g(n);
        for (std::size_t k = 1; k <= n; ++k) g[k - 1] = sorted[k] - sorted[k - 1];
        if (st.kind == K::reversed_gaps) std::reverse(g.begin(), g.end());
        return g;
    }
    case K::argmin: return {static_cast<long>(argmin_last(s))};
    case K::sum: return {s[n]};
    case K::positive_part: return {std::max(s[n], 0L)};
    case K::negative_part: return {std::max(-s[n], 0L)};
    case K::n_minus: {
        long c = 0;
        for (std::size_t k = 1; k <= n; ++k) c += s[k] <= 0;
        return {c};
    }
    case K::feller_pair: {
        ExactPmf::Key up{0}, down{0};
        for (std::size_t k = 1; k <= n; ++k) {
            const long x = s[k] - s[k - 1];
            if (s[k] > 0) up.push_back(up.back() + x);
            else down.push_back(down.back() - x);
        }
        up.push_back(kKeySeparator);
        up.insert(up.end(), down.begin(), down.end());
        return up;
    }
    case K::split_pair: {
        const std::size_t a = argmin_last(s);
        ExactPmf::Key key;
        for (std::size_t k = a; k <= n; ++k) key.push_back(s[k] - s[a]);
        key.push_back(kKeySeparator);
        for (std::size_t k = 0; k <= a; ++k) key.push_back(s[a - k] - s[a]);
        return key;
    }
    case K::ladder: {
        ExactPmf::Key key;
        long hi = 0, lo = 0;
        for (std::size_t k = 1; k <= n; ++k)
            if (s[k] > hi) {
                key.push_back(static_cast<long>(k));
                key.push_back(s[k]);
                hi = s[k];
            }
        key.push_back(kKeySeparator);
        for (std::size_t k = 1; k <= n; ++k)
            if (s[k] <= lo) {
                key.push_back(static_cast<long>(k));
                key.push_back(s[k]);
                lo = s[k];
            }
        return key;
    }
    }
    return {};
}

}  // namespace

ExactPmf enumerate_walks(unsigned n, const Statistic& stat) {
    require(n <= kMaxEnumerate, "enumeration is limited to n <= " + std::to_string(kMaxEnumerate));
    using K = Statistic::Kind;
    if (stat.kind == K::order_stat) require(stat.k <= n, "order statistic index exceeds n");
    if (stat.kind == K::gap) require(stat.k >= 1 && stat.k <= n, "gap index must be in 1..n");
    std::map<ExactPmf::Key, std::uint64_t> counts;
    std::vector<long> sorted;
    for_each_ssrw_path(n, [&](const std::vector<long>& s) { ++counts[evaluate(stat, s, sorted)]; });
    ExactPmf p;
    mpz_class den = 1;
    den <<= n;
    for (const auto& [k, c] : counts) {
        Rational m(mpz_class(static_cast<unsigned long>(c)), den);
        m.canonicalize();
        p.add(k, m);
    }
    return p;
}

ExactPmf wendel_convolution(unsigned k, unsigned n) {
    require(k <= n, "need k <= n");
    require(n <= kMaxEnumerate, "enumeration is limited to n <= " + std::to_string(kMaxEnumerate));
    Statistic mx{Statistic::Kind::max, 0}, mn{Statistic::Kind::min, 0};
    return convolve(enumerate_walks(k, mx), enumerate_walks(n - k, mn));
}

// ---------------------------------------------------------------------------
// Generating functions
// ---------------------------------------------------------------------------

double passage_gf(unsigned k, double z) {
    require(z > 0 && z <= 1, "z must lie in (0, 1]");
    return 1.0 / chebyshev_v(k, 1.0 / z);
}

Rational passage_gf(unsigned k, const Rational& z) {
    require(z > 0 && z <= 1, "z must lie in (0, 1]");
    return Rational(1) / chebyshev_v<Rational>(k, Rational(1) / z);
}

double eta_gf(unsigned k, double z) {
    require(k >= 1, "k must be at least 1");
    require(z > 0 && z <= 1, "z must lie in (0, 1]");
    const double x = 1.0 / z;
    return 1.0 / (chebyshev_v(k, x) * chebyshev_v(k + 1, x));
}

Rational eta_gf(unsigned k, const Rational& z) {
    require(k >= 1, "k must be at least 1");
    require(z > 0 && z <= 1, "z must lie in (0, 1]");
    const Rational x = Rational(1) / z;
    return Rational(1) / (chebyshev_v<Rational>(k, x) * chebyshev_v<Rational>(k + 1, x));
}

// ---------------------------------------------------------------------------
// Geometric laws and branching processes
// ---------------------------------------------------------------------------

std::uint64_t sample_geo0(Rng& rng, double p) {
    require(p > 0 && p <= 1, "geometric parameter must lie in (0, 1]");
    if (p == 1.0) return 0;
    if (p == 0.5) {
        std::uint64_t k = 0;
        while (!rng.coin()) ++k;
        return k;
    }
    return static_cast<std::uint64_t>(std::floor(std::log(rng.uniform_pos()) / std::log1p(-p)));
}

std::uint64_t sample_geo1(Rng& rng, double p) { return 1 + sample_geo0(rng, p); }

std::vector<std::uint64_t> sample_branching(unsigned levels, unsigned immigration, std::uint64_t initial, Rng& rng) {
    std::vector<std::uint64_t> z(levels + 1);
    std::uint64_t prev = initial;
    for (unsigned l = 0; l <= levels; ++l) {
        std::uint64_t next = immigration;
        for (std::uint64_t i = 0; i < prev; ++i) next += sample_geo0(rng, 0.5);
        z[l] = next;
        prev = next;
    }
    return z;
}

KnightChains sample_knight_chains(unsigned levels, Rng& rng) {
    KnightChains c;
    c.up = sample_branching(levels, 1, 0, rng);
    c.down = sample_branching(levels, 1, 1, rng);
    return c;
}

KnightChains sample_knight_chains(unsigned levels, std::uint64_t seed) {
    Rng rng(seed);
    return sample_knight_chains(levels, rng);
}

std::vector<std::uint64_t> sample_double_immigration(unsigned levels, Rng& rng) {
    return sample_branching(levels, 2, 1, rng);
}

OccupationCounts occupation_from_branching(const std::vector<std::uint64_t>& z) {
    OccupationCounts o;
    std::uint64_t prev = 1;
    std::uint64_t acc = 0;
    for (std::uint64_t zl : z) {
        require(prev + zl >= 2, "branching sample gives a negative occupation count");
        const std::uint64_t l = prev + zl - 2;
        o.l.push_back(l);
        acc += l;
        o.eta.push_back(acc);
        prev = zl;
    }
    require(o.l.empty() || o.l[0] >= 1, "L_0 must be at least 1");
    return o;
}

std::uint64_t conditional_occupation(unsigned l, unsigned k, Rng& rng) {
    require(l >= 1 && k >= 1, "need l >= 1 and k >= 1");
    const double p = 1.0 / (2.0 * l);
    std::uint64_t x = sample_geo1(rng, p) + sample_geo1(rng, p);
    for (unsigned i = 1; i < k; ++i)
        if (rng.bernoulli(1.0 / l)) x += sample_geo1(rng, p);
    return x;
}

std::uint64_t upward_chain_step(std::uint64_t x, Rng& rng) {
    require(x >= 1, "upward chain states are positive");
    const double up = static_cast<double>(x + 1) / (2.0 * static_cast<double>(x));
    return rng.uniform() < up ? x + 1 : x - 1;
}

std::vector<std::uint64_t> sample_upward_chain(std::size_t steps, Rng& rng) {
    std::vector<std::uint64_t> v(steps + 1, 0);
    if (steps >= 1) v[1] = 1;
    for (std::size_t i = 2; i <= steps; ++i) v[i] = upward_chain_step(v[i - 1], rng);
    return v;
}

// ---------------------------------------------------------------------------
// Chain occupation from ladder excursions
// ---------------------------------------------------------------------------

namespace {

/// Upward chain: segment j (base j-1) is the reversed strict ascending excursion,
/// contributing values j - S_i for 0 <= i < tau. Excursions below the deepest relevant
/// level are replaced by the return step (recurrence).
void up_occupation(unsigned m, Rng& rng, std::vector<std::uint64_t>& occ, std::vector<std::uint64_t>* z) {
    for (long j = 1; j <= static_cast<long>(m); ++j) {
        const long lowest = j - static_cast<long>(m);
        long s = 0;
        ++occ[static_cast<std::size_t>(j)];
        for (;;) {
            if (rng.coin()) {
                ++s;
                const long lvl = j - s;
                if (z && lvl < static_cast<long>(m)) ++(*z)[static_cast<std::size_t>(lvl)];
                if (s > 0) break;
            } else {
                --s;
                if (s < lowest) s = lowest;
            }
            ++occ[static_cast<std::size_t>(j - s)];
        }
    }
}

/// Negated downward chain at level b: each weak descending excursion contributes b - S_tau + S_i.
void down_occupation(unsigned m, Rng& rng, std::vector<std::uint64_t>& occ, std::vector<std::uint64_t>* z) {
    long b = 0;
    ++occ[0];
    const long M = static_cast<long>(m);
    while (b <= M) {
        if (!rng.coin()) {
            // first step down: S_tau = -1, single value b + 1
            if (z && b < M) ++(*z)[static_cast<std::size_t>(b)];
            ++b;
            if (b <= M) ++occ[static_cast<std::size_t>(b)];
            continue;
        }
        // positive excursion returning to 0: values b + S_i, 0 <= i < tau
        const long highest = M - b;
        if (highest < 1) {
            // every interior value lies above level m
            if (z && b < M) ++(*z)[static_cast<std::size_t>(b)];
            ++occ[static_cast<std::size_t>(b)];
            continue;
        }
        std::vector<long> visits;
        long s = 1;
        visits.push_back(1);
        for (;;) {
            if (rng.coin()) {
                ++s;
                if (s > highest) s = highest;
            } else {
                --s;
                if (z && b + s < M) ++(*z)[static_cast<std::size_t>(b + s)];
                if (s == 0) break;
            }
            visits.push_back(s);
        }
        for (long v : visits)
            if (b + v <= M) ++occ[static_cast<std::size_t>(b + v)];
        ++occ[static_cast<std::size_t>(b)];
    }
}

}  // namespace

OccupationCounts ChainOccupation::total() const {
    OccupationCounts o;
    std::uint64_t acc = 0;
    for (std::size_t l = 0; l < up.size(); ++l) {
        o.l.push_back(up[l] + down[l]);
        acc += o.l.back();
        o.eta.push_back(acc);
    }
    return o;
}

ChainOccupation sample_chain_occupation(unsigned levels, Rng& rng) {
    ChainOccupation c;
    c.up.assign(levels + 1, 0);
    c.down.assign(levels + 1, 0);
    c.up_upcrossings.assign(levels, 0);
    c.down_upcrossings.assign(levels, 0);
    up_occupation(levels, rng, c.up, &c.up_upcrossings);
    down_occupation(levels, rng, c.down, &c.down_upcrossings);
    return c;
}

std::uint64_t sample_eta_up(unsigned k, Rng& rng) {
    std::vector<std::uint64_t> occ(k + 1, 0);
    up_occupation(k, rng, occ, nullptr);
    std::uint64_t e = 0;
    for (unsigned l = 1; l <= k; ++l) e += occ[l];
    return e;
}

std::uint64_t sample_nonneg_before_passage(unsigned k, Rng& rng) {
    require(k >= 1, "k must be at least 1");
    const long target = static_cast<long>(k);
    long s = 0;
    std::uint64_t count = 0;
    while (s < target) {
        if (rng.coin()) {
            ++s;
        } else if (s > 0) {
            --s;
        }
        // from 0, a negative excursion ends with the step back to 0, which is counted
        ++count;
    }
    return count;
}

std::uint64_t sample_reflected_passage(unsigned k, Rng& rng) {
    require(k >= 1, "k must be at least 1");
    long s = 0, lo = 0;
    std::uint64_t n = 0;
    do {
        s += rng.coin() ? 1 : -1;
        lo = std::min(lo, s);
        ++n;
    } while (s - lo < static_cast<long>(k));
    return n;
}

// ---------------------------------------------------------------------------
// Uniqueness of the minimum
// ---------------------------------------------------------------------------

double prob_unique_minimum(unsigned n) {
    // state: height above the running minimum, and whether the minimum was visited once
    std::vector<double> once(n + 2, 0.0), more(n + 2, 0.0), o2(n + 2), m2(n + 2);
    once[0] = 1.0;
    for (unsigned step = 0; step < n; ++step) {
        std::fill(o2.begin(), o2.end(), 0.0);
        std::fill(m2.begin(), m2.end(), 0.0);
        for (unsigned h = 0; h <= step; ++h) {
            const double po = 0.5 * once[h], pm = 0.5 * more[h];
            if (po == 0.0 && pm == 0.0) continue;
            o2[h + 1] += po;
            m2[h + 1] += pm;
            if (h == 0) {
                o2[0] += po + pm;
            } else if (h == 1) {
                m2[0] += po + pm;
            } else {
                o2[h - 1] += po;
                m2[h - 1] += pm;
            }
        }
        std::swap(once, o2);
        std::swap(more, m2);
    }
    double p = 0;
    for (double v : once) p += v;
    return p;
}

std::uint64_t sample_min_multiplicity(std::size_t n, Rng& rng) {
    long s = 0, lo = 0;
    std::uint64_t count = 1;
    std::size_t done = 0;
    while (done < n) {
        std::uint64_t bits = rng.bits();
        const std::size_t take = std::min<std::size_t>(64, n - done);
        for (std::size_t i = 0; i < take; ++i, bits >>= 1) {
            s += (bits & 1U) ? 1 : -1;
            if (s < lo) {
                lo = s;
                count = 1;
            } else if (s == lo) {
                ++count;
            }
        }
        done += take;
    }
    return count;
}

}  // namespace rwos
