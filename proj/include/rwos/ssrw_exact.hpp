#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "rwos/rng.hpp"

namespace rwos {

using Rational = mpq_class;

std::string to_string(const Rational& q);

/// Exact pmf over integer-vector keys.
class ExactPmf {
public:
    using Key = std::vector<long>;

    void add(const Key& k, const Rational& mass);
    const std::map<Key, Rational>& masses() const { return mass_; }
    Rational total() const;
    Rational mass(const Key& k) const;
    /// E f(key) for scalar keys (first coordinate).
    Rational mean() const;
    bool operator==(const ExactPmf& o) const { return mass_ == o.mass_; }

    nlohmann::json to_json() const;
    static ExactPmf from_json(const nlohmann::json& j);

private:
    std::map<Key, Rational> mass_;
};

ExactPmf convolve(const ExactPmf& a, const ExactPmf& b);

/// u_m = C(2m, m) / 4^m.
Rational central_term(unsigned m);
/// (1/2) u_{floor(k/2)}.
Rational expected_gap_limit(unsigned k);

/// Statistic computed from each of the 2^n equiprobable sign sequences.
struct Statistic {
    enum class Kind {
        min,
        max,
        order_stat,       // M_{k,n}
        gap,              // D_{k,n}
        order_stats,      // (M_{0,n}, ..., M_{n,n})
        gaps,             // (D_{1,n}, ..., D_{n,n})
        reversed_gaps,    // (D_{n,n}, ..., D_{1,n})
        argmin,           // alpha_n, last minimizing index
        sum,              // S_n
        positive_part,    // S_n^+
        negative_part,    // S_n^-
        feller_pair,      // (S_up values, separator, -S_down values)
        split_pair,       // (post-argmin path, separator, reversed pre-argmin path)
        ladder,           // ascending then descending (epoch, height) pairs
        n_minus,          // N_n^-
    };
    Kind kind = Kind::min;
    unsigned k = 0;

    static Statistic parse(const std::string& text);
    std::string describe() const;
};

inline constexpr unsigned kMaxEnumerate = 24;
/// Separator used inside vector keys of pair statistics.
inline constexpr long kKeySeparator = -1000000;

ExactPmf enumerate_walks(unsigned n, const Statistic& stat);

/// Visit every sign sequence of length n; f receives the partial sums S_0..S_n.
template <class F>
void for_each_ssrw_path(unsigned n, F&& f) {
    std::vector<long> s(n + 1, 0);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        for (unsigned i = 0; i < n; ++i) s[i + 1] = s[i] + (((bits >> i) & 1U) ? 1 : -1);
        f(s);
    }
}

/// pmf of max over k steps convolved with pmf of min over n-k steps.
ExactPmf wendel_convolution(unsigned k, unsigned n);
/// Sum_{k=1}^n (1/2) u_{floor(k/2)}.
Rational spitzer_expected_max(unsigned n);

/// Third-kind Chebyshev V_k(x); V_0 = 1, V_1 = 2x - 1.
template <class T>
T chebyshev_v(unsigned k, const T& x) {
    T a = T(1);
    if (k == 0) return a;
    T b = T(T(2) * x) - T(1);
    for (unsigned i = 2; i <= k; ++i) {
        T c = T(T(2) * x * b) - a;
        a = b;
        b = c;
    }
    return b;
}

/// g_k(z) = 1 / V_k(1/z).
double passage_gf(unsigned k, double z);
Rational passage_gf(unsigned k, const Rational& z);
/// E z^{eta_k} = 1 / (V_k(1/z) V_{k+1}(1/z)).
double eta_gf(unsigned k, double z);
Rational eta_gf(unsigned k, const Rational& z);

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Geo0(p) on {0,1,...}: P = p (1-p)^k.
std::uint64_t sample_geo0(Rng& rng, double p);
/// Geo1(p) on {1,2,...}: P = p (1-p)^(k-1).
std::uint64_t sample_geo1(Rng& rng, double p);

struct KnightChains {
    std::vector<std::uint64_t> up;    // Z_up_0 .. Z_up_m
    std::vector<std::uint64_t> down;  // Z_down_0 .. Z_down_m
};

/// Z_{l+1} = immigration + sum_{i <= Z_l} Geo0(1/2), starting from Z_{-1} = initial.
std::vector<std::uint64_t> sample_branching(unsigned levels, unsigned immigration, std::uint64_t initial, Rng& rng);
/// Upcrossing counts of both SSRW Feller chains at levels 0..m.
KnightChains sample_knight_chains(unsigned levels, std::uint64_t seed);
KnightChains sample_knight_chains(unsigned levels, Rng& rng);

struct OccupationCounts {
    std::vector<std::uint64_t> l;    // L_0..L_m
    std::vector<std::uint64_t> eta;  // eta_j = L_0 + ... + L_j
};

/// L_l = Z_{l-1} + Z_l - 2 with Z_{-1} = 1; z holds Z_0..Z_m.
OccupationCounts occupation_from_branching(const std::vector<std::uint64_t>& z);
/// Z_0..Z_m of the double-immigration process.
std::vector<std::uint64_t> sample_double_immigration(unsigned levels, Rng& rng);

/// One draw of L_l given L_0 = k.
std::uint64_t conditional_occupation(unsigned l, unsigned k, Rng& rng);
/// x -> x+1 with probability (x+1)/(2x), else x-1.
std::uint64_t upward_chain_step(std::uint64_t x, Rng& rng);

/// Occupation counts of the SSRW Feller chains built from ladder excursions, levels 0..m.
/// up[l] counts n >= 1 with S_up[n] = l; down[l] counts n >= 0 with -S_down[n] = l.
struct ChainOccupation {
    std::vector<std::uint64_t> up;
    std::vector<std::uint64_t> down;
    std::vector<std::uint64_t> up_upcrossings;    // Z_up_0..Z_up_{m-1}
    std::vector<std::uint64_t> down_upcrossings;  // Z_down_0..Z_down_{m-1}
    OccupationCounts total() const;
};
ChainOccupation sample_chain_occupation(unsigned levels, Rng& rng);

/// Number of n >= 1 with S_up[n] <= k, from a freshly simulated upward chain.
std::uint64_t sample_eta_up(unsigned k, Rng& rng);
/// N_{0+}(tau_k): steps j <= tau_k with S_j >= 0.
std::uint64_t sample_nonneg_before_passage(unsigned k, Rng& rng);
/// First n with S_n - min_{j<=n} S_j = k.
std::uint64_t sample_reflected_passage(unsigned k, Rng& rng);

/// Simulated upward chain S_up[0..steps] via the transition x -> x +- 1.
std::vector<std::uint64_t> sample_upward_chain(std::size_t steps, Rng& rng);

/// Exact P(D_{1,n} = 1) = P(minimum attained once) for the n-step SSRW.
double prob_unique_minimum(unsigned n);
/// Number of visits of an n-step SSRW to its minimum, simulated.
std::uint64_t sample_min_multiplicity(std::size_t n, Rng& rng);

}  // namespace rwos
