#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <json.hpp>

#include "rwos/ssrw_exact.hpp"
#include "rwos/walk.hpp"

namespace rwos {

/// Probability mass on a lattice of integer keys. step = 0 marks a native integer lattice;
/// otherwise key i stands for the bin [origin + i step, origin + (i+1) step).
struct DiscretePmf {
    using Key = std::vector<long>;
    std::map<Key, double> mass;
    double step = 0.0;
    double origin = 0.0;

    double total() const;
    static DiscretePmf from_exact(const ExactPmf& p);
};

/// Counts over lattice keys, with the same support metadata as DiscretePmf.
class EmpiricalDist {
public:
    using Key = DiscretePmf::Key;

    static EmpiricalDist from_keys(const std::vector<Key>& keys);
    static EmpiricalDist from_integers(const std::vector<long>& values);
    /// Bins each coordinate with the given width; rows are sample vectors.
    static EmpiricalDist from_samples(const std::vector<std::vector<double>>& rows, double step, double origin = 0.0);
    static EmpiricalDist from_scalars(const std::vector<double>& values, double step, double origin = 0.0);

    void add(const Key& k, std::uint64_t count = 1);
    std::uint64_t n() const { return n_; }
    const std::map<Key, std::uint64_t>& counts() const { return counts_; }
    double step() const { return step_; }
    double origin() const { return origin_; }
    DiscretePmf pmf() const;

private:
    std::map<Key, std::uint64_t> counts_;
    std::uint64_t n_ = 0;
    double step_ = 0.0, origin_ = 0.0;
};

/// (1/2) sum |p - q|; the lattices must agree.
double tv_distance(const DiscretePmf& p, const DiscretePmf& q);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double df = 0.0;
};

/// sup |F_n - F|.
TestResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Asymptotic Kolmogorov survival function P(K > lambda).
double kolmogorov_sf(double lambda);

/// Goodness of fit against exact probabilities; cells with expected count < min_expected are
/// pooled into one cell.
TestResult chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probs,
                          double min_expected = 5.0);
/// Homogeneity of two count tables over the union of their keys, sparse cells pooled.
TestResult chi_square_two_sample(const EmpiricalDist& a, const EmpiricalDist& b, double min_expected = 5.0);

struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::size_t reps = 0;
    nlohmann::json to_json() const;
};
MeanEstimate mc_mean(const std::vector<double>& values);
/// estimator(seed) run for replica seeds base ^ r.
MeanEstimate mc_mean(const std::function<double(std::uint64_t)>& estimator, std::size_t reps, std::uint64_t seed,
                     unsigned threads = 1);

struct RatePoint {
    std::size_t n = 0;
    double tv = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    double noise_floor = 0.0;  // mean TV of two samples drawn from the same law at these sizes
    bool flagged = false;      // excluded from the fit: indistinguishable from the noise floor
};

struct RateFit {
    std::size_t K = 0;
    std::vector<RatePoint> points;
    double slope = 0.0, intercept = 0.0;
    double slope_lo = 0.0, slope_hi = 0.0;  // 95% t interval
    std::size_t used = 0;
    double bin_width = 0.0;
    std::string note;
    nlohmann::json to_json() const;
};

struct RateSettings {
    std::size_t K = 1;
    std::vector<std::size_t> n_grid{100, 316, 1000, 3162, 10000};
    std::size_t reps = 100000;
    std::size_t ref_reps = 400000;
    std::uint64_t seed = 0;
    double bin_width = 0.0;  // 0: 0.05 sigma sqrt(K)
    std::size_t bootstrap = 200;
    unsigned threads = 1;
};
/// Binned TV between the law of (W_{1,n},...,W_{K,n}) and its limit, fitted as log TV vs log n.
RateFit rate_fit(const IncrementSpec& spec, const RateSettings& s);

/// (W_1..W_K) of a fresh walk S_0..S_n. For centred Gaussian increments, stretches far above the
/// (K+1)-th smallest value seen so far are jumped as one N(0, m sigma^2) draw; a jump of m steps
/// is taken only when the gap exceeds kBlockSkipSigmas sigma sqrt(m).
std::vector<double> sample_low_order_stats(const IncrementSpec& spec, std::size_t n, std::size_t K, Rng& rng,
                                           bool block_skip = true);

/// Smallest K+1 values of a partial-sum sequence, shifted so the minimum is 0: (W_1..W_K).
std::vector<double> shifted_order_stats(const std::vector<double>& sums, std::size_t K);

struct MixtureCheck {
    std::string name;
    double estimate = 0.0, se = 0.0, target = 0.0, tolerance = 0.0;
    std::string rule;  // "3se" or "rel5"
    bool passed = false;
    nlohmann::json to_json() const;
};
struct MixtureReport {
    std::vector<MixtureCheck> checks;
    double limit_gap = 0.0;  // lim_n E D_{k,n}
    bool passed = true;
    nlohmann::json to_json() const;
};
/// E S_k^+ for the mixture, from the Gaussian component formula k mu Phi(mu sqrt(k)/s) + s sqrt(k) phi(.).
double mixture_expected_positive_part(const IncrementSpec& spec, std::size_t k);
double mixture_expected_negative_part(const IncrementSpec& spec, std::size_t k);
/// Finite-n gap expectation checks against the exact exchangeable identity, plus the k -> inf
/// scaling for centred mixtures (via limit_order_stats).
MixtureReport mixture_gap_checks(const IncrementSpec& spec, std::size_t k, std::size_t n, std::size_t reps,
                                 std::uint64_t seed, unsigned threads = 1);

}  // namespace rwos
