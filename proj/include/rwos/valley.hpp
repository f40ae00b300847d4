#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <json.hpp>

namespace rwos {

/// P(R_3(t) > a) for a Bessel(3) process started at 0.
double k_a(double a, double t);
/// P(R_3(t) > a, R_3(t+1) > a), closed form.
double h_a(double a, double t);
/// The same probability by nested adaptive quadrature of the defining double integral.
double h_a_quadrature(double a, double t, double rel_tol = 1e-11);

/// Closed-form pieces of the joint probability as displayed in the source derivation, and
/// one-dimensional quadratures of the integrals they are meant to equal.
struct HaPieces {
    double printed[4];
    double corrected[4];
    double quadrature[4];
};
HaPieces h_a_pieces(double a, double t);
/// The long closed form exactly as displayed, with either Owen T sign convention.
double h_a_printed(double a, double t, bool positive_exponent_t);

/// P(R_3(j) > a for all integers j >= 1 | R_3(0) = x), x > a. With v(x) = x (1 - phi(x)), the
/// h-transform to Brownian motion killed at 0 gives v = g + Q v on (a, inf), where Q is the killed
/// unit-time kernel restricted to (a, inf) and g(x) = E_x[B_1; 0 < B_1 < a, no zero before 1].
/// Solved by Nystrom discretisation with Gauss-Legendre panels on (a, a + span]; beyond the span
/// v is held at its last node value, the limit it approaches geometrically fast.
class GridAvoidance {
public:
    explicit GridAvoidance(double a, double span = 14.0, double panel_width = 1.0);

    double level() const { return a_; }
    double phi(double x) const;
    /// P(R_3(u + k) > a for all k >= 0) = int_a^inf p_u(x) phi(x) dx.
    double g(double u) const;

private:
    using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
    double v(double x) const;
    double v_nystrom(double x) const;
    double source(double x) const;

    double a_, top_, tail_v_ = 0.0;
    std::vector<double> nodes_, weights_, v_;
    std::shared_ptr<const Spline> spline_;
};

enum class GaMethod { transfer, product };

struct Estimate {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    std::size_t terms = 0;
};

class ValleyEvaluator {
public:
    std::size_t product_depth = 100000;
    double product_tol = 1e-9;
    double quad_tol = 1e-10;
    std::size_t min_exact_terms = 200;
    double mean_cutoff_tail = 1e-8;
    double arm_span = 14.0;
    double arm_panel_width = 1.0;
    GaMethod method = GaMethod::transfer;

    void validate() const;

    /// P(R_3(u+k) > a for all k >= 0) by the selected method.
    Estimate g_a(double a, double u) const;
    /// K^a(u) prod_{k>=0} H^a(k+u)/K^a(k+u). The first N factors are exact; the remainder
    /// -log factor ~ c t^{-3/2} is fitted and summed with Hurwitz zeta. error_estimate is the
    /// change when N is doubled. This treats each factor as if conditioning on the event
    /// R_3(k+u-1) > a were the same as conditioning on the value, so it is a lower bound, not
    /// the probability itself.
    Estimate g_a_product(double a, double u) const;
    /// Rigorous upper bound on -log of the omitted factors beyond index n.
    static double product_tail_bound(double a, double u, std::size_t n);
    /// P(M_{0,inf} > a) = int_0^1 G^a(u) G^a(1-u) du.
    Estimate valley_tail(double a, bool symmetric = true) const;
    /// int_0^inf P(M_{0,inf} > a) da.
    Estimate valley_mean() const;
    /// Cutoff A with envelope K^A(1)^2 below mean_cutoff_tail.
    double mean_cutoff() const;

    nlohmann::json settings() const;
};

/// -zeta(1/2)/sqrt(2 pi), the expected gap between the walk minimum and the Brownian minimum.
double valley_mean_target();

/// R_3 at increasing times from 3 independent Brownian coordinates.
std::vector<double> sample_bes3_grid(const std::vector<double>& times, std::uint64_t seed);

struct ValleySample {
    double u = 0.0;
    std::vector<double> order_stats;  // M_0..M_K
    std::size_t grid_points = 0;      // grid values actually drawn (skipped stretches excluded)
    bool truncated = false;           // an arm reached the horizon before its future infimum cleared
};

/// One Brownian valley sampled on the grid U + Z, keeping the K+1 smallest values. Each arm is
/// R = 2M - B with B Brownian and M its running max; the future infimum of R equals M, which
/// gives an exact stopping rule. Stretches where R stays above the current threshold are jumped
/// with the exact first-passage law. horizon caps the arm time.
ValleySample sample_valley(std::size_t K, double horizon, std::uint64_t seed);
/// Probability that R_3(u+k) > a for all k >= 0, single-arm indicator sample with the same method.
bool sample_arm_above(double a, double u, double horizon, std::uint64_t seed, bool* truncated = nullptr);

struct ValleyMc {
    std::size_t K = 0;
    std::size_t reps = 0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> mean;  // per order statistic
    std::vector<double> se;
    std::vector<double> m0;    // M_{0,inf} per replica
    std::size_t truncated = 0;
    bool nondecreasing = true;
    nlohmann::json to_json(bool include_samples) const;
};
ValleyMc mc_valley_order_stats(std::size_t K, double horizon, std::size_t reps, std::uint64_t seed,
                               unsigned threads = 1);

struct Discretization {
    std::size_t n = 0;
    std::size_t substeps = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    bool exact_bridge = false;
    std::vector<double> diff;  // walk minimum minus Brownian minimum
    double mean = 0.0;
    double se = 0.0;
    nlohmann::json to_json(bool include_samples) const;
};
/// Brownian motion on [0, n] observed at integer times; the path minimum is taken on a grid of
/// n*substeps points, or exactly from bridge minima between integer times when exact_bridge is set.
Discretization discretization_experiment(std::size_t n, std::size_t substeps, std::size_t reps, std::uint64_t seed,
                                         bool exact_bridge = false, unsigned threads = 1);

}  // namespace rwos
