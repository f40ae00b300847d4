#include "rwos/valley.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "rwos/error.hpp"
#include "rwos/parallel.hpp"
#include "rwos/quadrature.hpp"
#include "rwos/rng.hpp"
#include "rwos/special.hpp"

namespace rwos {

namespace {

void check_at(double a, double t) {
    require(std::isfinite(a) && a > 0.0, "level a must be positive");
    require(std::isfinite(t) && t > 0.0, "time t must be positive");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double k_a(double a, double t) {
    check_at(a, t);
    return std::sqrt(2.0 / (kPi * t)) * a * std::exp(-a * a / (2.0 * t)) + erfc(a / std::sqrt(2.0 * t));
}

// Derived by Gaussian integration by parts: the two erfc-weighted integrals reduce to
// orthant probabilities P(X > h, Y > k) of correlated normals plus boundary terms.
double h_a(double a, double t) {
    check_at(a, t);
    const double h = a / std::sqrt(t), k = a / std::sqrt(t + 1.0);
    const double rho = std::sqrt(t / (t + 1.0)), s = 1.0 / std::sqrt(t + 1.0);
    const double c1 = a / std::sqrt(t * (t + 1.0)), c2 = a * (2.0 * t + 1.0) / std::sqrt(t * (t + 1.0));
    const double pre = a * std::sqrt(kPi * t * t * t / (2.0 * std::pow(t + 1.0, 3))) * std::exp(-a * a / (2.0 * (t + 1.0)));
    const double i1 = pre * erfc(a / std::sqrt(2.0 * t * (t + 1.0))) + t / (t + 1.0) * std::exp(-a * a / (2.0 * t));
    const double i2 = -pre * erfc(a * (2.0 * t + 1.0) / std::sqrt(2.0 * t * (t + 1.0))) +
                      t / (t + 1.0) * std::exp(-a * a * (4.0 * t + 1.0) / (2.0 * t));
    const double half = 0.5 * (normal_sf(h) + normal_sf(k));
    const double lp = half - owen_t(k, 1.0 / std::sqrt(t));
    const double lm = half - owen_t(h, 2.0 * std::sqrt(t)) - owen_t(k, (2.0 * t + 1.0) / std::sqrt(t));
    const double ep = lp + h * normal_pdf(h) / 2.0 + rho * normal_pdf(k) * (rho * k * normal_sf(c1) + s * normal_pdf(c1));
    const double em = lm + h * normal_pdf(h) * normal_sf(2.0 * a) +
                      normal_pdf(k) * (rho * rho * k * normal_sf(c2) - rho * s * normal_pdf(c2));
    const double v = (i1 - i2) / (kPi * std::pow(t, 1.5)) + 2.0 * (ep + em);
    return std::clamp(v, 0.0, 1.0);
}

double h_a_quadrature(double a, double t, double rel_tol) {
    check_at(a, t);
    auto inner = [a, rel_tol](double x) {
        auto f = [x](double y) { return y * std::exp(-0.5 * (y - x) * (y - x)) * -std::expm1(-2.0 * x * y); };
        double v = 0.0;
        const double lo = std::max(a, x);
        if (x > a) v += integrate(f, a, x, rel_tol).value;
        v += integrate(f, lo, lo + 40.0, rel_tol).value;
        return v;
    };
    auto outer = [&](double x) { return x * std::exp(-x * x / (2.0 * t)) * inner(x); };
    const double mid = std::max(a, 2.0 * std::sqrt(t));
    double v = 0.0;
    if (mid > a) v += integrate(outer, a, mid, rel_tol).value;
    v += integrate(outer, mid, mid + 14.0 * std::sqrt(t) + 10.0, rel_tol).value;
    return v / (kPi * std::pow(t, 1.5));
}

HaPieces h_a_pieces(double a, double t) {
    check_at(a, t);
    HaPieces p{};
    const double r2 = std::sqrt(2.0);
    const double pre = a * std::sqrt(kPi * t * t * t / (2.0 * std::pow(t + 1.0, 3))) * std::exp(-a * a / (2.0 * (t + 1.0)));
    const double e1 = erfc(a / std::sqrt(2.0 * t * (t + 1.0)));
    const double e2 = erfc(a * (2.0 * t + 1.0) / std::sqrt(2.0 * t * (t + 1.0)));
    const double ga = std::exp(-a * a / (2.0 * t)), gb = std::exp(-a * a * (4.0 * t + 1.0) / (2.0 * t));
    p.printed[0] = pre * e1 + t / (t + 1.0) * ga;
    p.printed[1] = -pre * e2 + t / (t + 1.0) * gb;
    const double front = a * std::sqrt(std::pow(t, 5) / std::pow(t + 1.0, 3)) * std::exp(-a * a / (2.0 * (t + 1.0)));
    const double erfc_pair = std::sqrt(kPi * t * t * t / 2.0) * (erfc(a / std::sqrt(2.0 * t)) + erfc(a / std::sqrt(2.0 * (t + 1.0))));
    const double tw = std::sqrt(2.0 * kPi * t * t * t);
    const double tk = a / std::sqrt(t + 1.0), th = a / std::sqrt(t);
    p.printed[2] = front * e1 + (a * t + r2 * t * t / (std::sqrt(kPi) * (t + 1.0))) * ga + erfc_pair -
                   tw * owen_t(tk, 1.0 / std::sqrt(t));
    p.printed[3] = front * e2 + a * t * erfc(r2 * a) * ga - r2 * t * t / (std::sqrt(kPi) * (t + 1.0)) * gb + erfc_pair -
                   tw * (owen_t(tk, (2.0 * t + 1.0) / std::sqrt(t)) + owen_t(th, 2.0 * std::sqrt(t)));

    // Corrected III and IV: the two orthant parts of h_a, rescaled by 2 sqrt(2 pi) t^{3/2}.
    const double h = th, k = tk;
    const double rho = std::sqrt(t / (t + 1.0)), s = 1.0 / std::sqrt(t + 1.0);
    const double c1 = a / std::sqrt(t * (t + 1.0)), c2 = a * (2.0 * t + 1.0) / std::sqrt(t * (t + 1.0));
    const double half = 0.5 * (normal_sf(h) + normal_sf(k));
    const double ep = half - owen_t(k, 1.0 / std::sqrt(t)) + h * normal_pdf(h) / 2.0 +
                      rho * normal_pdf(k) * (rho * k * normal_sf(c1) + s * normal_pdf(c1));
    const double em = half - owen_t(h, 2.0 * std::sqrt(t)) - owen_t(k, (2.0 * t + 1.0) / std::sqrt(t)) +
                      h * normal_pdf(h) * normal_sf(2.0 * a) +
                      normal_pdf(k) * (rho * rho * k * normal_sf(c2) - rho * s * normal_pdf(c2));
    const double scale = 2.0 * std::sqrt(2.0 * kPi) * std::pow(t, 1.5);
    p.corrected[0] = p.printed[0];
    p.corrected[1] = p.printed[1];
    p.corrected[2] = scale * ep;
    p.corrected[3] = scale * em;

    auto q = [](auto f, double lo) { return integrate(f, lo, kInf, 1e-12).value; };
    p.quadrature[0] = q([&](double x) { return x * std::exp(-0.5 * (a - x) * (a - x) - x * x / (2.0 * t)); }, a);
    p.quadrature[1] = q([&](double x) { return x * std::exp(-0.5 * (a + x) * (a + x) - x * x / (2.0 * t)); }, a);
    p.quadrature[2] = q([&](double x) { return x * x * std::exp(-x * x / (2.0 * t)) * erfc((a - x) / r2); }, a);
    p.quadrature[3] = q([&](double x) { return x * x * std::exp(-x * x / (2.0 * t)) * erfc((a + x) / r2); }, a);
    return p;
}

double h_a_printed(double a, double t, bool positive_exponent_t) {
    check_at(a, t);
    auto T = [positive_exponent_t](double h, double b) {
        return positive_exponent_t ? owen_t_positive_exponent(h, b) : owen_t(h, b);
    };
    const double s = std::sqrt(2.0 * t * (t + 1.0));
    double r = a / std::sqrt(2.0 * kPi * (1.0 + t)) * std::exp(-a * a / (2.0 * (1.0 + t))) *
               (erfc(a / s) + erfc(a * (2.0 * t + 1.0) / s));
    r += 1.0 / (kPi * std::sqrt(t)) * (std::exp(-a * a / (2.0 * t)) - std::exp(-a * a * (4.0 * t + 1.0) / (2.0 * t)));
    r += a / std::sqrt(2.0 * kPi * t) * std::exp(-a * a / (2.0 * t)) * (1.0 + erfc(std::sqrt(2.0) * a)) +
         erfc(a / std::sqrt(2.0 * t));
    r += erfc(a / std::sqrt(2.0 * (t + 1.0))) - T(a / std::sqrt(t + 1.0), 1.0 / std::sqrt(t)) -
         T(a / std::sqrt(t + 1.0), (2.0 * t + 1.0) / std::sqrt(t)) - T(a / std::sqrt(t), 2.0 * std::sqrt(t));
    return r;
}

// ---------------------------------------------------------------------------------------------

namespace {

constexpr std::size_t kPanelNodes = 16;
constexpr double kTableStep = 0.005;

// Killed Brownian unit-time kernel, without the h-transform factor y/x.
double killed_kernel(double x, double y) { return normal_pdf(y - x) - normal_pdf(y + x); }

}  // namespace

GridAvoidance::GridAvoidance(double a, double span, double panel_width) : a_(a), top_(a + span) {
    require(std::isfinite(a) && a > 0.0, "level a must be positive");
    require(span > 0.0 && panel_width > 0.0 && panel_width <= span, "invalid discretisation");
    using GL = boost::math::quadrature::gauss<double, kPanelNodes>;
    const auto& abs = GL::abscissa();
    const auto& wts = GL::weights();
    const auto panels = static_cast<std::size_t>(std::ceil(span / panel_width));
    const double h = span / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * h;
        // boost stores the nonnegative half of the symmetric rule
        for (std::size_t i = 0; i < abs.size(); ++i) {
            for (int sgn : {-1, 1}) {
                if (abs[i] == 0.0 && sgn < 0) continue;
                nodes_.push_back(mid + sgn * abs[i] * h / 2.0);
                weights_.push_back(wts[i] * h / 2.0);
            }
        }
    }
    const std::size_t n = nodes_.size();
    Eigen::MatrixXd m(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = -weights_[j] * killed_kernel(nodes_[i], nodes_[j]);
        m(i, i) += 1.0;
        rhs(i) = source(nodes_[i]);
    }
    // v beyond the span is tied to the last node
    const std::size_t last = static_cast<std::size_t>(std::max_element(nodes_.begin(), nodes_.end()) - nodes_.begin());
    for (std::size_t i = 0; i < n; ++i) m(i, last) -= normal_sf(top_ - nodes_[i]) - normal_sf(top_ + nodes_[i]);
    const Eigen::VectorXd sol = m.partialPivLu().solve(rhs);
    v_.assign(sol.data(), sol.data() + n);
    tail_v_ = v_[last];
    // Tabulate the Nystrom interpolant so g(u) costs O(1) per point.
    const auto cells = static_cast<std::size_t>(std::ceil(span / kTableStep));
    std::vector<double> table(cells + 1);
    const double step = span / static_cast<double>(cells);
    for (std::size_t i = 0; i <= cells; ++i) table[i] = v_nystrom(a + static_cast<double>(i) * step);
    spline_ = std::make_shared<const Spline>(table.begin(), table.end(), a, step);
}

double GridAvoidance::source(double x) const {
    // int_0^a y (pdf(y - x) - pdf(y + x)) dy
    const double a = a_;
    const double inner = normal_cdf(a - x) - normal_cdf(-x) + normal_cdf(a + x) - normal_cdf(x);
    return x * inner - normal_pdf(a - x) + normal_pdf(a + x);
}

double GridAvoidance::v(double x) const { return x < top_ ? (*spline_)(x) : v_nystrom(x); }

double GridAvoidance::v_nystrom(double x) const {
    double s = source(x);
    for (std::size_t j = 0; j < nodes_.size(); ++j) s += weights_[j] * killed_kernel(x, nodes_[j]) * v_[j];
    return s + tail_v_ * (normal_sf(top_ - x) - normal_sf(top_ + x));
}

double GridAvoidance::phi(double x) const {
    require(x > a_, "start must lie above the level");
    return std::clamp(1.0 - v(x) / x, 0.0, 1.0);
}

double GridAvoidance::g(double u) const {
    require(std::isfinite(u) && u > 0.0, "time u must be positive");
    const double su = std::sqrt(u);
    const double c = std::sqrt(2.0 / kPi) * std::pow(u, -1.5);
    auto f = [&](double x) { return c * x * std::exp(-x * x / (2.0 * u)) * v(x); };
    const double hi = std::max(a_, su) + 40.0 * su;
    const double loss = integrate(f, a_, hi, 1e-12, 12).value;
    return std::clamp(k_a(a_, u) - loss, 0.0, 1.0);
}

void ValleyEvaluator::validate() const {
    require(product_depth >= 1, "product_depth must be at least 1");
    require(product_tol > 0.0 && quad_tol > 0.0 && mean_cutoff_tail > 0.0, "tolerances must be positive");
    require(min_exact_terms >= 8, "min_exact_terms must be at least 8");
    require(arm_span > 0.0 && arm_panel_width > 0.0 && arm_panel_width <= arm_span, "invalid arm discretisation");
}

namespace {

// log of the conditional factor H^a(t)/K^a(t), clamped to a probability.
double log_factor(double a, double t) {
    const double kk = k_a(a, t);
    if (kk <= 0.0) return -kInf;
    const double r = std::min(h_a(a, t) / kk, 1.0);
    return r > 0.0 ? std::log(r) : -kInf;
}

constexpr double kTailPowers[4] = {1.5, 2.5, 3.0, 3.5};

// sum_{k>=n} -log factor(k+u), from the asymptotic series fitted at (n+u) 2^i, i = 0..3.
double fitted_tail(double a, double u, std::size_t n) {
    const double t0 = static_cast<double>(n) + u;
    Eigen::Matrix4d m;
    Eigen::Vector4d f;
    for (int i = 0; i < 4; ++i) {
        const double x = std::ldexp(1.0, i);
        f(i) = -log_factor(a, t0 * x) * std::pow(t0, kTailPowers[0]);
        for (int j = 0; j < 4; ++j) m(i, j) = std::pow(x, -kTailPowers[j]) * std::pow(t0, kTailPowers[0] - kTailPowers[j]);
    }
    const Eigen::Vector4d c = m.fullPivLu().solve(f);
    double tail = 0.0;
    for (int j = 0; j < 4; ++j) tail += c(j) * hurwitz_zeta(kTailPowers[j], t0);
    return tail;
}

}  // namespace

double ValleyEvaluator::product_tail_bound(double a, double u, std::size_t n) {
    // 1 - H/K <= P(R(t+1) <= a) / K(t) and P(R(s) <= a) <= sqrt(2/pi) a^3 / (3 s^{3/2}).
    const double t0 = static_cast<double>(n) + u;
    const double kt = k_a(a, t0);
    const double x0 = std::sqrt(2.0 / kPi) * a * a * a / (3.0 * std::pow(t0 + 1.0, 1.5) * kt);
    if (!(x0 < 1.0)) return kInf;
    const double c = std::sqrt(2.0 / kPi) * a * a * a / (3.0 * kt * (1.0 - x0));
    return c * hurwitz_zeta(1.5, t0 + 1.0);
}

Estimate ValleyEvaluator::g_a(double a, double u) const {
    validate();
    if (method == GaMethod::product) return g_a_product(a, u);
    require(u > 0.0 && u < 1.0, "phase u must lie in (0, 1)");
    Estimate e;
    e.value = GridAvoidance(a, arm_span, arm_panel_width).g(u);
    e.terms = static_cast<std::size_t>(std::ceil(arm_span / arm_panel_width)) * kPanelNodes;
    return e;
}

Estimate ValleyEvaluator::g_a_product(double a, double u) const {
    validate();
    require(std::isfinite(a) && a > 0.0, "level a must be positive");
    require(u > 0.0 && u < 1.0, "phase u must lie in (0, 1)");
    Estimate e;
    const double head = std::min(h_a(a, u), k_a(a, u));
    if (head <= 0.0) {
        e.value = 0.0;
        e.terms = 1;
        return e;
    }
    std::size_t n = std::max<std::size_t>(min_exact_terms, static_cast<std::size_t>(std::ceil(50.0 * a * a)));
    // partial[k] = sum_{j=1}^{k} log factor(j+u)
    std::vector<double> partial(1, 0.0);
    auto extend = [&](std::size_t upto) {
        while (partial.size() < upto) {
            const double lf = log_factor(a, static_cast<double>(partial.size()) + u);
            partial.push_back(partial.back() + lf);
        }
    };
    auto estimate = [&](std::size_t m) {
        extend(m);
        return partial[m - 1] - fitted_tail(a, u, m);
    };
    if (16 * n > product_depth) {
        n = std::max<std::size_t>(1, product_depth / 16);
    }
    double e1 = estimate(n), e2 = estimate(2 * n);
    while (std::abs(e1 - e2) > product_tol && 16 * (2 * n) <= product_depth) {
        n *= 2;
        e1 = e2;
        e2 = estimate(2 * n);
    }
    const double lg = std::log(head) + e2;
    e.value = std::isfinite(lg) ? std::exp(lg) : 0.0;
    e.error_estimate = e.value * std::abs(e1 - e2);
    e.converged = std::abs(e1 - e2) <= product_tol;
    e.terms = 2 * n;
    return e;
}

Estimate ValleyEvaluator::valley_tail(double a, bool symmetric) const {
    validate();
    require(std::isfinite(a) && a > 0.0, "level a must be positive");
    double gerr = 0.0;
    bool ok = true;
    std::size_t terms = 0;
    std::unique_ptr<GridAvoidance> arm;
    if (method == GaMethod::transfer) arm = std::make_unique<GridAvoidance>(a, arm_span, arm_panel_width);
    auto g = [&](double u) {
        if (!arm) return g_a_product(a, u);
        Estimate e;
        e.value = arm->g(u);
        return e;
    };
    auto integrand = [&](double u) {
        const Estimate g1 = g(u), g2 = g(1.0 - u);
        ok = ok && g1.converged && g2.converged;
        terms = std::max({terms, g1.terms, g2.terms});
        gerr = std::max(gerr, g1.error_estimate * g2.value + g2.error_estimate * g1.value);
        return g1.value * g2.value;
    };
    const QuadResult q = integrate_global(integrand, 0.0, symmetric ? 0.5 : 1.0, quad_tol, quad_tol);
    Estimate e;
    const double f = symmetric ? 2.0 : 1.0;
    e.value = f * q.value;
    e.error_estimate = f * q.error + gerr;
    e.converged = ok && q.converged;
    e.terms = terms;
    return e;
}

double ValleyEvaluator::mean_cutoff() const {
    double lo = 0.5, hi = 1.0;
    auto env = [](double a) { return std::pow(k_a(a, 1.0), 2); };
    while (env(hi) >= mean_cutoff_tail) hi *= 2.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (env(mid) >= mean_cutoff_tail ? lo : hi) = mid;
    }
    return hi;
}

Estimate ValleyEvaluator::valley_mean() const {
    validate();
    const double A = mean_cutoff();
    // P(M > a) <= G^a(u) G^a(1-u) <= K^a(1)^2 for every u, since K^a increases in t.
    const double remainder = integrate([](double a) { return std::pow(k_a(a, 1.0), 2); }, A, kInf, 1e-10).value;
    double terr = 0.0;
    bool ok = true;
    std::size_t terms = 0;
    auto f = [&](double a) {
        const Estimate t = valley_tail(a);
        terr = std::max(terr, t.error_estimate);
        ok = ok && t.converged;
        terms = std::max(terms, t.terms);
        return t.value;
    };
    const QuadResult q = integrate_global(f, 0.0, A, std::max(quad_tol, 1e-9), 0.0);
    Estimate e;
    e.value = q.value;
    e.error_estimate = q.error + remainder + terr * A;
    e.converged = ok && q.converged;
    e.terms = terms;
    return e;
}

nlohmann::json ValleyEvaluator::settings() const {
    return {{"product_depth", product_depth},
            {"product_tol", product_tol},
            {"quad_tol", quad_tol},
            {"min_exact_terms", min_exact_terms},
            {"mean_cutoff_tail", mean_cutoff_tail},
            {"arm_span", arm_span},
            {"arm_panel_width", arm_panel_width},
            {"method", method == GaMethod::transfer ? "transfer" : "product"}};
}

double valley_mean_target() { return -zeta_alternating(0.5) / std::sqrt(2.0 * kPi); }

// ---------------------------------------------------------------------------------------------

std::vector<double> sample_bes3_grid(const std::vector<double>& times, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(times.size());
    double x[3] = {0.0, 0.0, 0.0}, prev = 0.0;
    for (double t : times) {
        require(std::isfinite(t) && t >= prev, "times must be nondecreasing and nonnegative");
        const double sd = std::sqrt(t - prev);
        for (double& c : x) c += sd * rng.normal();
        out.push_back(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
        prev = t;
    }
    return out;
}

namespace {

// One BES(3) arm R = 2M - B observed at times g0, g0+1, ...
class PitmanArm {
public:
    PitmanArm(double g0, double horizon) : next_(g0), horizon_(horizon) {}

    double max() const { return m_; }
    bool truncated() const { return truncated_; }

    // Advance to the next grid time and return R there.
    double step(Rng& rng) {
        const double dt = next_ - t_;
        const double b1 = b_ + std::sqrt(dt) * rng.normal();
        const double d = b1 - b_;
        const double bridge_max = 0.5 * (b_ + b1 + std::sqrt(d * d - 2.0 * dt * std::log(rng.uniform_pos())));
        m_ = std::max(m_, bridge_max);
        b_ = b1;
        t_ = next_;
        next_ += 1.0;
        return 2.0 * m_ - b_;
    }

    // Jump past grid points where R > level: B must climb to 2M - level first. Returns false if that
    // passage happens after the horizon.
    bool skip_above(double level, Rng& rng) {
        const double c = 2.0 * m_ - level;
        if (b_ >= c) return true;
        const double z = rng.normal();
        const double tau = (c - b_) * (c - b_) / (z * z);
        const double hit = t_ + tau;
        if (!(hit < horizon_)) {
            truncated_ = true;
            return false;
        }
        if (hit > next_) next_ += std::ceil(hit - next_);
        t_ = hit;
        b_ = c;
        return true;
    }

    bool past_horizon() {
        if (next_ > horizon_) truncated_ = true;
        return truncated_;
    }

private:
    double t_ = 0.0, b_ = 0.0, m_ = 0.0;
    double next_;
    double horizon_;
    bool truncated_ = false;
};

}  // namespace

ValleySample sample_valley(std::size_t K, double horizon, std::uint64_t seed) {
    require(horizon >= 1.0, "horizon must be at least 1");
    Rng rng(seed);
    ValleySample s;
    s.u = rng.uniform_pos();
    std::priority_queue<double> keep;  // the K+1 smallest values seen
    auto threshold = [&] { return keep.size() > K ? keep.top() : kInf; };
    // right arm at U, U+1, ...; left arm at 1-U, 2-U, ...
    for (double g0 : {s.u, 1.0 - s.u}) {
        if (g0 <= 0.0) g0 += 1.0;
        PitmanArm arm(g0, horizon);
        while (!(arm.max() >= threshold())) {
            if (std::isfinite(threshold()) && !arm.skip_above(threshold(), rng)) break;
            if (arm.past_horizon()) break;
            const double r = arm.step(rng);
            ++s.grid_points;
            if (keep.size() <= K) {
                keep.push(r);
            } else if (r < keep.top()) {
                keep.pop();
                keep.push(r);
            }
        }
        s.truncated = s.truncated || arm.truncated();
    }
    s.order_stats.resize(keep.size());
    for (std::size_t i = keep.size(); i-- > 0;) {
        s.order_stats[i] = keep.top();
        keep.pop();
    }
    return s;
}

bool sample_arm_above(double a, double u, double horizon, std::uint64_t seed, bool* truncated) {
    require(a > 0.0 && u > 0.0 && u <= 1.0 && horizon >= 1.0, "invalid arm sampling arguments");
    Rng rng(seed);
    PitmanArm arm(u, horizon);
    bool above = true;
    while (arm.max() < a) {
        if (!arm.skip_above(a, rng) || arm.past_horizon()) break;
        if (arm.step(rng) <= a) {
            above = false;
            break;
        }
    }
    if (truncated) *truncated = arm.truncated();
    return above;
}

ValleyMc mc_valley_order_stats(std::size_t K, double horizon, std::size_t reps, std::uint64_t seed, unsigned threads) {
    require(reps >= 2, "need at least 2 replicas");
    std::vector<ValleySample> samples(reps);
    parallel_for(reps, threads, [&](std::size_t r) { samples[r] = sample_valley(K, horizon, replica_seed(seed, r)); });
    ValleyMc out;
    out.K = K;
    out.reps = reps;
    out.horizon = horizon;
    out.seed = seed;
    std::vector<double> s1(K + 1, 0.0), s2(K + 1, 0.0);
    out.m0.reserve(reps);
    for (const auto& s : samples) {
        if (s.truncated) ++out.truncated;
        for (std::size_t k = 0; k <= K; ++k) {
            const double v = k < s.order_stats.size() ? s.order_stats[k] : kInf;
            if (k > 0 && v < s.order_stats[k - 1]) out.nondecreasing = false;
            s1[k] += v;
            s2[k] += v * v;
        }
        out.m0.push_back(s.order_stats.front());
    }
    const double n = static_cast<double>(reps);
    for (std::size_t k = 0; k <= K; ++k) {
        const double m = s1[k] / n;
        out.mean.push_back(m);
        out.se.push_back(std::sqrt(std::max(0.0, s2[k] / n - m * m) / (n - 1.0)));
    }
    return out;
}

nlohmann::json ValleyMc::to_json(bool include_samples) const {
    nlohmann::json j = {{"K", K},       {"reps", reps},           {"horizon", horizon},
                        {"seed", seed}, {"mean", mean},           {"se", se},
                        {"truncated", truncated}, {"nondecreasing", nondecreasing}};
    if (include_samples) j["m0"] = m0;
    return j;
}

Discretization discretization_experiment(std::size_t n, std::size_t substeps, std::size_t reps, std::uint64_t seed,
                                         bool exact_bridge, unsigned threads) {
    require(n >= 1 && reps >= 2, "need n >= 1 and at least 2 replicas");
    require(exact_bridge || substeps >= 100, "substeps must be at least 100");
    Discretization d;
    d.n = n;
    d.substeps = exact_bridge ? 0 : substeps;
    d.reps = reps;
    d.seed = seed;
    d.exact_bridge = exact_bridge;
    d.diff.assign(reps, 0.0);
    parallel_for(reps, threads, [&](std::size_t r) {
        Rng rng(replica_seed(seed, r));
        double b = 0.0, walk_min = 0.0, path_min = 0.0;
        const double fine_sd = exact_bridge ? 1.0 : std::sqrt(1.0 / static_cast<double>(substeps));
        for (std::size_t j = 0; j < n; ++j) {
            if (exact_bridge) {
                const double b1 = b + rng.normal();
                const double g = b1 - b;
                const double bridge_min = 0.5 * (b + b1 - std::sqrt(g * g - 2.0 * std::log(rng.uniform_pos())));
                path_min = std::min(path_min, bridge_min);
                b = b1;
            } else {
                for (std::size_t i = 0; i < substeps; ++i) {
                    b += fine_sd * rng.normal();
                    path_min = std::min(path_min, b);
                }
            }
            walk_min = std::min(walk_min, b);
        }
        d.diff[r] = walk_min - path_min;
    });
    double s1 = 0.0, s2 = 0.0;
    for (double v : d.diff) {
        s1 += v;
        s2 += v * v;
    }
    const double m = s1 / static_cast<double>(reps);
    d.mean = m;
    d.se = std::sqrt(std::max(0.0, s2 / static_cast<double>(reps) - m * m) / static_cast<double>(reps - 1));
    return d;
}

nlohmann::json Discretization::to_json(bool include_samples) const {
    nlohmann::json j = {{"n", n},       {"substeps", substeps}, {"reps", reps},   {"seed", seed},
                        {"exact_bridge", exact_bridge}, {"mean", mean}, {"se", se}};
    if (include_samples) j["diff"] = diff;
    return j;
}

}  // namespace rwos
