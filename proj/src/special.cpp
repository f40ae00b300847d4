#include "rwos/special.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/owens_t.hpp>
#include <gsl/gsl_sf_zeta.h>

#include "rwos/error.hpp"

namespace rwos {

double erfc(double x) { return std::erfc(x); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double owen_t(double h, double a) { return boost::math::owens_t(h, a); }

double owen_t_positive_exponent(double h, double a) {
    if (a == 0.0) return 0.0;
    auto f = [h](double x) { return std::exp(0.5 * h * h * (1.0 + x * x)) / (1.0 + x * x); };
    const double lo = std::min(0.0, a), hi = std::max(0.0, a);
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 30, 1e-13);
    return (a > 0 ? v : -v) / (2.0 * kPi);
}

double hurwitz_zeta(double s, double q) {
    require(s > 1.0 && q > 0.0, "hurwitz zeta needs s > 1 and q > 0");
    gsl_sf_result r;
    const int status = gsl_sf_hzeta_e(s, q, &r);
    if (status != 0) throw Error(Status::not_converged, "hurwitz zeta evaluation failed");
    return r.val;
}

double zeta_alternating(double s, int n) {
    require(s != 1.0, "zeta has a pole at s = 1");
    require(n >= 4, "need at least 4 terms");
    // eta(s) = sum_{k>=0} (-1)^k (k+1)^{-s}, summed with Chebyshev-weighted acceleration.
    const double sq = std::sqrt(8.0);
    double d = std::pow(3.0 + sq, n);
    d = (d + 1.0 / d) / 2.0;
    double b = -1.0, c = -d, sum = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        sum += c * std::pow(k + 1.0, -s);
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
    }
    const double eta = sum / d;
    return eta / (1.0 - std::pow(2.0, 1.0 - s));
}

}  // namespace rwos
