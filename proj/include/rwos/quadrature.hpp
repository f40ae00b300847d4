#pragma once

#include <cstddef>
#include <functional>

namespace rwos {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    std::size_t intervals = 0;
    bool converged = true;
};

/// Adaptive Gauss-Kronrod (7/15) with recursive bisection on [a, b]; b may be +infinity.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                     unsigned max_depth = 20);

/// Globally adaptive Gauss-Kronrod (7/15) on a finite [a, b]: the interval with the largest error
/// estimate is bisected until the summed error is below max(abs_tol, rel_tol |I|). Evaluation
/// order is fixed, so results are reproducible.
QuadResult integrate_global(const std::function<double(double)>& f, double a, double b, double abs_tol,
                            double rel_tol, std::size_t max_intervals = 4000);

}  // namespace rwos
