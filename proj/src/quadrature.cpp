#include "rwos/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rwos/error.hpp"

namespace rwos {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     unsigned max_depth) {
    QuadResult r;
    r.value = Rule::integrate(f, a, b, max_depth, rel_tol, &r.error, &r.l1);
    r.converged = r.error <= rel_tol * r.l1 * 10.0 || r.error < 1e-300;
    return r;
}

QuadResult integrate_global(const std::function<double(double)>& f, double a, double b, double abs_tol,
                            double rel_tol, std::size_t max_intervals) {
    require(std::isfinite(a) && std::isfinite(b) && a < b, "global quadrature needs a finite interval");
    struct Piece {
        double lo, hi, value, error, l1;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    auto rule = [&](double lo, double hi) {
        Piece p{lo, hi, 0.0, 0.0, 0.0};
        p.value = Rule::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
        return p;
    };
    std::priority_queue<Piece> heap;
    heap.push(rule(a, b));
    double value = heap.top().value, error = heap.top().error;
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) && heap.size() < max_intervals) {
        const Piece p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.lo + p.hi);
        if (!(mid > p.lo && mid < p.hi)) break;
        const Piece l = rule(p.lo, mid), r = rule(mid, p.hi);
        value += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
    }
    QuadResult out;
    out.intervals = heap.size();
    // Re-sum from the pieces in interval order so the running updates leave no drift.
    std::vector<Piece> pieces;
    while (!heap.empty()) {
        pieces.push_back(heap.top());
        heap.pop();
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.lo < y.lo; });
    for (const auto& p : pieces) {
        out.value += p.value;
        out.error += p.error;
        out.l1 += p.l1;
    }
    out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(out.value));
    return out;
}

}  // namespace rwos
