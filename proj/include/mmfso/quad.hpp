#pragma once

#include <functional>
#include <vector>

namespace mmfso {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    double l1 = 0.0;     // integral of |f|
};

using RealFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod on a finite interval.
QuadResult integrate(const RealFn& f, double a, double b, double rel_tol = 1e-10,
                     unsigned max_depth = 15);

// As above; a panel is also accepted once its error is below its share of abs_tol.
QuadResult integrate(const RealFn& f, double a, double b, double rel_tol, double abs_tol,
                     unsigned max_depth);

// Integral over [a, inf) after the map x = a + scale * t / (1 - t); `scale`
// should be of the order of where f lives.
QuadResult integrate_to_inf(const RealFn& f, double a, double scale, double rel_tol = 1e-10,
                            unsigned max_depth = 15);

// Sum of finite pieces between consecutive breakpoints; a final +inf
// breakpoint is handled with integrate_to_inf.
QuadResult integrate_pieces(const RealFn& f, const std::vector<double>& breaks,
                            double rel_tol = 1e-10, unsigned max_depth = 15);

}  // namespace mmfso
