#include "mmfso/quad.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmfso/errors.hpp"

namespace mmfso {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

QuadResult single_rule(const RealFn& f, double a, double b) {
    QuadResult r;
    r.value = GK::integrate(f, a, b, 0, 0.0, &r.error, &r.l1);
    // Boost reports the single-rule error on the reference interval [-1, 1].
    r.error *= 0.5 * (b - a);
    return r;
}

// Bisection until each panel meets its share of an absolute tolerance or
// its own relative tolerance. A global absolute target keeps panels that
// contribute nothing from being refined to the maximum depth.
QuadResult refine(const RealFn& f, double a, double b, const QuadResult& coarse, double rel_tol,
                  double abs_tol, unsigned depth) {
    if (depth == 0 || coarse.error <= abs_tol || coarse.error <= rel_tol * std::abs(coarse.value)) return coarse;
    const double mid = 0.5 * (a + b);
    const QuadResult left = refine(f, a, mid, single_rule(f, a, mid), rel_tol, 0.5 * abs_tol, depth - 1);
    const QuadResult right = refine(f, mid, b, single_rule(f, mid, b), rel_tol, 0.5 * abs_tol, depth - 1);
    return {left.value + right.value, left.error + right.error, left.l1 + right.l1};
}

RealFn to_unit(const RealFn& f, double a, double scale) {
    return [f, a, scale](double t) -> double {
        if (t >= 1.0) return 0.0;
        const double one_minus = 1.0 - t;
        const double x = a + scale * t / one_minus;
        if (!std::isfinite(x)) return 0.0;
        const double v = f(x);
        return v == 0.0 ? 0.0 : v * scale / (one_minus * one_minus);
    };
}

void check(const QuadResult& r) {
    if (!std::isfinite(r.value)) throw NumericError("integrate: non-finite integrand");
}

}  // namespace

QuadResult integrate(const RealFn& f, double a, double b, double rel_tol, unsigned max_depth) {
    if (a == b) return {};
    const QuadResult coarse = single_rule(f, a, b);
    const QuadResult r = refine(f, a, b, coarse, rel_tol, rel_tol * std::abs(coarse.value), max_depth);
    check(r);
    return r;
}

QuadResult integrate(const RealFn& f, double a, double b, double rel_tol, double abs_tol, unsigned max_depth) {
    if (a == b) return {};
    const QuadResult coarse = single_rule(f, a, b);
    const QuadResult r =
        refine(f, a, b, coarse, rel_tol, std::max(abs_tol, rel_tol * std::abs(coarse.value)), max_depth);
    check(r);
    return r;
}

QuadResult integrate_to_inf(const RealFn& f, double a, double scale, double rel_tol, unsigned max_depth) {
    if (!(scale > 0.0)) throw NumericError("integrate_to_inf: scale must be positive");
    return integrate(to_unit(f, a, scale), 0.0, 1.0, rel_tol, max_depth);
}

QuadResult integrate_pieces(const RealFn& f, const std::vector<double>& breaks, double rel_tol,
                            unsigned max_depth) {
    struct Piece {
        RealFn g;
        double a, b;
        QuadResult coarse;
    };
    std::vector<Piece> pieces;
    double magnitude = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        if (!(b > a)) continue;
        Piece p;
        if (std::isinf(b)) {
            p.g = to_unit(f, a, a > 0.0 ? a : 1.0);
            p.a = 0.0;
            p.b = 1.0;
        } else {
            p.g = f;
            p.a = a;
            p.b = b;
        }
        p.coarse = single_rule(p.g, p.a, p.b);
        magnitude += std::abs(p.coarse.value);
        pieces.push_back(std::move(p));
    }
    const double abs_tol = pieces.empty() ? 0.0 : rel_tol * magnitude / static_cast<double>(pieces.size());
    QuadResult total;
    for (const auto& p : pieces) {
        const QuadResult r = refine(p.g, p.a, p.b, p.coarse, rel_tol, abs_tol, max_depth);
        total.value += r.value;
        total.error += r.error;
        total.l1 += r.l1;
    }
    check(total);
    return total;
}

}  // namespace mmfso
