#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mmfso/errors.hpp"
#include "mmfso/meijer_g.hpp"
#include "mmfso/quad.hpp"

using namespace mmfso;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
    return out;
}

}  // namespace

TEST_CASE("exponential reduction") {
    const MeijerGSpec g{1, 0, {}, {0.0}};
    CHECK(meijer_g(g, 1.0) == doctest::Approx(0.36787944117).epsilon(1e-10));
    for (double x : log_grid(0.01, 100.0, 25)) {
        const double v = meijer_g(g, x);
        CHECK(std::abs(v / std::exp(-x) - 1.0) < 1e-8);
    }
}

TEST_CASE("logarithm reduction") {
    const MeijerGSpec g{1, 2, {1.0, 1.0}, {1.0, 0.0}};
    CHECK(meijer_g(g, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    for (double x : log_grid(0.01, 100.0, 25)) {
        const double v = meijer_g(g, x);
        CHECK(std::abs(v / std::log1p(x) - 1.0) < 1e-8);
    }
}

TEST_CASE("Bessel K and incomplete gamma reductions") {
    // G^{2,0}_{0,2}(x | b1, b2) = 2 x^{(b1+b2)/2} K_{b1-b2}(2 sqrt x)
    for (auto [b1, b2] : {std::pair{0.7, 0.2}, std::pair{1.5, 0.0}, std::pair{0.0, 0.0}}) {
        const MeijerGSpec g{2, 0, {}, {b1, b2}};
        for (double x : {0.05, 1.0, 9.0, 60.0}) {
            const double oracle = 2.0 * std::pow(x, 0.5 * (b1 + b2)) *
                                  std::cyl_bessel_k(std::abs(b1 - b2), 2.0 * std::sqrt(x));
            CHECK(meijer_g(g, x) == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
    // Lower incomplete gamma: gamma(a, x) = G^{1,1}_{1,2}(x | 1; a, 0)
    for (double a : {0.5, 2.0, 3.7})
        for (double x : {0.1, 2.0, 15.0}) {
            const MeijerGSpec g{1, 1, {1.0}, {a, 0.0}};
            const double oracle = std::tgamma(a) - std::tgamma(a) * 0.0 -
                                  integrate_to_inf([&](double t) { return std::pow(t, a - 1) * std::exp(-t); }, x, 1.0, 1e-13).value;
            CHECK(meijer_g(g, x) == doctest::Approx(oracle).epsilon(1e-8));
        }
}

TEST_CASE("appendix integral instance against quadrature") {
    // int_0^inf x^{a-1} e^{-bx} log(1+x) dx = b^{-a} G^{1,3}_{3,2}(1/b | 1-a, 1, 1; 1, 0)
    for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{3.0, 0.4}, std::pair{2.5, 7.0}, std::pair{6.0, 0.05}}) {
        const MeijerGSpec g{1, 3, {1.0 - a, 1.0, 1.0}, {1.0, 0.0}};
        const double closed = std::pow(b, -a) * meijer_g(g, 1.0 / b);
        const double oracle = integrate_to_inf(
            [&](double x) { return std::pow(x, a - 1) * std::exp(-b * x) * std::log1p(x); }, 0.0,
            a / b, 1e-13).value;
        CHECK(closed == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("series and contour agree") {
    const MeijerGSpec g{2, 1, {0.3}, {0.25, 0.9, 0.1}};
    for (double x : {0.02, 0.3, 0.8}) {
        const auto c = meijer_g_contour(g, std::log(x));
        const auto s = meijer_g_series(g, std::log(x), false);
        CHECK(c.value == doctest::Approx(s.value).epsilon(1e-9));
        CHECK(c.rel_error < 1e-9);
    }
}

TEST_CASE("coinciding parameters are regularized") {
    // K_0 case: b1 = b2 gives double poles; the series path must use the
    // epsilon/Richardson regularization and still match the Bessel oracle.
    const MeijerGSpec g{2, 0, {}, {0.0, 0.0}};
    for (double x : {0.01, 0.5, 2.0}) {
        const auto s = meijer_g_series(g, std::log(x), false);
        const double oracle = 2.0 * std::cyl_bessel_k(0.0, 2.0 * std::sqrt(x));
        CHECK(s.value == doctest::Approx(oracle).epsilon(1e-7));
    }
    // Poles differing by an integer: b = (0.5, 1.5) -> K_1 family.
    const MeijerGSpec h{2, 0, {}, {1.5, 0.5}};
    const double x = 0.3;
    const double oracle = 2.0 * std::pow(x, 1.0) * std::cyl_bessel_k(1.0, 2.0 * std::sqrt(x));
    CHECK(meijer_g_series(h, std::log(x), false).value == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("leading residues give the small-argument behaviour") {
    const MeijerGSpec g{2, 0, {}, {0.7, 0.2}};
    const double x = 1e-6;
    const double exact = meijer_g(g, x);
    const double lead = meijer_g_leading(g, std::log(x));
    CHECK(lead == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("high-order instance with many parameters") {
    // Product of independent Gamma variables: the density of X1*X2*X3 with
    // shapes s_i is G^{3,0}_{0,3}(x | s1-1, s2-1, s3-1) / prod Gamma(s_i).
    // Check it integrates to one.
    const double s1 = 1.3, s2 = 2.2, s3 = 0.8;
    const MeijerGSpec g{3, 0, {}, {s1 - 1, s2 - 1, s3 - 1}};
    const double norm = std::tgamma(s1) * std::tgamma(s2) * std::tgamma(s3);
    auto f = [&](double u) {
        const double x = std::exp(u);
        return x * meijer_g_eval(g, u).value / norm;
    };
    const double total = integrate(f, -60.0, 8.0, 1e-10).value;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("invalid specs") {
    CHECK_THROWS_AS(meijer_g(MeijerGSpec{2, 0, {}, {0.0}}, 1.0), NumericError);
    CHECK_THROWS_AS(meijer_g(MeijerGSpec{1, 0, {}, {0.0}}, -1.0), NumericError);
    CHECK_THROWS_AS(meijer_g(MeijerGSpec{0, 0, {}, {0.0}}, 1.0), NumericError);
}
