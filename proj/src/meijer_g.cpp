#include "mmfso/meijer_g.hpp"
#include "mmfso/quad.hpp"


#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "mmfso/errors.hpp"
#include "mmfso/specfun.hpp"
#include "mmfso/summation.hpp"

namespace mmfso {

namespace {

using cplx = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAccept = 1e-6;  // worst relative error we hand back

// Logarithm of the Mellin-Barnes kernel at complex s.
cplx log_kernel(const MeijerGSpec& g, cplx s, double log_x) {
    cplx acc = s * log_x;
    for (int j = 0; j < g.m; ++j) acc += log_gamma(g.b[j] - s);
    for (int j = 0; j < g.n; ++j) acc += log_gamma(1.0 - g.a[j] + s);
    for (int j = g.m; j < g.q(); ++j) acc -= log_gamma(1.0 - g.b[j] + s);
    for (int j = g.n; j < g.p(); ++j) acc -= log_gamma(g.a[j] - s);
    return acc;
}

// Real part of the kernel log on the real axis, plus the summed magnitude of
// its pieces (a proxy for the rounding error of exp(log_kernel)).
struct RealKernel {
    double value;
    double magnitude;
};

RealKernel log_kernel_real(const MeijerGSpec& g, double c, double log_x) {
    double acc = c * log_x;
    double mag = std::abs(acc);
    auto add = [&](double arg, double sgn) {
        int sign = 0;
        const double v = log_abs_gamma(arg, &sign);
        if (sign == 0) {
            acc += sgn * kInf;
            mag = kInf;
            return;
        }
        acc += sgn * v;
        mag += std::abs(v);
    };
    for (int j = 0; j < g.m; ++j) add(g.b[j] - c, 1.0);
    for (int j = 0; j < g.n; ++j) add(1.0 - g.a[j] + c, 1.0);
    for (int j = g.m; j < g.q(); ++j) add(1.0 - g.b[j] + c, -1.0);
    for (int j = g.n; j < g.p(); ++j) add(g.a[j] - c, -1.0);
    if (std::isnan(acc)) acc = -kInf;
    return {acc, mag};
}

// Pick the real abscissa of the integration line: the minimum of the kernel
// modulus on the real segment strictly inside the fundamental strip.
double choose_abscissa(const MeijerGSpec& g, double lo, double hi, double log_x) {
    auto phi = [&](double c) {
        const double v = log_kernel_real(g, c, log_x).value;
        return std::isfinite(v) ? v : kInf;
    };

    std::vector<double> cand;
    if (std::isfinite(lo) && std::isfinite(hi)) {
        const double margin = std::min(0.25, 0.1 * (hi - lo));
        const double l = lo + margin, r = hi - margin;
        for (int i = 0; i <= 40; ++i) cand.push_back(l + (r - l) * i / 40.0);
    } else {
        double anchor;
        if (std::isfinite(hi)) anchor = hi - std::min(0.25, 0.5);
        else if (std::isfinite(lo)) anchor = lo + std::min(0.25, 0.5);
        else anchor = 0.0;
        cand.push_back(anchor);
        if (std::isfinite(lo) && !std::isfinite(hi)) {
            for (int k = 0; k < 15; ++k) cand.push_back(anchor + 0.25 * std::ldexp(1.0, k));
        } else if (!std::isfinite(lo) && std::isfinite(hi)) {
            for (int k = 0; k < 15; ++k) cand.push_back(anchor - 0.25 * std::ldexp(1.0, k));
        } else {
            for (int k = 0; k < 15; ++k) {
                cand.push_back(anchor + 0.25 * std::ldexp(1.0, k));
                cand.push_back(anchor - 0.25 * std::ldexp(1.0, k));
            }
        }
        std::sort(cand.begin(), cand.end());
        if (std::isfinite(lo)) {
            const double l = lo + std::min(0.25, 0.5);
            for (double& c : cand) c = std::max(c, l);
        }
    }

    std::size_t best = 0;
    double best_v = kInf;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        const double v = phi(cand[i]);
        if (v < best_v) {
            best_v = v;
            best = i;
        }
    }
    if (!std::isfinite(best_v)) return cand[cand.size() / 2];

    // Golden-section refinement between the neighbours of the best grid point.
    double a = cand[best > 0 ? best - 1 : best];
    double b = cand[best + 1 < cand.size() ? best + 1 : best];
    if (a == b) return cand[best];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = phi(x1), f2 = phi(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-6 * (1.0 + std::abs(a)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = phi(x2);
        }
    }
    const double c = 0.5 * (a + b);
    return phi(c) <= best_v ? c : cand[best];
}

void strip_bounds(const MeijerGSpec& g, double* lo, double* hi) {
    *lo = -kInf;
    *hi = kInf;
    for (int j = 0; j < g.n; ++j) *lo = std::max(*lo, g.a[j] - 1.0);
    for (int j = 0; j < g.m; ++j) *hi = std::min(*hi, g.b[j]);
}

// ---------------------------------------------------------------- series

struct SeriesSum {
    double value;
    double abs_error;
};

// A real argument held as integer part plus fraction so that distances to
// Gamma poles survive the k-shifts of a residue series.
struct ShiftedArg {
    long long whole;
    double frac;
};

ShiftedArg split(double u) {
    const double r = std::round(u);
    return {static_cast<long long>(r), u - r};
}

// log|Gamma(whole + frac)|; sign 0 marks a pole.
double log_abs_gamma_split(ShiftedArg z, int* sign) {
    const double value = static_cast<double>(z.whole) + z.frac;
    if (value >= 0.5) return log_abs_gamma(value, sign);
    // Gamma(z) = pi / (sin(pi z) Gamma(1 - z)), sin(pi z) = (-1)^whole sin(pi frac)
    double sn = std::sin(std::numbers::pi * z.frac);
    if (z.whole % 2 != 0) sn = -sn;
    if (sn == 0.0) {
        *sign = 0;
        return kInf;
    }
    const double reflected = static_cast<double>(1 - z.whole) - z.frac;
    int s2 = 1;
    const double lg = log_abs_gamma(reflected, &s2);
    *sign = (sn > 0.0 ? 1 : -1) * s2;
    return std::log(std::numbers::pi) - std::log(std::abs(sn)) - lg;
}

// Right-pole residue sum. `pert` shifts b_j (j < m); `group` gives the
// collision-group id of each b_j (or -1) so that intra-group differences are
// formed as exact integers plus the perturbation difference. max_k = 0 keeps
// only the leading residue of each pole family.
SeriesSum right_residues(const MeijerGSpec& g, const std::vector<double>& pert,
                         const std::vector<int>& group, double log_x, int max_k) {
    double mass = 0.0;
    CompensatedSum total;
    for (int h = 0; h < g.m; ++h) {
        const double bh = g.b[h] + pert[h];
        std::vector<ShiftedArg> num_minus, num_plus, den_plus, den_minus;
        for (int j = 0; j < g.m; ++j) {
            if (j == h) continue;
            if (group[j] >= 0 && group[j] == group[h])
                num_minus.push_back({std::llround(g.b[j] - g.b[h]), pert[j] - pert[h]});
            else
                num_minus.push_back(split(g.b[j] + pert[j] - bh));
        }
        for (int j = 0; j < g.n; ++j) num_plus.push_back(split(1.0 - g.a[j] + bh));
        for (int j = g.m; j < g.q(); ++j) den_plus.push_back(split(1.0 - g.b[j] + bh));
        for (int j = g.n; j < g.p(); ++j) den_minus.push_back(split(g.a[j] - bh));

        CompensatedSum partial;
        double prev_abs = kInf;
        int small_run = 0;
        bool converged = (max_k == 0);
        for (int k = 0; k <= std::max(max_k, 0); ++k) {
            double log_t = (bh + k) * log_x - std::lgamma(k + 1.0);
            int sign = (k % 2 == 0) ? 1 : -1;
            bool zero = false;
            auto mul = [&](ShiftedArg z, bool denom) {
                int sg = 0;
                const double v = log_abs_gamma_split(z, &sg);
                if (sg == 0) {
                    if (denom) {
                        zero = true;
                        return;
                    }
                    throw ConvergenceError("meijer_g series: coinciding poles not regularized");
                }
                log_t += denom ? -v : v;
                sign *= sg;
            };
            for (auto z : num_minus) if (!zero) mul({z.whole - k, z.frac}, false);
            for (auto z : num_plus) if (!zero) mul({z.whole + k, z.frac}, false);
            for (auto z : den_plus) if (!zero) mul({z.whole + k, z.frac}, true);
            for (auto z : den_minus) if (!zero) mul({z.whole - k, z.frac}, true);
            if (zero) {
                prev_abs = 0.0;
                if (max_k == 0) break;
                // A pole of Gamma(a_j - b_h - k) persists for all larger k.
                const bool permanent = std::any_of(den_minus.begin(), den_minus.end(), [&](ShiftedArg z) {
                    return z.frac == 0.0 && z.whole - k <= 0;
                });
                if (permanent) {
                    converged = true;
                    break;
                }
                continue;
            }
            if (log_t > 700.0) throw ConvergenceError("meijer_g series: term overflow");
            const double t = sign * std::exp(log_t);
            partial.add(t);
            if (max_k == 0) break;
            const double at = std::abs(t);
            const double ref = std::max({std::abs(partial.value()), std::abs(total.value()), 1e-300});
            if (k > 3 && at <= 1e-17 * ref && at <= prev_abs) {
                if (++small_run >= 3) {
                    converged = true;
                    break;
                }
            } else {
                small_run = 0;
            }
            prev_abs = at;
        }
        if (!converged) throw ConvergenceError("meijer_g series: no convergence");
        total.add(partial.value());
        mass += partial.abs_sum();
    }
    return {total.value(), mass * 4e-16};
}

// Collision-group id for each b_h (h < m) that shares its fractional part
// with another right-pole parameter; -1 otherwise. `rank` numbers members
// inside their group.
void collision_groups(const MeijerGSpec& g, std::vector<int>* group, std::vector<int>* rank) {
    group->assign(static_cast<std::size_t>(g.m), -1);
    rank->assign(static_cast<std::size_t>(g.m), 0);
    constexpr double tol = 1e-9;
    auto close_mod1 = [&](double u, double v) {
        const double d = u - v;
        return std::abs(d - std::round(d)) < tol;
    };
    int next = 0;
    for (int i = 0; i < g.m; ++i) {
        if ((*group)[i] >= 0) continue;
        int members = 0;
        for (int j = i + 1; j < g.m; ++j) {
            if ((*group)[j] < 0 && close_mod1(g.b[i], g.b[j])) {
                (*group)[j] = next;
                (*rank)[j] = ++members;
            }
        }
        if (members > 0) {
            (*group)[i] = next;
            ++next;
        }
    }
}

// Right residue sum with the epsilon/Richardson regularization of coinciding
// poles.
SeriesSum regularized_right(const MeijerGSpec& g, double log_x, int max_k) {
    std::vector<int> group, rank;
    collision_groups(g, &group, &rank);
    std::vector<double> pert(static_cast<std::size_t>(g.m), 0.0);
    const bool any = std::any_of(group.begin(), group.end(), [](int v) { return v >= 0; });
    if (!any) return right_residues(g, pert, group, log_x, max_k);

    auto at_eps = [&](double eps) {
        for (int h = 0; h < g.m; ++h) pert[h] = eps * rank[h];
        return right_residues(g, pert, group, log_x, max_k);
    };
    constexpr double e1 = 1e-6, e2 = 1e-7;
    const SeriesSum g1 = at_eps(e1);
    const SeriesSum g2 = at_eps(e2);
    const double g0 = (e1 * g2.value - e2 * g1.value) / (e1 - e2);
    const double round = (e1 * g2.abs_error + e2 * g1.abs_error) / (e1 - e2);
    const double trunc = 1e-5 * std::abs(g1.value - g2.value);
    return {g0, round + trunc};
}

MeijerGSpec transformed(const MeijerGSpec& g) {
    // G^{m,n}_{p,q}(x | a; b) = G^{n,m}_{q,p}(1/x | 1-b; 1-a)
    MeijerGSpec t;
    t.m = g.n;
    t.n = g.m;
    for (double v : g.b) t.a.push_back(1.0 - v);
    for (double v : g.a) t.b.push_back(1.0 - v);
    return t;
}

bool series_applicable(const MeijerGSpec& g, double log_x) {
    if (g.m == 0) return false;
    if (g.p() < g.q()) return true;
    if (g.p() == g.q()) return log_x < -1e-3;
    return false;
}

}  // namespace

void MeijerGSpec::validate() const {
    if (m < 0 || n < 0 || m > q() || n > p())
        throw NumericError("MeijerGSpec: orders must satisfy 0 <= m <= q, 0 <= n <= p");
    if (m == 0 && n == 0) throw NumericError("MeijerGSpec: m = n = 0 is identically zero");
    for (double v : a)
        if (!std::isfinite(v)) throw NumericError("MeijerGSpec: non-finite parameter");
    for (double v : b)
        if (!std::isfinite(v)) throw NumericError("MeijerGSpec: non-finite parameter");
}

MeijerGResult meijer_g_contour(const MeijerGSpec& g, double log_x) {
    g.validate();
    double lo, hi;
    strip_bounds(g, &lo, &hi);
    if (!(lo < hi)) throw ConvergenceError("meijer_g contour: left and right poles overlap");
    const double cstar = g.m + g.n - 0.5 * (g.p() + g.q());
    if (!(cstar > 0.0)) throw ConvergenceError("meijer_g contour: vertical line does not converge");

    const double c = choose_abscissa(g, lo, hi, log_x);
    const RealKernel base = log_kernel_real(g, c, log_x);
    if (!std::isfinite(base.value)) throw ConvergenceError("meijer_g contour: degenerate abscissa");
    const cplx shift(base.value, 0.0);

    auto integrand = [&](double t) -> double {
        const cplx l = log_kernel(g, cplx(c, t), log_x) - shift;
        if (l.real() < -745.0) return 0.0;
        return (std::exp(l)).real();
    };

    const double h = std::clamp(8.0 / (1.0 + std::abs(log_x)), 0.1, 2.0);
    // Beyond this t the Gamma products decay like exp(-pi cstar t).
    const double t_envelope = std::max(4.0, (std::abs(log_x) + 10.0) / (std::numbers::pi * cstar));

    double sum = 0.0, err = 0.0, l1 = 0.0, peak = 0.0;
    double t = 0.0;
    int quiet = 0;
    bool done = false;
    for (int seg = 0; seg < 20000; ++seg) {
        // Panels far below the running peak only need absolute accuracy.
        const QuadResult q = integrate(integrand, t, t + h, 1e-12, 1e-14 * peak * h, 12);
        const double v = q.value, e = q.error, seg_l1 = q.l1;
        if (!std::isfinite(v)) throw ConvergenceError("meijer_g contour: non-finite integrand");
        sum += v;
        err += e;
        l1 += seg_l1;
        const double density = seg_l1 / h;
        peak = std::max(peak, density);
        t += h;
        if (t > t_envelope && density <= 1e-16 * peak) {
            if (++quiet >= 3) {
                done = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if (!done) err += l1;  // truncated before decay: flag as unreliable

    const double scale = std::exp(base.value) / std::numbers::pi;
    MeijerGResult r;
    r.method = MeijerGMethod::Contour;
    r.value = sum * scale;
    const double round = l1 * (1e-15 + 2e-16 * base.magnitude);
    const double abs_err = (err + round) * scale;
    if (r.value != 0.0 && std::isfinite(r.value)) {
        r.rel_error = abs_err / std::abs(r.value);
    } else if (std::isfinite(base.value) && base.value + std::log(l1 + 1e-300) < -700.0) {
        r.value = 0.0;  // below double range
        r.rel_error = 0.0;
    } else {
        r.rel_error = kInf;
    }
    if (!std::isfinite(r.value)) throw ConvergenceError("meijer_g contour: overflow");
    return r;
}

MeijerGResult meijer_g_series(const MeijerGSpec& g, double log_x, bool left) {
    g.validate();
    const MeijerGSpec spec = left ? transformed(g) : g;
    const double lx = left ? -log_x : log_x;
    if (!series_applicable(spec, lx)) throw ConvergenceError("meijer_g series: divergent here");
    const SeriesSum s = regularized_right(spec, lx, 20000);
    MeijerGResult r;
    r.method = left ? MeijerGMethod::LeftSeries : MeijerGMethod::RightSeries;
    r.value = s.value;
    r.rel_error = s.value != 0.0 ? s.abs_error / std::abs(s.value) : (s.abs_error == 0.0 ? 0.0 : kInf);
    return r;
}

MeijerGResult meijer_g_eval(const MeijerGSpec& g, double log_x) {
    g.validate();
    if (!std::isfinite(log_x)) throw NumericError("meijer_g: argument must be finite and positive");

    MeijerGResult best;
    best.rel_error = kInf;
    auto consider = [&](auto&& fn) {
        try {
            MeijerGResult r = fn();
            if (r.rel_error < best.rel_error) best = r;
        } catch (const ConvergenceError&) {
        }
    };
    // Residue series cost microseconds when they converge; the contour is
    // the general fallback.
    consider([&] { return meijer_g_series(g, log_x, false); });
    if (best.rel_error > 1e-10) consider([&] { return meijer_g_series(g, log_x, true); });
    if (best.rel_error > 1e-10) consider([&] { return meijer_g_contour(g, log_x); });
    if (!(best.rel_error <= kAccept)) {
        throw ConvergenceError("meijer_g: no method reached the accuracy target (G^{" +
                               std::to_string(g.m) + "," + std::to_string(g.n) + "}_{" +
                               std::to_string(g.p()) + "," + std::to_string(g.q()) +
                               "}, log x = " + std::to_string(log_x) + ")");
    }
    return best;
}

double meijer_g(const MeijerGSpec& spec, double x) {
    if (!(x > 0.0)) throw NumericError("meijer_g: argument must be positive");
    return meijer_g_eval(spec, std::log(x)).value;
}

double meijer_g_leading(const MeijerGSpec& spec, double log_x) {
    spec.validate();
    if (spec.m == 0) throw NumericError("meijer_g_leading: no right poles");
    return regularized_right(spec, log_x, 0).value;
}

}  // namespace mmfso
