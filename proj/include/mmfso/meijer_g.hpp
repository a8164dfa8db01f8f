#pragma once

#include <vector>

namespace mmfso {

// G^{m,n}_{p,q}(x | a; b) with p = a.size(), q = b.size(), real parameters.
struct MeijerGSpec {
    int m = 0;
    int n = 0;
    std::vector<double> a;
    std::vector<double> b;

    int p() const { return static_cast<int>(a.size()); }
    int q() const { return static_cast<int>(b.size()); }
    void validate() const;
};

enum class MeijerGMethod { Contour, RightSeries, LeftSeries };

struct MeijerGResult {
    double value = 0.0;
    double rel_error = 0.0;
    MeijerGMethod method = MeijerGMethod::Contour;
};

// Evaluate at x = exp(log_x). Chooses between Mellin-Barnes contour
// integration and residue series by their error estimates; throws
// ConvergenceError when none reaches ~1e-6 relative accuracy.
MeijerGResult meijer_g_eval(const MeijerGSpec& spec, double log_x);

double meijer_g(const MeijerGSpec& spec, double x);

// Individual evaluators, exposed for testing. Each throws ConvergenceError if
// it does not apply to the given spec/argument.
MeijerGResult meijer_g_contour(const MeijerGSpec& spec, double log_x);
MeijerGResult meijer_g_series(const MeijerGSpec& spec, double log_x, bool left);

// Sum of the k = 0 residues at the right poles b_h (h < m): the leading
// small-argument behaviour. Coinciding b_h are regularized the same way as
// in the series evaluator.
double meijer_g_leading(const MeijerGSpec& spec, double log_x);

}  // namespace mmfso
