#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "pcstar/stats/contingency.hpp"

namespace pcstar::stats {

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
/// Series for x < a + 1, modified Lentz continued fraction otherwise.
inline double gamma_q(double a, double x) {
    if (!(a > 0)) throw Error("gamma_q requires a > 0");
    if (x <= 0) return 1.0;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    constexpr double eps = 1e-16;
    constexpr int max_iter = 100000;
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int n = 0; n < max_iter; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * eps) break;
        }
        return std::max(0.0, 1.0 - sum * std::exp(log_prefix));
    }
    constexpr double tiny = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return std::exp(log_prefix) * h;
}

/// Upper tail P(chi2_dof > stat).
inline double chi_squared_sf(double stat, int dof) {
    if (dof <= 0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * stat);
}

struct TestResult {
    double statistic = 0;
    int dof = 0;
    double p_value = 1;
    bool independent = true;
};

/// Pearson chi-squared stratified by z configuration. Rows and columns
/// with a zero marginal inside a stratum contribute no degrees of freedom;
/// zero dof means no evidence against independence (p = 1).
inline TestResult chi_squared_test(const ContingencyTable& t, double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0, 1)");
    const int rx = t.x_arity();
    const int ry = t.y_arity();
    std::vector<double> rows(static_cast<std::size_t>(rx)), cols(static_cast<std::size_t>(ry));
    double stat = 0;
    int dof = 0;
    for (std::size_t z = 0; z < t.strata(); ++z) {
        std::fill(rows.begin(), rows.end(), 0.0);
        std::fill(cols.begin(), cols.end(), 0.0);
        double total = 0;
        for (int x = 0; x < rx; ++x) {
            for (int y = 0; y < ry; ++y) {
                const double o = t.at(x, y, z);
                rows[static_cast<std::size_t>(x)] += o;
                cols[static_cast<std::size_t>(y)] += o;
                total += o;
            }
        }
        if (total <= 0) continue;
        int eff_rows = 0, eff_cols = 0;
        for (double r : rows) eff_rows += r > 0;
        for (double c : cols) eff_cols += c > 0;
        dof += (eff_rows - 1) * (eff_cols - 1);
        for (int x = 0; x < rx; ++x) {
            if (rows[static_cast<std::size_t>(x)] <= 0) continue;
            for (int y = 0; y < ry; ++y) {
                if (cols[static_cast<std::size_t>(y)] <= 0) continue;
                const double e = rows[static_cast<std::size_t>(x)] * cols[static_cast<std::size_t>(y)] / total;
                const double d = t.at(x, y, z) - e;
                stat += d * d / e;
            }
        }
    }
    if (dof == 0) return {0.0, 0, 1.0, true};
    const double p = chi_squared_sf(stat, dof);
    return {stat, dof, p, p > alpha};
}

}  // namespace pcstar::stats
