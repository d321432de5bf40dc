#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "eden/common.hpp"

namespace eden {

namespace detail {

// Regularized incomplete gamma functions, series + continued fraction.
inline double gamma_series_p(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_cf_q(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// Upper tail Q(a, x) = Gamma(a, x) / Gamma(a).
inline double regularized_gamma_q(double a, double x) {
    if (!(a > 0) || x < 0) fail(Errc::domain_error, "regularized_gamma_q domain");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_series_p(a, x);
    return detail::gamma_cf_q(a, x);
}

// P[Chi2_df >= stat].
inline double chi_square_p_value(double stat, int df) {
    if (df <= 0) fail(Errc::domain_error, "chi-square needs positive degrees of freedom");
    return regularized_gamma_q(0.5 * df, 0.5 * stat);
}

struct ChiSquareResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    std::size_t total = 0;
};

// Goodness of fit of observed counts against given class probabilities.
// Classes with expected count < 5 merge into a rest class.
inline ChiSquareResult chi_square_test(const std::vector<std::size_t>& observed,
                                       const std::vector<double>& probs) {
    if (observed.size() != probs.size() || observed.empty())
        fail(Errc::domain_error, "chi_square_test: size mismatch");
    std::size_t total = 0;
    for (std::size_t c : observed) total += c;
    ChiSquareResult res;
    res.total = total;
    if (total == 0) return res;
    double rest_obs = 0.0, rest_exp = 0.0;
    int classes = 0;
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expd = probs[i] * static_cast<double>(total);
        if (expd < 5.0) {
            rest_obs += static_cast<double>(observed[i]);
            rest_exp += expd;
            continue;
        }
        const double diff = static_cast<double>(observed[i]) - expd;
        stat += diff * diff / expd;
        ++classes;
    }
    if (rest_exp > 0.0) {
        const double diff = rest_obs - rest_exp;
        stat += diff * diff / rest_exp;
        ++classes;
    }
    if (classes < 2) {
        res.df = 0;
        return res;
    }
    res.statistic = stat;
    res.df = classes - 1;
    res.p_value = chi_square_p_value(stat, res.df);
    return res;
}

}  // namespace eden
