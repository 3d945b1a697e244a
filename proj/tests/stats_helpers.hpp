// Small statistics utilities for the randomized tests: Kolmogorov-Smirnov
// against a given CDF and a chi-square goodness-of-fit p-value.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace teststat {

/// One-sample KS statistic sup |F_n - F|.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// Asymptotic KS p-value: P(sqrt(n) D > x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
inline double ks_p_value(double d, std::size_t n) {
    double x = d * (std::sqrt(static_cast<double>(n)) + 0.12 +
                    0.11 / std::sqrt(static_cast<double>(n)));
    double sum = 0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * x * x);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

/// Regularized lower incomplete gamma P(a, x) by series / continued fraction.
inline double gamma_p(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gamma_p domain");
    if (x == 0) return 0;
    const double lg = std::lgamma(a);
    if (x < a + 1) {  // series
        double term = 1.0 / a, sum = term;
        for (int n = 1; n < 500; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1) < 1e-15) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

/// Survival function of the chi-square distribution with k dof.
inline double chi2_sf(double stat, int dof) {
    return 1.0 - gamma_p(dof / 2.0, stat / 2.0);
}

/// Pearson chi-square p-value for observed vs expected bin counts.
inline double chi2_gof_p(const std::vector<double>& observed,
                         const std::vector<double>& expected) {
    if (observed.size() != expected.size()) throw std::invalid_argument("bin count mismatch");
    double stat = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0) throw std::invalid_argument("empty expected bin");
        double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    return chi2_sf(stat, static_cast<int>(observed.size()) - 1);
}

}  // namespace teststat
