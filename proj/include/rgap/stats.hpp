#pragma once

#include <cstddef>
#include <vector>

namespace rgap {

double mean_of(const std::vector<double>& values);
// Sample standard deviation (ddof = 1); 0 for fewer than two values.
double sample_sd(const std::vector<double>& values);
// Sample variance via Welford's online recurrence (ddof = 1).
double sample_variance(const std::vector<double>& values);

// Regularized incomplete beta function I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

// CDF of Student's t distribution with (possibly fractional) dof.
double student_t_cdf(double t, double dof);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p_one_sided = 1.0;  // P(mean_a < mean_b) direction, see welch_t_test
    double p_two_sided = 1.0;
};

// Welch's unequal-variance t-test with Welch-Satterthwaite dof.
// t = (mean_a - mean_b) / sqrt(va/na + vb/nb); one-sided p is the lower-tail
// probability, i.e. small when a is significantly below b.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Pearson correlation; throws on length mismatch, n < 2 or zero variance.
double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

// Least-squares line y = slope * x + intercept.
struct TrendLine {
    double slope = 0.0;
    double intercept = 0.0;
};
TrendLine fit_trend_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rgap
