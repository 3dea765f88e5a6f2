#include "rgap/stats.hpp"

#include <cmath>
#include <limits>

#include "rgap/common.hpp"

namespace rgap {

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_variance(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (double v : values) {
        ++n;
        double delta = v - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (v - mean);
    }
    return m2 / static_cast<double>(n - 1);
}

double sample_sd(const std::vector<double>& values) { return std::sqrt(sample_variance(values)); }

namespace {

// Continued-fraction evaluation of the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                      b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (dof <= 0.0) fail(ErrorKind::Precondition, "t distribution requires dof > 0");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    double x = dof / (t * t + dof);
    double tail = 0.5 * incomplete_beta(dof / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        fail(ErrorKind::Precondition, "Welch test requires at least two observations per group");

    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double ma = mean_of(a), mb = mean_of(b);
    double va = sample_variance(a), vb = sample_variance(b);
    double se2 = va / na + vb / nb;

    WelchResult r;
    if (se2 == 0.0) {
        // Degenerate: both groups constant. Equal means carry no evidence;
        // unequal means separate perfectly (dof falls back to na+nb-2).
        r.dof = na + nb - 2.0;
        if (ma == mb) {
            r.t = 0.0;
            r.p_one_sided = 1.0;
            r.p_two_sided = 1.0;
        } else {
            r.t = ma < mb ? -std::numeric_limits<double>::infinity()
                          : std::numeric_limits<double>::infinity();
            r.p_one_sided = ma < mb ? 0.0 : 1.0;
            r.p_two_sided = 0.0;
        }
        return r;
    }

    r.t = (ma - mb) / std::sqrt(se2);
    double num = se2 * se2;
    double den = (va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0);
    r.dof = num / den;
    r.p_one_sided = student_t_cdf(r.t, r.dof);
    double upper = 1.0 - student_t_cdf(std::fabs(r.t), r.dof);
    r.p_two_sided = 2.0 * upper;
    return r;
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        fail(ErrorKind::Precondition, "correlation inputs differ in length");
    if (x.size() < 2) fail(ErrorKind::Precondition, "correlation requires at least two points");
    double mx = mean_of(x), my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        fail(ErrorKind::Metric, "correlation undefined: zero variance in an input");
    double r = sxy / std::sqrt(sxx * syy);
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

TrendLine fit_trend_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        fail(ErrorKind::Precondition, "trend line requires two equal-length series");
    double mx = mean_of(x), my = mean_of(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) fail(ErrorKind::Metric, "trend line undefined: zero variance in x");
    TrendLine line;
    line.slope = sxy / sxx;
    line.intercept = my - line.slope * mx;
    return line;
}

}  // namespace rgap
