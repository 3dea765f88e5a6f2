#include <doctest.h>

#include <boost/math/distributions/students_t.hpp>
#include <random>

#include "rgap/common.hpp"
#include "rgap/stats.hpp"
#include "test_helpers.hpp"

using namespace rgap;

namespace {

// Independent Welch computation: naive two-pass sums in long double, against
// the library's Welford route.
struct NaiveWelch {
    long double t, dof;
};

NaiveWelch naive_welch(const std::vector<double>& a, const std::vector<double>& b) {
    auto two_pass = [](const std::vector<double>& v) {
        long double sum = 0.0L;
        for (double x : v) sum += x;
        long double mean = sum / v.size();
        long double ss = 0.0L;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair<long double, long double>(mean, ss / (v.size() - 1));
    };
    auto [ma, va] = two_pass(a);
    auto [mb, vb] = two_pass(b);
    long double sa = va / a.size(), sb = vb / b.size();
    NaiveWelch r;
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.dof = (sa + sb) * (sa + sb) /
            (sa * sa / (a.size() - 1) + sb * sb / (b.size() - 1));
    return r;
}

}  // namespace

TEST_CASE("student t CDF matches the reference implementation") {
    for (double dof : {1.0, 2.5, 4.0, 10.0, 30.0, 123.7}) {
        boost::math::students_t_distribution<double> ref(dof);
        for (double t : {-411.5, -5.0, -1.3, -0.2, 0.0, 0.7, 2.0, 9.9}) {
            CHECK(rgap_test::near(student_t_cdf(t, dof), boost::math::cdf(ref, t), 1e-9));
        }
    }
}

TEST_CASE("welch statistic and dof agree with an independent implementation") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> value(0.0, 100.0);
    std::uniform_int_distribution<int> size(2, 8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(size(rng)), b(size(rng));
        for (auto& v : a) v = value(rng);
        for (auto& v : b) v = value(rng);
        // Skip degenerate draws (identical values in a group).
        auto constant = [](const std::vector<double>& v) {
            for (double x : v)
                if (x != v[0]) return false;
            return true;
        };
        if (constant(a) || constant(b)) continue;

        WelchResult w = welch_t_test(a, b);
        NaiveWelch n = naive_welch(a, b);
        CHECK(rgap_test::near(w.t, static_cast<double>(n.t), 1e-9));
        CHECK(rgap_test::near(w.dof, static_cast<double>(n.dof), 1e-9));

        boost::math::students_t_distribution<double> ref(w.dof);
        CHECK(rgap_test::near(w.p_one_sided, boost::math::cdf(ref, w.t), 1e-9));
    }
}

TEST_CASE("welch degenerate cases") {
    // Zero variance in both groups, equal means: no evidence.
    WelchResult equal = welch_t_test({50.0, 50.0, 50.0}, {50.0, 50.0});
    CHECK(equal.p_one_sided == 1.0);
    // Zero variance, unequal means: perfectly separated.
    WelchResult lower = welch_t_test({10.0, 10.0}, {20.0, 20.0});
    CHECK(lower.p_one_sided == 0.0);
    CHECK(lower.dof == doctest::Approx(2.0));
    WelchResult higher = welch_t_test({30.0, 30.0}, {20.0, 20.0});
    CHECK(higher.p_one_sided == 1.0);
}

TEST_CASE("welch requires two observations per group") {
    CHECK_THROWS_AS(welch_t_test({1.0}, {2.0, 3.0}), Error);
}

TEST_CASE("pearson correlation basics") {
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    CHECK(pearson_correlation(x, y) == doctest::Approx(1.0));
    for (auto& v : y) v = -v;
    CHECK(pearson_correlation(x, y) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(pearson_correlation(x, {1.0, 1.0, 1.0, 1.0}), Error);  // zero variance
    CHECK_THROWS_AS(pearson_correlation({1.0}, {2.0}), Error);
}

TEST_CASE("pearson correlation is affine-invariant and bounded") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(20), y(20);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = noise(rng);
            y[i] = noise(rng);
        }
        double r = pearson_correlation(x, y);
        CHECK(std::fabs(r) <= 1.0);

        std::vector<double> x_affine = x;
        for (auto& v : x_affine) v = 3.5 * v + 11.0;  // positive scale
        CHECK(pearson_correlation(x_affine, y) == doctest::Approx(r).epsilon(1e-9));
        for (auto& v : x_affine) v = -v;  // sign flip
        CHECK(pearson_correlation(x_affine, y) == doctest::Approx(-r).epsilon(1e-9));
    }
}

TEST_CASE("sample summaries") {
    std::vector<double> v = {2.0, 4.0, 6.0};
    CHECK(mean_of(v) == doctest::Approx(4.0));
    CHECK(sample_sd(v) == doctest::Approx(2.0));
    CHECK(sample_sd({5.0}) == 0.0);
}

TEST_CASE("trend line recovers slope and intercept") {
    std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
    std::vector<double> y = {1.0, 3.0, 5.0, 7.0};
    TrendLine line = fit_trend_line(x, y);
    CHECK(line.slope == doctest::Approx(2.0));
    CHECK(line.intercept == doctest::Approx(1.0));
}
