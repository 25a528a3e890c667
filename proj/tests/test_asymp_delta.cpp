#include <gtest/gtest.h>

#include <cmath>

#include "nct/asymp_delta.hpp"
#include "nct/quadrature.hpp"
#include "nct/series.hpp"
#include "testing.hpp"

using nct::make_params;
using nct::testing::rel_err;

namespace {

// F(x; 20, 10.3), 50-digit reference
struct Row { double x, F; };
const Row table_rows[] = {
    {5, 7.8907450350613951e-21}, {8, 1.9029636974143617e-8},  {11, 0.00046492583687293468},
    {14, 0.029127460474418427},  {17, 0.18584235973611736},   {20, 0.4434919419501214},
};

} // namespace

TEST(ElemCoeffs, FirstCoefficient)
{
    auto c = nct::elem_coeffs(5, 0.25, 3);
    EXPECT_DOUBLE_EQ(c.c[0], 4.0 / 3);
    EXPECT_EQ(c.a[0], 1.0);
}

TEST(ElemCoeffs, BinomialTerminates)
{
    auto c = nct::elem_coeffs(3, 0.4, 5);
    EXPECT_EQ(c.a[0], 1.0);
    EXPECT_EQ(c.a[1], 1.0);
    EXPECT_EQ(c.a[2], 0.0);
    EXPECT_EQ(c.a[3], 0.0);
}

TEST(ElemCoeffs, MatchTaylorCoefficients)
{
    const double want[] = {2.0, 11.3, 28.2725, 43.264875, 49.4492296875, 50.253195796875, 50.206297773828125,
                           50.215342392558594, 50.212685535806519, 50.213674476930902, 50.213244287541795};
    auto c = nct::elem_coeffs(10.3, 0.5, 10);
    for (int k = 0; k <= 10; ++k)
        EXPECT_LT(rel_err(c.c[k], want[k]), 1e-14) << k;
}

TEST(ElemCoeffs, RejectsYNearOne)
{
    EXPECT_THROW(nct::elem_coeffs(5, 1 - 1e-4, 3), nct::unsupported_range);
}

TEST(ElemCoeffs, GrowthBoundedByPolynomial)
{
    for (double y = 0.3; y <= 0.951; y += 0.05) {
        auto c = nct::elem_coeffs(10.3, y, 30);
        for (int k = 0; k <= 30; ++k)
            EXPECT_LE(std::fabs(c.c[k]) * std::pow(1 - y, k + 1), 10 * std::pow(k + 1, 5)) << y << " " << k;
    }
}

TEST(LargeDeltaElem, TableOneEndpoints)
{
    auto r5 = nct::cdf_large_delta_elem(make_params(5, 20, 10.3), 10);
    EXPECT_EQ(r5.terms_used, 11u);
    EXPECT_LT(rel_err(r5.value, table_rows[0].F), 1e-12);
    auto r20 = nct::cdf_large_delta_elem(make_params(20, 20, 10.3), 10);
    EXPECT_LT(rel_err(r20.value, 0.4434882973203470), 1e-13);
    double e = rel_err(r20.value, table_rows[5].F);
    EXPECT_GT(e, 1e-6);
    EXPECT_LT(e, 1e-4);
}

TEST(LargeDeltaElem, ErrorGrowsTowardTransition)
{
    double prev = 0;
    for (auto row : table_rows) {
        auto r = nct::cdf_large_delta_elem(make_params(row.x, 20, 10.3), 10);
        double e = rel_err(r.value, row.F);
        EXPECT_GE(e, prev * 0.5) << row.x;
        prev = e;
    }
}

TEST(LargeDeltaElem, EvenDegreesOfFreedomTerminate)
{
    auto prm = make_params(3, 15, 4);
    auto a = nct::cdf_large_delta_elem(prm, 1);
    auto b = nct::cdf_large_delta_elem(prm, 8);
    EXPECT_EQ(a.value, b.value);
}

TEST(LargeDeltaGamma, TableTwo)
{
    for (auto row : table_rows) {
        auto r = nct::cdf_large_delta_gamma(make_params(row.x, 20, 10.3), 5, nct::GammaForm::q_form);
        EXPECT_EQ(r.terms_used, 6u);
        EXPECT_LT(rel_err(r.value, row.F), 1e-13) << row.x;
    }
    auto r5 = nct::cdf_large_delta_gamma(make_params(5, 20, 10.3), 5);
    EXPECT_LT(rel_err(r5.value, 0.7890745035061292e-20), 1e-13);
    auto r20 = nct::cdf_large_delta_gamma(make_params(20, 20, 10.3), 5);
    EXPECT_LT(rel_err(r20.value, 0.4434919419501216), 1e-13);
}

TEST(LargeDeltaGamma, OddDegreesFormsAgree)
{
    auto prm = make_params(6, 12, 5);
    auto q = nct::cdf_large_delta_gamma(prm, std::nullopt, nct::GammaForm::q_form);
    auto p = nct::cdf_large_delta_gamma(prm, std::nullopt, nct::GammaForm::p_form);
    EXPECT_EQ(q.terms_used, 3u);
    EXPECT_EQ(p.terms_used, 3u);
    EXPECT_NEAR(q.value, p.value, 4e-16);
}

TEST(LargeDeltaGamma, FiniteSumIsFPlusR)
{
    // For odd n the Q-form sum is exact and equals F + R.
    struct Case { double n, x, d, F, R; };
    const Case cases[] = {
        {3, 5, 8, 0.069332746724187691, 7.0132625182191443e-20},
        {3, 5, 20, 2.3625728749265494e-9, 0},
        {3, 10, 14, 0.12347551894304605, 2.2503360799442836e-50},
        {5, 5, 8, 0.044386762273663029, 1.5761040489928469e-21},
        {5, 5, 20, 3.5707643750519095e-13, 0},
        {5, 10, 14, 0.089802810916384493, 4.6701684349130675e-53},
        {7, 5, 8, 0.030985149349600114, 7.4346070584321047e-23},
        {7, 5, 20, 2.0131995972079044e-16, 0},
        {7, 10, 14, 0.066854968419185936, 2.1473201237723392e-55},
    };
    for (auto c : cases) {
        auto prm = make_params(c.x, c.d, c.n);
        auto s = nct::cdf_large_delta_gamma(prm, std::nullopt, nct::GammaForm::q_form);
        double R = nct::r_laplace(prm).value;
        if (c.R > 0)
            EXPECT_LT(rel_err(R, c.R), 1e-9) << c.n << " " << c.x;
        EXPECT_LT(rel_err(s.value, c.F + R), 1e-13) << c.n << " " << c.x << " " << c.d;
    }
}

TEST(LargeDeltaGamma, FormsAgreeWithinEstimates)
{
    for (double x : {10.0, 20.0, 30.0})
        for (double d : {18.0, 25.0}) {
            auto prm = make_params(x, d, 6.5);
            auto q = nct::cdf_large_delta_gamma(prm, std::nullopt, nct::GammaForm::q_form);
            auto p = nct::cdf_large_delta_gamma(prm, std::nullopt, nct::GammaForm::p_form);
            double tol = std::max(q.est_rel_err * q.value, p.est_rel_err * p.complement);
            EXPECT_LE(std::fabs(q.value - p.value), std::max(tol, 1e-15)) << x << " " << d;
        }
}

TEST(LargeDeltaGamma, TermsDecayForLargeZeta)
{
    for (double n : {1.5, 4.3, 10.3}) {
        auto prm = make_params(15, 40, n);
        ASSERT_GE(prm.zeta, 4 * std::max(1.0, n));
        double eta = prm.eta_gamma, z = eta * prm.zeta;
        auto bin = nct::half_binomials(n, 8);
        double prev = 0, eta_k = 1;
        for (int k = 0; k <= 8; ++k) {
            double t = std::fabs(bin[k] * eta_k * nct::upper_gamma_q(0.5 * n - k, z));
            if (k > 0 && prev > 0)
                EXPECT_LE(t, prev) << n << " " << k;
            prev = t;
            eta_k *= eta;
        }
    }
}

TEST(RLeading, WithinTwentyPercent)
{
    auto prm = make_params(5, 15, 6);
    EXPECT_LT(rel_err(nct::r_leading_estimate(prm), nct::r_laplace(prm).value), 0.2);
}

TEST(RLeading, NegligibleInTableGeometry)
{
    auto prm = make_params(20, 20, 10.3);
    EXPECT_LT(nct::r_leading_estimate(prm), 1e-16 * 0.44);
}

TEST(RLeading, DecreasesWithZeta)
{
    double prev = 0;
    for (double d = 5; d < 200; d += 5) {
        double r = nct::log_r_leading_estimate(make_params(4, d, 7));
        EXPECT_LT(r, prev);
        prev = r;
    }
}

TEST(LargeDeltaGamma, FiniteSumWhereRIsVisible)
{
    // small zeta: the k = 1 term exceeds the k = 0 term, the sum is still exact
    const double pts[][3] = {{3, 1, 1}, {5, 2, 1.5}, {7, 1.5, 2}};
    for (const auto& p : pts) {
        auto prm = make_params(p[1], p[2], p[0]);
        double s = nct::cdf_large_delta_gamma(prm).value;
        double F = nct::f_series(prm, 1e-16).value;
        double R = nct::r_laplace(prm).value;
        EXPECT_GT(R, 1e-3 * F);
        EXPECT_LT(std::fabs((s - F) - R), 1e-9 * R) << p[0];
    }
}
