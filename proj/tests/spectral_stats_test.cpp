#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "spinbill/spectral_stats.hpp"

using namespace spinbill;

TEST(Unfold, EquallySpacedLinear)
{
    std::vector<double> e;
    for (int k = 1; k <= 100; ++k)
        e.push_back(k);
    const auto us = unfold(e, 1);
    ASSERT_EQ(us.spacings.size(), 99u);
    for (double s : us.spacings)
        EXPECT_NEAR(s, 1.0, 1e-6);
    EXPECT_EQ(us.n_clamped, 0);
}

TEST(Unfold, PoissonProcessHasUnitMeanSpacing)
{
    std::mt19937_64 rng(3);
    std::exponential_distribution<double> gap(1.0);
    const int n = 2000;
    std::vector<double> e{0.0};
    for (int k = 1; k < n; ++k)
        e.push_back(e.back() + gap(rng));
    const auto us = unfold(e, 1);
    double mean = 0.0;
    for (double s : us.spacings)
        mean += s;
    mean /= us.spacings.size();
    // Spacings of a unit-rate process have unit variance.
    EXPECT_NEAR(mean, 1.0, 3.0 / std::sqrt(double(us.spacings.size())));
}

TEST(Unfold, DegeneratePairsGiveZeroSpacings)
{
    std::vector<double> e;
    for (int k = 0; k < 100; ++k) {
        e.push_back(k);
        e.push_back(k);
    }
    const auto us = unfold(e, 1);
    int zeros = 0;
    for (double s : us.spacings)
        zeros += s < 1e-12;
    EXPECT_EQ(zeros, 100);
}

TEST(Unfold, AffineInvariant)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    std::vector<double> e(300);
    for (auto& x : e)
        x = u(rng) + 0.1 * x * x * x;
    std::vector<double> scaled;
    for (double x : e)
        scaled.push_back(3.7 * x - 12.5);
    const auto a = unfold(e, 7), b = unfold(scaled, 7);
    for (std::size_t k = 0; k < a.spacings.size(); ++k)
        EXPECT_NEAR(a.spacings[k], b.spacings[k], 1e-8);
}

TEST(Unfold, Errors)
{
    EXPECT_THROW(unfold({1, 2, 3}, 7), std::invalid_argument);
    EXPECT_THROW(unfold({1, 1, 1, 1, 1}, 1), std::invalid_argument);
    EXPECT_THROW(unfold({1, 2, 3, 4}, 0), std::invalid_argument);
}

TEST(TrimEdges, DropsTwoPercentEachSide)
{
    std::vector<double> e;
    for (int k = 0; k < 600; ++k)
        e.push_back(600 - k);
    const auto t = trim_edges(e, 0.02);
    EXPECT_EQ(t.size(), 576u);
    EXPECT_EQ(t.front(), 13.0);
    EXPECT_EQ(t.back(), 588.0);
}

TEST(Histogram, SingleBinForUnitSpacings)
{
    const auto h = spacing_histogram(std::vector<double>(50, 1.0), 4, 2.0);
    EXPECT_EQ(h.densities, (std::vector<double>{0.0, 0.0, 2.0, 0.0}));
    EXPECT_DOUBLE_EQ(h.bin_width(), 0.5);
}

TEST(Histogram, ExponentialSamplesMatchPoisson)
{
    std::mt19937_64 rng(21);
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> s(100000);
    for (auto& x : s)
        x = ex(rng);
    const auto h = spacing_histogram(s, 20, 4.0);
    double integral = 0.0;
    const double w = h.bin_width();
    const double in_range = h.n_in_range;
    for (std::size_t b = 0; b < h.densities.size(); ++b) {
        integral += h.densities[b] * w;
        // Expected density given the in-range normalisation.
        const double lo = h.bin_edges[b], hi = h.bin_edges[b + 1];
        const double p = (std::exp(-lo) - std::exp(-hi)) / (1 - std::exp(-4.0));
        const double expect = p / w;
        const double sigma = std::sqrt(p * (1 - p) / in_range) / w;
        EXPECT_NEAR(h.densities[b], expect, 3.5 * sigma) << "bin " << b;
    }
    EXPECT_NEAR(integral, 1.0, 1e-6);
    EXPECT_EQ(h.n_in_range + h.n_overflow, 100000);
}

TEST(Histogram, Errors)
{
    EXPECT_THROW(spacing_histogram(std::vector<double>{}, 10, 3.0), std::invalid_argument);
    EXPECT_THROW(spacing_histogram(std::vector<double>{1.0}, 1, 3.0), std::invalid_argument);
    EXPECT_THROW(spacing_histogram(std::vector<double>{1.0}, 10, 0.0), std::invalid_argument);
}

TEST(ReferencePdf, PointValues)
{
    EXPECT_EQ(reference_pdf(SpacingLaw::poisson, 0.0), 1.0);
    EXPECT_EQ(reference_pdf(SpacingLaw::semi_poisson, 0.0), 0.0);
    EXPECT_NEAR(reference_pdf(SpacingLaw::semi_poisson, 0.5), 2.0 / std::numbers::e, 1e-15);
    EXPECT_NEAR(reference_pdf(SpacingLaw::semi_poisson, 0.5), 0.7357588823, 1e-10);
    EXPECT_EQ(reference_pdf(SpacingLaw::wigner, 0.0), 0.0);
    EXPECT_THROW(reference_pdf(SpacingLaw::poisson, -0.1), std::invalid_argument);
}

TEST(ReferencePdf, NormalisedWithUnitMeanByQuadrature)
{
    boost::math::quadrature::exp_sinh<double> integrator;
    for (SpacingLaw law : all_spacing_laws) {
        const double mass = integrator.integrate([law](double s) { return reference_pdf(law, s); });
        const double mean = integrator.integrate([law](double s) { return s * reference_pdf(law, s); });
        EXPECT_NEAR(mass, 1.0, 1e-6) << to_string(law);
        EXPECT_NEAR(mean, 1.0, 1e-6) << to_string(law);
    }
}

TEST(ReferenceCdf, IsIntegralOfPdf)
{
    boost::math::quadrature::exp_sinh<double> integrator;
    for (SpacingLaw law : all_spacing_laws)
        for (double s : {0.3, 1.0, 2.5}) {
            const double tail = integrator.integrate([law](double x) { return reference_pdf(law, x); }, s,
                                                     std::numeric_limits<double>::infinity());
            EXPECT_NEAR(reference_cdf(law, s), 1.0 - tail, 1e-9) << to_string(law) << " s=" << s;
        }
}

TEST(KsDistance, ExponentialSamples)
{
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> s(100000);
    for (auto& x : s)
        x = ex(rng);
    const double dp = ks_distance(s, SpacingLaw::poisson);
    const double ds = ks_distance(s, SpacingLaw::semi_poisson);
    const double dw = ks_distance(s, SpacingLaw::wigner);
    EXPECT_LT(dp, 0.01);
    EXPECT_GT(ds, dp);
    EXPECT_GT(dw, dp);
    for (double d : {dp, ds, dw}) {
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
    }
}

TEST(KsDistance, MatchesBruteForceSupremum)
{
    // Empirical CDF evaluated just below and at each sample.
    std::vector<double> s{0.1, 0.5, 0.5, 0.9, 1.4, 2.0, 0.2, 3.1, 0.7, 1.1, 0.05};
    std::vector<double> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    double brute = 0.0;
    for (double x : sorted) {
        double below = 0, at = 0;
        for (double y : sorted) {
            below += y < x;
            at += y <= x;
        }
        const double f = reference_cdf(SpacingLaw::semi_poisson, x);
        brute = std::max({brute, std::abs(below / s.size() - f), std::abs(at / s.size() - f)});
    }
    EXPECT_NEAR(ks_distance(s, SpacingLaw::semi_poisson), brute, 1e-15);
}

TEST(KsDistance, NeedsTenSamples)
{
    EXPECT_THROW(ks_distance(std::vector<double>(9, 1.0), SpacingLaw::poisson), std::invalid_argument);
}
