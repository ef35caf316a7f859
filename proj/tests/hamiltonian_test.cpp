#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spinbill/evolution.hpp"
#include "spinbill/hamiltonian.hpp"

using namespace spinbill;

namespace {

// Spectrum of the open rectangle as a Kronecker sum of two path graphs:
// 2 lambda * (2 cos(p pi / (Lx+1)) + 2 cos(q pi / (Ly+1))).
std::vector<double> rectangle_levels(int lx, int ly, double lambda)
{
    std::vector<double> e;
    for (int p = 1; p <= lx; ++p)
        for (int q = 1; q <= ly; ++q)
            e.push_back(2.0 * lambda *
                        (2.0 * std::cos(p * std::numbers::pi / (lx + 1)) + 2.0 * std::cos(q * std::numbers::pi / (ly + 1))));
    std::sort(e.begin(), e.end());
    return e;
}

} // namespace

TEST(Hamiltonian, TwoSiteChain)
{
    const auto h = build_hamiltonian(build_rectangle(2, 1), 1.0);
    Eigen::Matrix2d expect;
    expect << 0, 2, 2, 0;
    EXPECT_EQ(h.dense(), expect);
}

TEST(Hamiltonian, SingleSiteIsZero)
{
    const auto h = build_hamiltonian(build_rectangle(1, 1), 1.0);
    EXPECT_EQ(h.dim(), 1);
    EXPECT_EQ(h.dense()(0, 0), 0.0);
}

TEST(Hamiltonian, StructureMatchesBonds)
{
    const auto g = build_quarter_stadium(5, 7);
    const double lambda = 0.7;
    const auto m = build_hamiltonian(g, lambda).dense();
    EXPECT_EQ(m, m.transpose());
    int nonzero = 0;
    for (int a = 0; a < m.rows(); ++a) {
        EXPECT_EQ(m(a, a), 0.0);
        for (int b = 0; b < m.cols(); ++b)
            if (m(a, b) != 0.0) {
                ++nonzero;
                EXPECT_EQ(m(a, b), 2 * lambda);
                const auto p = g.coord_of(a), q = g.coord_of(b);
                EXPECT_EQ(std::abs(p.i - q.i) + std::abs(p.j - q.j), 1);
            }
    }
    EXPECT_EQ(nonzero, 2 * static_cast<int>(g.bonds().size()));
}

TEST(Hamiltonian, ApplyMatchesDense)
{
    const auto h = build_hamiltonian(build_quarter_stadium(4, 5), 1.3);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Random(h.dim());
    EXPECT_LT((h.apply(psi) - h.dense().cast<cplx>() * psi).norm(), 1e-12);
    EXPECT_THROW(h.apply(Eigen::VectorXcd::Zero(h.dim() + 1)), std::invalid_argument);
}

TEST(Hamiltonian, RectangleSpectrumMatchesKroneckerSum)
{
    for (auto [lx, ly] : {std::pair{30, 20}, std::pair{4, 7}, std::pair{1, 5}}) {
        const auto sd = diagonalize(build_hamiltonian(build_rectangle(lx, ly), 1.0));
        const auto oracle = rectangle_levels(lx, ly, 1.0);
        ASSERT_EQ(sd.dim(), static_cast<int>(oracle.size()));
        for (int k = 0; k < sd.dim(); ++k)
            EXPECT_NEAR(sd.energies[k], oracle[k], 1e-10);
    }
}

TEST(Hamiltonian, GershgorinBound)
{
    for (const auto& g : {build_rectangle(9, 8), build_quarter_stadium(10, 10)}) {
        const double lambda = 1.5;
        const auto sd = diagonalize(build_hamiltonian(g, lambda));
        EXPECT_LE(sd.energies.cwiseAbs().maxCoeff(), 2 * lambda * g.max_degree() + 1e-12);
    }
}

TEST(Hamiltonian, DefectsKeepSurvivingEntries)
{
    const auto g = build_rectangle(8, 6);
    const auto d = apply_defects(g, {0.25, 17, {{0, 0}}});
    const auto full = build_hamiltonian(g, 1.0).dense();
    const auto cut = build_hamiltonian(d, 1.0).dense();
    for (int a = 0; a < d.num_sites(); ++a)
        for (int b = 0; b < d.num_sites(); ++b)
            EXPECT_EQ(cut(a, b), full(g.index_of(d.coord_of(a)), g.index_of(d.coord_of(b))));
}

TEST(Hamiltonian, TripletDump)
{
    std::ostringstream os;
    build_hamiltonian(build_custom({{true, true}, {true, false}}), 1.0).write_triplets(os);
    EXPECT_EQ(os.str(), "0 1 2\n0 2 2\n1 0 2\n2 0 2\n");
}

TEST(Noise, ZeroAmplitudeAlwaysZero)
{
    const auto nm = NoiseModel::for_geometry(build_rectangle(3, 3), 0.0, 5);
    std::mt19937_64 rng(nm.seed);
    for (int k = 0; k < 100; ++k)
        EXPECT_EQ(sample_noise_amplitude(nm, rng), 0.0);
}

TEST(Noise, UniformMean)
{
    const auto nm = NoiseModel::for_geometry(build_rectangle(3, 3), 1e-5, 2024);
    std::mt19937_64 rng(nm.seed);
    const int n = 1000000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double e = sample_noise_amplitude(nm, rng);
        ASSERT_GE(e, 0.0);
        ASSERT_LE(e, 1e-5);
        sum += e;
    }
    const double sigma_mean = 1e-5 / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
    EXPECT_NEAR(sum / n, 5e-6, 3 * sigma_mean);
}

TEST(Noise, SeededStreamsRepeat)
{
    const auto nm = NoiseModel::for_geometry(build_rectangle(3, 3), 1.0, 77);
    std::mt19937_64 a(nm.seed), b(nm.seed);
    for (int k = 0; k < 1000; ++k)
        ASSERT_EQ(sample_noise_amplitude(nm, a), sample_noise_amplitude(nm, b));
}

TEST(Noise, DiagonalFollowsGradient)
{
    const auto g = build_rectangle(5, 6);
    const auto nm = NoiseModel::for_geometry(g, 1e-5, 0);
    EXPECT_TRUE(noise_diagonal(nm, 0.0, g).isZero(0.0));
    const auto d = noise_diagonal(nm, 1e-5, g);
    EXPECT_EQ(d[g.index_of({0, 0})], 0.0);
    EXPECT_NEAR(d[g.index_of({3, 4})], 1.4e-4, 1e-18);
    EXPECT_THROW(noise_diagonal(nm, -1.0, g), std::invalid_argument);
    EXPECT_THROW(NoiseModel::for_geometry(g, -1.0, 0), std::invalid_argument);
}
