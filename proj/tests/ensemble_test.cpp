#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "spinbill/ensemble.hpp"

using namespace spinbill;

namespace {

EnsembleConfig small_config(int n_realizations, double p_defect, double epsilon_max)
{
    EnsembleConfig cfg{build_rectangle(6, 5)};
    cfg.n_realizations = n_realizations;
    cfg.p_defect = p_defect;
    cfg.epsilon_max = epsilon_max;
    cfg.base_seed = 42;
    cfg.spectrum.poly_degree = 3;
    cfg.dynamics.t_final_in_tl = 2.0;
    return cfg;
}

void expect_same(const MeanErr& a, const MeanErr& b)
{
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.sem, b.sem);
}

} // namespace

TEST(DeriveSeed, NoCollisionsOverAMillionIndices)
{
    std::vector<std::uint64_t> seeds;
    seeds.reserve(1000000);
    for (std::uint64_t k = 0; k < 1000000; ++k)
        seeds.push_back(derive_seed(7, k));
    std::sort(seeds.begin(), seeds.end());
    EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
}

TEST(DeriveSeed, DeterministicAndDistinctFromBase)
{
    static_assert(derive_seed(1, 0) == derive_seed(1, 0));
    for (std::uint64_t s : {0ull, 1ull, 42ull, ~0ull}) {
        EXPECT_NE(derive_seed(s, 0), s);
        EXPECT_NE(derive_seed(s, 0), derive_seed(s, 1));
    }
}

TEST(Aggregate, MeanAndStandardError)
{
    const std::vector<double> a{1.0, 2.0}, b{3.0, 2.0};
    const auto m = aggregate({&a, &b});
    EXPECT_EQ(m.mean, (std::vector<double>{2.0, 2.0}));
    EXPECT_DOUBLE_EQ(m.sem[0], 1.0); // sqrt(2) / sqrt(2)
    EXPECT_EQ(m.sem[1], 0.0);
    const auto single = aggregate({&a});
    EXPECT_EQ(single.mean, a);
    EXPECT_EQ(single.sem, (std::vector<double>{0.0, 0.0}));
    const std::vector<double> c{1.0};
    EXPECT_THROW(aggregate({&a, &c}), std::logic_error);
}

TEST(TimeGrid, DefaultsToSwapTimeSteps)
{
    EnsembleConfig cfg{build_rectangle(30, 20)};
    const auto tg = make_time_grid(cfg);
    EXPECT_DOUBLE_EQ(tg.dt, std::numbers::pi / 4.0);
    EXPECT_EQ(tg.n_steps, 600);
    EXPECT_EQ(tg.snapshot_steps, (std::vector<std::int64_t>{0, 30, 600}));
}

TEST(Ensemble, SingleCleanRealizationMatchesDirectRun)
{
    const auto cfg = small_config(1, 0.0, 0.0);
    const auto r = run_ensemble(cfg);
    const auto direct = run_realization(cfg, make_time_grid(cfg), 0);
    ASSERT_TRUE(r.dynamics && r.spectrum);
    EXPECT_EQ(r.dynamics->cgf_coherent.mean, direct.cgf_coherent);
    EXPECT_EQ(r.dynamics->acf.mean, direct.acf);
    for (double e : r.dynamics->cgf_coherent.sem)
        EXPECT_EQ(e, 0.0);
    EXPECT_EQ(r.spectrum->energies.front(), direct.energies);
    EXPECT_EQ(r.seeds, (std::vector<std::uint64_t>{derive_seed(42, 0)}));
    EXPECT_EQ(r.n_sites, (std::vector<int>{30}));
    EXPECT_DOUBLE_EQ(r.dynamics->cgf_coherent.mean.front(), 1.0);
    EXPECT_DOUBLE_EQ(r.dynamics->acf.mean.front(), 1.0);
}

TEST(Ensemble, IndependentOfWorkerCount)
{
    const auto cfg = small_config(5, 0.1, 1e-2);
    const auto one = run_ensemble(cfg, 1);
    const auto three = run_ensemble(cfg, 3);
    EXPECT_EQ(one.seeds, three.seeds);
    EXPECT_EQ(one.n_sites, three.n_sites);
    EXPECT_EQ(one.spectrum->pooled_spacings, three.spectrum->pooled_spacings);
    expect_same(one.dynamics->cgf_coherent, three.dynamics->cgf_coherent);
    expect_same(one.dynamics->cgf_incoherent, three.dynamics->cgf_incoherent);
    expect_same(one.dynamics->acf, three.dynamics->acf);
    expect_same(one.dynamics->momentum, three.dynamics->momentum);
}

TEST(Ensemble, RealizationsDifferWithDisorder)
{
    const auto cfg = small_config(4, 0.2, 1e-2);
    const auto r = run_ensemble(cfg);
    double max_sem = 0.0;
    for (double e : r.dynamics->cgf_incoherent.sem)
        max_sem = std::max(max_sem, e);
    EXPECT_GT(max_sem, 0.0);
}

TEST(Ensemble, MeanInvariantUnderRealizationOrder)
{
    const auto cfg = small_config(4, 0.1, 1e-2);
    const auto tg = make_time_grid(cfg);
    std::vector<RealizationResult> rs;
    for (int k = 0; k < 4; ++k)
        rs.push_back(run_realization(cfg, tg, k));
    const auto forward = aggregate_realizations(cfg, tg, rs);
    std::reverse(rs.begin(), rs.end());
    const auto backward = aggregate_realizations(cfg, tg, rs);
    const auto& a = forward.dynamics->cgf_coherent;
    const auto& b = backward.dynamics->cgf_coherent;
    for (std::size_t p = 0; p < a.mean.size(); ++p) {
        EXPECT_NEAR(a.mean[p], b.mean[p], 1e-13);
        EXPECT_NEAR(a.sem[p], b.sem[p], 1e-13);
    }
    auto sa = forward.spectrum->pooled_spacings, sb = backward.spectrum->pooled_spacings;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    EXPECT_EQ(sa, sb);
}

TEST(Ensemble, IncoherentCgfStaysInUnitInterval)
{
    const auto r = run_ensemble(small_config(3, 0.1, 1e-2));
    for (double v : r.dynamics->cgf_incoherent.mean) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0 + 1e-12);
    }
}

TEST(Ensemble, FailureCarriesIndexAndSeed)
{
    // Certain removal leaves only the excitation site, whose CGF is constant.
    auto cfg = small_config(2, 1.0, 0.0);
    try {
        run_ensemble(cfg);
        FAIL() << "expected ensemble_failure";
    } catch (const ensemble_failure& e) {
        EXPECT_EQ(e.index(), 0);
        EXPECT_EQ(e.seed(), derive_seed(42, 0));
        EXPECT_THROW(std::rethrow_exception(e.cause()), degenerate_input);
    }
}

TEST(Ensemble, ValidatesConfig)
{
    auto cfg = small_config(0, 0.0, 0.0);
    EXPECT_THROW(run_ensemble(cfg), std::invalid_argument);
    cfg = small_config(1, 0.0, 0.0);
    cfg.dynamics.origin = {9, 9};
    EXPECT_THROW(run_ensemble(cfg), std::invalid_argument);
    cfg = small_config(1, 0.0, -1.0);
    EXPECT_THROW(run_ensemble(cfg), std::invalid_argument);
}

TEST(Ensemble, SmallSpectrumIsNotUnfolded)
{
    EnsembleConfig cfg{build_rectangle(2, 1)};
    cfg.dynamics.t_final_in_tl = 1.0;
    const auto r = run_ensemble(cfg);
    EXPECT_FALSE(r.spectrum->ks.has_value());
    EXPECT_FALSE(r.spectrum->histogram.has_value());
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_NE(r.warnings.front().find("not unfolded"), std::string::npos);
}
