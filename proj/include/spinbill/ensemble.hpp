#pragma once

// Disorder ensembles: N_R realizations of defects and gate noise, each run
// through the full spectrum + dynamics pipeline, then averaged pointwise.
//
// Realization r uses seed derive_seed(base_seed, r). Defects draw from
// derive_seed(seed, 0) and the noise history from derive_seed(seed, 1).
// Results are gathered by index, so the output does not depend on the number
// of workers or on completion order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "spinbill/evolution.hpp"
#include "spinbill/geometry.hpp"
#include "spinbill/hamiltonian.hpp"
#include "spinbill/observables.hpp"
#include "spinbill/random.hpp"
#include "spinbill/spectral_stats.hpp"

namespace spinbill {

struct SpectrumOptions {
    double trim_fraction = 0.02;
    int poly_degree = 7;
    int n_bins = 40;
    double s_max = 4.0;
};

struct DynamicsOptions {
    double dt = 0.0; // <= 0 selects one swap time, T_lambda
    double t_final_in_tl = 10.0;
    int cgf_n = 3;
    SiteCoord origin{0, 0};
    std::vector<double> snapshot_times; // empty selects {0, T_L / 2, t_final}
    CgfMode acf_mode = CgfMode::coherent; // CGF variant fed to the autocorrelation
    bool keep_states = false;
};

struct EnsembleConfig {
    BilliardGeometry geometry;
    double lambda = 1.0;
    int n_realizations = 1;
    double p_defect = 0.0;
    double epsilon_max = 0.0;
    std::uint64_t base_seed = 0;
    SpectrumOptions spectrum{};
    DynamicsOptions dynamics{};
    bool compute_spectrum = true;
    bool compute_dynamics = true;

    void validate() const
    {
        if (n_realizations < 1)
            throw std::invalid_argument("ensemble: n_realizations must be at least 1");
        if (!(lambda > 0.0))
            throw std::invalid_argument("ensemble: lambda must be positive");
        if (!(p_defect >= 0.0 && p_defect <= 1.0))
            throw std::invalid_argument("ensemble: p_defect must lie in [0, 1]");
        if (!(epsilon_max >= 0.0))
            throw std::invalid_argument("ensemble: epsilon_max must be non-negative");
        if (!(dynamics.t_final_in_tl >= 0.0))
            throw std::invalid_argument("ensemble: t_final_in_TL must be non-negative");
        if (dynamics.cgf_n < 0)
            throw std::invalid_argument("ensemble: cgf_n must be non-negative");
        if (!geometry.occupied(dynamics.origin))
            throw std::invalid_argument("ensemble: excitation site is not occupied");
    }
};

/// Time grid shared by every realization of one configuration.
struct TimeGrid {
    CharacteristicTimes scales;
    double dt;
    std::int64_t n_steps;
    std::vector<std::int64_t> snapshot_steps;

    double t_final() const { return static_cast<double>(n_steps) * dt; }
};

inline TimeGrid make_time_grid(const EnsembleConfig& cfg)
{
    TimeGrid tg{characteristic_times(cfg.geometry, cfg.lambda), 0.0, 0, {}};
    tg.dt = cfg.dynamics.dt > 0.0 ? cfg.dynamics.dt : tg.scales.t_lambda;
    tg.n_steps = std::llround(cfg.dynamics.t_final_in_tl * tg.scales.t_l / tg.dt);
    std::vector<double> snaps = cfg.dynamics.snapshot_times;
    if (snaps.empty())
        snaps = {0.0, tg.scales.t_l / 2.0, tg.t_final()};
    for (double t : snaps) {
        if (!(t >= 0.0))
            throw std::invalid_argument("ensemble: snapshot times must be non-negative");
        tg.snapshot_steps.push_back(std::min<std::int64_t>(tg.n_steps, std::llround(t / tg.dt)));
    }
    return tg;
}

struct RealizationResult {
    std::uint64_t seed = 0;
    int n_sites = 0;
    std::vector<std::string> warnings;

    std::vector<double> energies;
    std::optional<UnfoldedSpectrum> unfolded; // absent if too few levels to unfold

    std::vector<double> times;
    std::vector<double> cgf_coherent;
    std::vector<double> cgf_incoherent;
    std::vector<double> acf; // of the CGF selected by DynamicsOptions::acf_mode
    double energy_drift = 0.0;
    std::vector<Eigen::VectorXcd> states; // only with DynamicsOptions::keep_states
    std::optional<BilliardGeometry> geometry; // after defects
    std::vector<Grid> snapshots;
    MomentumGrid momentum;
};

inline RealizationResult run_realization(const EnsembleConfig& cfg, const TimeGrid& tg, int index)
{
    RealizationResult r;
    r.seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(index));

    const BilliardGeometry g = apply_defects(
        cfg.geometry, DefectConfig{cfg.p_defect, derive_seed(r.seed, 0), {cfg.dynamics.origin}});
    r.geometry = g;
    r.n_sites = g.num_sites();
    r.warnings = g.warnings();
    const Hamiltonian h = build_hamiltonian(g, cfg.lambda);
    const SpectralDecomposition sd = diagonalize(h);

    if (cfg.compute_spectrum) {
        r.energies.assign(sd.energies.data(), sd.energies.data() + sd.dim());
        try {
            r.unfolded = unfold(trim_edges(r.energies, cfg.spectrum.trim_fraction), cfg.spectrum.poly_degree);
        } catch (const std::invalid_argument& e) {
            r.warnings.emplace_back(std::string("spectrum not unfolded: ") + e.what());
        }
    }

    if (cfg.compute_dynamics) {
        PropagationPlan plan{tg.dt, tg.n_steps, 1, std::nullopt};
        if (cfg.epsilon_max > 0.0)
            plan.noise = NoiseModel::for_geometry(g, cfg.epsilon_max, derive_seed(r.seed, 1));
        const StateVector psi0 = initial_state(g, cfg.dynamics.origin);
        const double e0 = h.expectation(psi0.amplitudes);

        r.times.reserve(static_cast<std::size_t>(tg.n_steps) + 1);
        r.snapshots.resize(tg.snapshot_steps.size());
        propagate(sd, plan, psi0, [&](std::int64_t k, double t, const Eigen::VectorXcd& amp) {
            const StateVector psi{amp};
            r.times.push_back(t);
            if (cfg.dynamics.keep_states)
                r.states.push_back(amp);
            r.cgf_coherent.push_back(cgf(psi, g, cfg.dynamics.origin, cfg.dynamics.cgf_n, CgfMode::coherent));
            r.cgf_incoherent.push_back(cgf(psi, g, cfg.dynamics.origin, cfg.dynamics.cgf_n, CgfMode::incoherent));
            for (std::size_t s = 0; s < tg.snapshot_steps.size(); ++s)
                if (tg.snapshot_steps[s] == k)
                    r.snapshots[s] = population_snapshot(psi, g);
            if (k == tg.n_steps) {
                r.momentum = momentum_distribution(psi, g);
                r.energy_drift = std::abs(h.expectation(amp) - e0);
            }
        });
        const auto& source = cfg.dynamics.acf_mode == CgfMode::coherent ? r.cgf_coherent : r.cgf_incoherent;
        r.acf = autocorrelation(TimeSeries{r.times, source}).values;
    }
    return r;
}

/// Pointwise sample mean and standard error of the mean (stddev / sqrt(N),
/// zero for a single sample).
struct MeanErr {
    std::vector<double> mean;
    std::vector<double> sem;
};

inline MeanErr aggregate(const std::vector<const std::vector<double>*>& samples)
{
    MeanErr out;
    if (samples.empty())
        return out;
    const std::size_t len = samples.front()->size();
    for (const auto* s : samples)
        if (s->size() != len)
            throw std::logic_error("aggregate: samples differ in length");
    const double n = static_cast<double>(samples.size());
    out.mean.assign(len, 0.0);
    out.sem.assign(len, 0.0);
    for (std::size_t p = 0; p < len; ++p) {
        double sum = 0.0;
        for (const auto* s : samples)
            sum += (*s)[p];
        const double mean = sum / n;
        out.mean[p] = mean;
        if (samples.size() > 1) {
            double ss = 0.0;
            for (const auto* s : samples)
                ss += ((*s)[p] - mean) * ((*s)[p] - mean);
            out.sem[p] = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
    }
    return out;
}

struct KsDistances {
    double poisson = 0.0;
    double semi_poisson = 0.0;
    double wigner = 0.0;

    double operator[](SpacingLaw law) const
    {
        switch (law) {
        case SpacingLaw::poisson:
            return poisson;
        case SpacingLaw::semi_poisson:
            return semi_poisson;
        case SpacingLaw::wigner:
            return wigner;
        }
        return 0.0;
    }

    SpacingLaw best() const
    {
        SpacingLaw b = SpacingLaw::poisson;
        for (SpacingLaw law : all_spacing_laws)
            if ((*this)[law] < (*this)[b])
                b = law;
        return b;
    }
};

inline KsDistances ks_distances(const std::vector<double>& spacings)
{
    return {ks_distance(spacings, SpacingLaw::poisson), ks_distance(spacings, SpacingLaw::semi_poisson),
            ks_distance(spacings, SpacingLaw::wigner)};
}

struct EnsembleSpectrum {
    std::vector<std::vector<double>> energies; // per realization, ascending
    std::vector<double> pooled_spacings;
    int n_clamped = 0;
    std::optional<SpacingHistogram> histogram; // of the pooled spacings
    MeanErr histogram_per_realization;
    std::optional<KsDistances> ks;
};

struct EnsembleDynamics {
    std::vector<double> times;
    MeanErr cgf_coherent;
    MeanErr cgf_incoherent;
    MeanErr acf; // per-realization ACFs averaged
    std::vector<double> snapshot_times;
    std::vector<MeanErr> snapshots;
    MeanErr momentum;
    int lx = 0;
    int ly = 0;
    double max_energy_drift = 0.0;
};

struct EnsembleResult {
    int n_realizations = 0;
    TimeGrid grid;
    std::vector<std::uint64_t> seeds;
    std::vector<int> n_sites;
    std::vector<std::string> warnings;
    std::optional<EnsembleSpectrum> spectrum;
    std::optional<EnsembleDynamics> dynamics;
};

class ensemble_failure : public std::runtime_error {
public:
    ensemble_failure(int index, std::uint64_t seed, const std::string& what, std::exception_ptr cause)
        : std::runtime_error("realization " + std::to_string(index) + " (seed " + std::to_string(seed) +
                             ") failed: " + what),
          index_(index), seed_(seed), cause_(std::move(cause))
    {
    }

    int index() const noexcept { return index_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::exception_ptr cause() const noexcept { return cause_; }

private:
    int index_;
    std::uint64_t seed_;
    std::exception_ptr cause_;
};

inline EnsembleResult aggregate_realizations(const EnsembleConfig& cfg, const TimeGrid& tg,
                                             const std::vector<RealizationResult>& rs)
{
    EnsembleResult out;
    out.n_realizations = static_cast<int>(rs.size());
    out.grid = tg;
    for (std::size_t k = 0; k < rs.size(); ++k) {
        out.seeds.push_back(rs[k].seed);
        out.n_sites.push_back(rs[k].n_sites);
        for (const auto& w : rs[k].warnings)
            out.warnings.push_back("realization " + std::to_string(k) + ": " + w);
    }

    if (cfg.compute_spectrum) {
        EnsembleSpectrum es;
        std::vector<std::vector<double>> per_hist;
        for (const auto& r : rs) {
            es.energies.push_back(r.energies);
            if (!r.unfolded)
                continue;
            es.pooled_spacings.insert(es.pooled_spacings.end(), r.unfolded->spacings.begin(),
                                      r.unfolded->spacings.end());
            es.n_clamped += r.unfolded->n_clamped;
            per_hist.push_back(spacing_histogram(*r.unfolded, cfg.spectrum.n_bins, cfg.spectrum.s_max).densities);
        }
        if (!es.pooled_spacings.empty()) {
            es.histogram = spacing_histogram(es.pooled_spacings, cfg.spectrum.n_bins, cfg.spectrum.s_max);
            std::vector<const std::vector<double>*> ptrs;
            for (const auto& h : per_hist)
                ptrs.push_back(&h);
            es.histogram_per_realization = aggregate(ptrs);
        }
        if (es.pooled_spacings.size() >= 10)
            es.ks = ks_distances(es.pooled_spacings);
        out.spectrum = std::move(es);
    }

    if (cfg.compute_dynamics) {
        EnsembleDynamics ed;
        ed.times = rs.front().times;
        ed.lx = cfg.geometry.lx();
        ed.ly = cfg.geometry.ly();
        auto collect = [&](auto member) {
            std::vector<const std::vector<double>*> ptrs;
            for (const auto& r : rs)
                ptrs.push_back(&(r.*member));
            return aggregate(ptrs);
        };
        ed.cgf_coherent = collect(&RealizationResult::cgf_coherent);
        ed.cgf_incoherent = collect(&RealizationResult::cgf_incoherent);
        ed.acf = collect(&RealizationResult::acf);
        for (std::size_t s = 0; s < tg.snapshot_steps.size(); ++s) {
            ed.snapshot_times.push_back(static_cast<double>(tg.snapshot_steps[s]) * tg.dt);
            std::vector<const std::vector<double>*> ptrs;
            for (const auto& r : rs)
                ptrs.push_back(&r.snapshots[s].values);
            ed.snapshots.push_back(aggregate(ptrs));
        }
        std::vector<const std::vector<double>*> mom;
        for (const auto& r : rs) {
            mom.push_back(&r.momentum.values);
            ed.max_energy_drift = std::max(ed.max_energy_drift, r.energy_drift);
        }
        ed.momentum = aggregate(mom);
        out.dynamics = std::move(ed);
    }
    return out;
}

/// Runs every realization on up to `workers` threads (0 = hardware
/// concurrency). The first failing realization, by index, is rethrown as
/// ensemble_failure.
inline EnsembleResult run_ensemble(const EnsembleConfig& cfg, unsigned workers = 1)
{
    cfg.validate();
    const TimeGrid tg = make_time_grid(cfg);
    const auto n = static_cast<std::size_t>(cfg.n_realizations);

    std::vector<RealizationResult> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            try {
                results[k] = run_realization(cfg, tg, static_cast<int>(k));
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }

    for (std::size_t k = 0; k < n; ++k)
        if (errors[k]) {
            const std::uint64_t seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(k));
            try {
                std::rethrow_exception(errors[k]);
            } catch (const std::exception& e) {
                throw ensemble_failure(static_cast<int>(k), seed, e.what(), errors[k]);
            } catch (...) {
                throw ensemble_failure(static_cast<int>(k), seed, "unknown error", errors[k]);
            }
        }
    return aggregate_realizations(cfg, tg, results);
}

} // namespace spinbill
