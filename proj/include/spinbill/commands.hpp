#pragma once

// The three pipeline commands behind the `spinbill` executable. Each writes
// CSV files with a header row into RunConfig::output_dir and nowhere else.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "spinbill/config.hpp"
#include "spinbill/ensemble.hpp"
#include "spinbill/io.hpp"
#include "spinbill/observables.hpp"
#include "spinbill/spectral_stats.hpp"

namespace spinbill {

namespace detail {

inline std::filesystem::path prepare_output_dir(const RunConfig& c)
{
    const std::filesystem::path dir(c.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_manifest(const std::filesystem::path& dir, const RunConfig& c, std::string_view command,
                           const EnsembleResult& r)
{
    auto os = open_output(dir, "manifest.txt");
    os << "# spinbill " << command << '\n';
    write_config(os, c);
    os << "# T_lambda = " << format_double(r.grid.scales.t_lambda) << '\n';
    os << "# T_L = " << format_double(r.grid.scales.t_l) << '\n';
    os << "# characteristic_length = " << r.grid.scales.length << '\n';
    os << "# dt_effective = " << format_double(r.grid.dt) << '\n';
    os << "# n_steps = " << r.grid.n_steps << '\n';
    for (std::size_t k = 0; k < r.seeds.size(); ++k)
        os << "# realization " << k << ": seed = " << r.seeds[k] << ", n_sites = " << r.n_sites[k] << '\n';
}

// Appends ",<mean>" or ",<mean>,<sem>" for point p.
inline void put(std::ostream& os, const MeanErr& m, std::size_t p, bool with_sem)
{
    os << ',' << format_double(m.mean[p]);
    if (with_sem)
        os << ',' << format_double(m.sem[p]);
}

inline void write_spectrum_files(const std::filesystem::path& dir, const EnsembleResult& r, bool ensemble)
{
    const auto& es = *r.spectrum;
    {
        auto os = open_output(dir, "spectrum.csv");
        if (ensemble) {
            os << "realization,index,eigenvalue\n";
            for (std::size_t k = 0; k < es.energies.size(); ++k)
                for (std::size_t e = 0; e < es.energies[k].size(); ++e)
                    os << k << ',' << e << ',' << format_double(es.energies[k][e]) << '\n';
        } else {
            os << "index,eigenvalue\n";
            for (std::size_t e = 0; e < es.energies.front().size(); ++e)
                os << e << ',' << format_double(es.energies.front()[e]) << '\n';
        }
    }

    auto summary = open_output(dir, "lss_summary.txt");
    summary << "n_spacings = " << es.pooled_spacings.size() << '\n';
    summary << "n_clamped = " << es.n_clamped << '\n';
    if (!es.histogram || !es.ks) {
        summary << "status = insufficient_levels\n";
        return;
    }
    summary << "status = ok\n";
    summary << "n_overflow = " << es.histogram->n_overflow << '\n';
    summary << "ks_poisson = " << format_double(es.ks->poisson) << '\n';
    summary << "ks_semi_poisson = " << format_double(es.ks->semi_poisson) << '\n';
    summary << "ks_wigner = " << format_double(es.ks->wigner) << '\n';
    summary << "best_fit = " << to_string(es.ks->best()) << '\n';

    auto os = open_output(dir, "lss.csv");
    os << "bin_center,empirical_density" << (ensemble ? ",empirical_density_stderr" : "")
       << ",poisson_pdf,semi_poisson_pdf,wigner_pdf\n";
    const auto& h = *es.histogram;
    for (std::size_t b = 0; b < h.densities.size(); ++b) {
        const double s = h.bin_center(b);
        os << format_double(s) << ',' << format_double(h.densities[b]);
        if (ensemble)
            os << ',' << format_double(es.histogram_per_realization.sem[b]);
        for (SpacingLaw law : all_spacing_laws)
            os << ',' << format_double(reference_pdf(law, s));
        os << '\n';
    }
}

inline void write_dynamics_files(const std::filesystem::path& dir, const RunConfig& c, const EnsembleResult& r,
                                 bool ensemble)
{
    const auto& d = *r.dynamics;
    {
        auto os = open_output(dir, "cgf.csv");
        os << (ensemble ? "t,coherent,coherent_stderr,incoherent,incoherent_stderr\n" : "t,coherent,incoherent\n");
        for (std::size_t p = 0; p < d.times.size(); ++p) {
            os << format_double(d.times[p]);
            put(os, d.cgf_coherent, p, ensemble);
            put(os, d.cgf_incoherent, p, ensemble);
            os << '\n';
        }
    }
    {
        auto os = open_output(dir, "acf.csv");
        os << (ensemble ? "lag_time,C,C_stderr\n" : "lag_time,C\n");
        for (std::size_t p = 0; p < d.times.size(); ++p) {
            os << format_double(d.times[p] - d.times.front());
            put(os, d.acf, p, ensemble);
            os << '\n';
        }
    }
    {
        auto index = open_output(dir, "snapshots.csv");
        index << "index,t,file\n";
        for (std::size_t s = 0; s < d.snapshots.size(); ++s) {
            const std::string name = "snapshot_" + std::to_string(s) + ".csv";
            index << s << ',' << format_double(d.snapshot_times[s]) << ',' << name << '\n';
            auto os = open_output(dir, name);
            os << (ensemble ? "i,j,prob,prob_stderr\n" : "i,j,prob\n");
            for (int j = 0; j < d.ly; ++j)
                for (int i = 0; i < d.lx; ++i) {
                    os << i << ',' << j;
                    put(os, d.snapshots[s], static_cast<std::size_t>(j) * d.lx + i, ensemble);
                    os << '\n';
                }
        }
    }
    {
        auto os = open_output(dir, "momentum.csv");
        os << (ensemble ? "wx_index,wy_index,magnitude,magnitude_stderr\n" : "wx_index,wy_index,magnitude\n");
        for (int wy = 0; wy < d.ly; ++wy)
            for (int wx = 0; wx < d.lx; ++wx) {
                os << wx << ',' << wy;
                put(os, d.momentum, static_cast<std::size_t>(wy) * d.lx + wx, ensemble);
                os << '\n';
            }
    }

    const TimeSeries coherent{d.times, d.cgf_coherent.mean};
    const TimeSeries incoherent{d.times, d.cgf_incoherent.mean};
    auto summary = open_output(dir, "evolve_summary.txt");
    summary << "T_lambda = " << format_double(r.grid.scales.t_lambda) << '\n';
    summary << "T_L = " << format_double(r.grid.scales.t_l) << '\n';
    summary << "t_final = " << format_double(r.grid.t_final()) << '\n';
    summary << "max_energy_drift = " << format_double(d.max_energy_drift) << '\n';
    const Grid mean_momentum{d.lx, d.ly, d.momentum.mean};
    summary << "peak_census = " << peak_census(mean_momentum, c.census_threshold) << '\n';
    if (r.grid.t_final() >= c.revival_n_max * r.grid.scales.t_l * (1.0 - 1e-12)) {
        summary << "revival_contrast_coherent = "
                << format_double(revival_contrast(coherent, r.grid.scales.t_l, c.revival_n_max, c.window_fraction))
                << '\n';
        summary << "revival_contrast_incoherent = "
                << format_double(revival_contrast(incoherent, r.grid.scales.t_l, c.revival_n_max, c.window_fraction))
                << '\n';
    }
}

inline void print_warnings(std::ostream* log, const EnsembleResult& r)
{
    if (log)
        for (const auto& w : r.warnings)
            *log << "warning: " << w << '\n';
}

} // namespace detail

/// Sorted eigenvalues, spacing histogram and KS distances of one realization.
inline EnsembleResult cmd_spectrum(const RunConfig& c, std::ostream* log = nullptr)
{
    EnsembleConfig e = to_ensemble_config(c);
    e.n_realizations = 1;
    e.compute_dynamics = false;
    const EnsembleResult r = run_ensemble(e, 1);
    detail::print_warnings(log, r);
    const auto dir = detail::prepare_output_dir(c);
    detail::write_spectrum_files(dir, r, false);
    detail::write_manifest(dir, c, "spectrum", r);
    return r;
}

/// One stroboscopic trajectory from the excitation site: CGF, ACF,
/// snapshots and the final momentum grid.
inline EnsembleResult cmd_evolve(const RunConfig& c, std::ostream* log = nullptr)
{
    EnsembleConfig e = to_ensemble_config(c);
    e.n_realizations = 1;
    e.compute_spectrum = false;
    e.validate();
    const TimeGrid tg = make_time_grid(e);
    RealizationResult rr;
    try {
        rr = run_realization(e, tg, 0);
    } catch (const std::exception& ex) {
        throw ensemble_failure(0, derive_seed(e.base_seed, 0), ex.what(), std::current_exception());
    }
    const EnsembleResult r = aggregate_realizations(e, tg, {rr});
    detail::print_warnings(log, r);

    const auto dir = detail::prepare_output_dir(c);
    detail::write_dynamics_files(dir, c, r, false);
    if (c.write_trajectory) {
        auto os = open_output(dir, "trajectory.csv");
        os << 't';
        for (int m = 0; m < rr.n_sites; ++m)
            os << ",re_" << m << ",im_" << m;
        os << '\n';
        for (std::size_t p = 0; p < rr.states.size(); ++p) {
            os << format_double(rr.times[p]);
            for (Eigen::Index m = 0; m < rr.states[p].size(); ++m)
                os << ',' << format_double(rr.states[p][m].real()) << ',' << format_double(rr.states[p][m].imag());
            os << '\n';
        }
    }
    if (c.write_hamiltonian) {
        auto os = open_output(dir, "hamiltonian.txt");
        build_hamiltonian(*rr.geometry, e.lambda).write_triplets(os);
    }
    {
        auto os = open_output(dir, "geometry.txt");
        write_mask(os, *rr.geometry);
    }
    detail::write_manifest(dir, c, "evolve", r);
    return r;
}

/// N_R realizations averaged pointwise, with standard-error columns.
inline EnsembleResult cmd_ensemble(const RunConfig& c, unsigned workers = 1, std::ostream* log = nullptr)
{
    const EnsembleConfig e = to_ensemble_config(c);
    const EnsembleResult r = run_ensemble(e, workers);
    detail::print_warnings(log, r);
    const auto dir = detail::prepare_output_dir(c);
    detail::write_spectrum_files(dir, r, true);
    detail::write_dynamics_files(dir, c, r, true);
    detail::write_manifest(dir, c, "ensemble", r);
    return r;
}

} // namespace spinbill
