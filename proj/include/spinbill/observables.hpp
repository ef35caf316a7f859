#pragma once

// Measured quantities: fidelity, coarse-grained fidelity, autocorrelation,
// population snapshots, momentum distribution and revival contrast.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "spinbill/errors.hpp"
#include "spinbill/evolution.hpp"
#include "spinbill/geometry.hpp"

namespace spinbill {

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }

    void validate() const
    {
        if (times.size() != values.size())
            throw std::invalid_argument("TimeSeries: times and values differ in length");
        for (std::size_t k = 1; k < times.size(); ++k)
            if (!(times[k] > times[k - 1]))
                throw std::invalid_argument("TimeSeries: times must be strictly increasing");
    }
};

/// Real-valued grid over a bounding box, `at(i, j)` with i fastest.
struct Grid {
    int lx = 0;
    int ly = 0;
    std::vector<double> values;

    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * lx + i]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * lx + i]; }
};

/// |F(wx, wy)| of the unnormalised forward 2D DFT; `at(wx, wy)`.
struct MomentumGrid : Grid {};

inline double fidelity(const StateVector& psi0, const StateVector& psit)
{
    if (psi0.size() != psit.size())
        throw std::invalid_argument("fidelity: dimension mismatch");
    return std::norm(psi0.amplitudes.dot(psit.amplitudes));
}

enum class CgfMode { coherent, incoherent };

/// Survival measure on the block [i0, i0+n] x [j0, j0+n].
///
/// coherent:   |sum_block psi_m|^2  (literal overlap with the unnormalised
///             block state; may exceed 1 for spread-out states)
/// incoherent: sum_block |psi_m|^2  (population in the block)
inline double cgf(const StateVector& psit, const BilliardGeometry& g, SiteCoord origin, int n,
                  CgfMode mode = CgfMode::coherent)
{
    if (n < 0)
        throw std::invalid_argument("cgf: block size must be non-negative");
    if (!g.occupied(origin))
        throw std::invalid_argument("cgf: origin is not an occupied site");
    if (psit.size() != g.num_sites())
        throw std::invalid_argument("cgf: state dimension does not match geometry");

    cplx sum = 0.0;
    double pop = 0.0;
    for (int j = origin.j; j <= origin.j + n; ++j)
        for (int i = origin.i; i <= origin.i + n; ++i) {
            const int m = g.index_of({i, j});
            if (m < 0)
                continue;
            sum += psit.amplitudes[m];
            pop += std::norm(psit.amplitudes[m]);
        }
    return mode == CgfMode::coherent ? std::norm(sum) : pop;
}

/// Normalised periodic autocorrelation
///     C(k) = sum_t d_t d_{(t+k) mod N} / sum_t d_t^2,  d = v - mean(v),
/// for lags k = 0..N-1, returned on lag times k * spacing.
inline TimeSeries autocorrelation(const TimeSeries& s)
{
    s.validate();
    const std::size_t n = s.size();
    if (n < 2)
        throw std::invalid_argument("autocorrelation: need at least two samples");
    const double spacing = s.times[1] - s.times[0];
    for (std::size_t k = 2; k < n; ++k)
        if (std::abs((s.times[k] - s.times[k - 1]) - spacing) > 1e-9 * std::max(1.0, std::abs(spacing)))
            throw std::invalid_argument("autocorrelation: samples must be uniformly spaced");

    const double mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / static_cast<double>(n);
    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t)
        d[t] = s.values[t] - mean;
    const double var = std::inner_product(d.begin(), d.end(), d.begin(), 0.0);
    if (!(var > 0.0))
        throw degenerate_input("autocorrelation: series has zero variance");

    TimeSeries out;
    out.times.resize(n);
    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t < n; ++t)
            acc += d[t] * d[(t + k) % n];
        out.times[k] = static_cast<double>(k) * spacing;
        out.values[k] = k == 0 ? 1.0 : acc / var;
    }
    return out;
}

inline Grid population_snapshot(const StateVector& psit, const BilliardGeometry& g)
{
    if (psit.size() != g.num_sites())
        throw std::invalid_argument("population_snapshot: state dimension does not match geometry");
    Grid grid{g.lx(), g.ly(), std::vector<double>(static_cast<std::size_t>(g.lx()) * g.ly(), 0.0)};
    for (int m = 0; m < g.num_sites(); ++m) {
        const auto s = g.coords()[m];
        grid.at(s.i, s.j) = std::norm(psit.amplitudes[m]);
    }
    return grid;
}

namespace detail {
// FFTW's planner is not re-entrant; execution on a created plan is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace detail

inline MomentumGrid momentum_distribution(const StateVector& psit, const BilliardGeometry& g)
{
    if (psit.size() != g.num_sites())
        throw std::invalid_argument("momentum_distribution: state dimension does not match geometry");
    const int lx = g.lx();
    const int ly = g.ly();
    const std::size_t cells = static_cast<std::size_t>(lx) * ly;

    auto* in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * cells));
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * cells));
    if (!in || !out) {
        fftw_free(in);
        fftw_free(out);
        throw std::bad_alloc();
    }
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        // Row-major with j as the slow index: dims are (ly, lx).
        plan = fftw_plan_dft_2d(ly, lx, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (std::size_t c = 0; c < cells; ++c)
        in[c][0] = in[c][1] = 0.0;
    for (int m = 0; m < g.num_sites(); ++m) {
        const auto s = g.coords()[m];
        const std::size_t c = static_cast<std::size_t>(s.j) * lx + s.i;
        in[c][0] = psit.amplitudes[m].real();
        in[c][1] = psit.amplitudes[m].imag();
    }
    fftw_execute(plan);

    MomentumGrid mg;
    mg.lx = lx;
    mg.ly = ly;
    mg.values.resize(cells);
    for (std::size_t c = 0; c < cells; ++c)
        mg.values[c] = std::hypot(out[c][0], out[c][1]);

    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return mg;
}

/// Cells whose magnitude reaches `threshold_fraction` of the maximum.
inline int peak_census(const Grid& mg, double threshold_fraction)
{
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw std::invalid_argument("peak_census: threshold_fraction must lie in (0, 1)");
    if (mg.values.empty())
        return 0;
    const double cut = threshold_fraction * *std::max_element(mg.values.begin(), mg.values.end());
    return static_cast<int>(std::count_if(mg.values.begin(), mg.values.end(), [cut](double v) { return v >= cut; }));
}

/// Largest sample within +-half_width of `centre`; NaN if the window is empty.
inline double window_max(const TimeSeries& s, double centre, double half_width)
{
    double best = std::numeric_limits<double>::quiet_NaN();
    const double tol = 1e-9 * std::max(1.0, std::abs(centre));
    for (std::size_t k = 0; k < s.size(); ++k)
        if (std::abs(s.times[k] - centre) <= half_width + tol)
            best = std::isnan(best) ? s.values[k] : std::max(best, s.values[k]);
    return best;
}

/// Mean over k = 1..n_max of the series maximum near k * t_l, divided by
/// the global mean of the series.
inline double revival_contrast(const TimeSeries& s, double t_l, int n_max = 10, double window_fraction = 0.25)
{
    s.validate();
    if (!(t_l > 0.0) || n_max < 1 || !(window_fraction > 0.0))
        throw std::invalid_argument("revival_contrast: t_l, n_max and window_fraction must be positive");
    if (s.size() == 0 || s.times.back() < n_max * t_l * (1.0 - 1e-12))
        throw std::invalid_argument("revival_contrast: series does not span n_max * T_L");

    const double mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / static_cast<double>(s.size());
    if (mean == 0.0)
        throw degenerate_input("revival_contrast: series mean is zero");
    double peaks = 0.0;
    for (int k = 1; k <= n_max; ++k) {
        const double v = window_max(s, k * t_l, window_fraction * t_l);
        if (std::isnan(v))
            throw std::invalid_argument("revival_contrast: no sample near revival " + std::to_string(k));
        peaks += v;
    }
    return peaks / n_max / mean;
}

} // namespace spinbill
