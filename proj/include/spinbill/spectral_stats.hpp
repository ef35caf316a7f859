#pragma once

// Nearest-neighbour level-spacing statistics.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spinbill {

struct UnfoldedSpectrum {
    std::vector<double> unfolded_levels;
    std::vector<double> spacings;
    int n_clamped = 0; // spacings forced to zero where the fitted staircase decreases
};

/// Drops floor(fraction * n) levels from each end of the sorted spectrum.
inline std::vector<double> trim_edges(std::vector<double> levels, double fraction)
{
    if (!(fraction >= 0.0 && fraction < 0.5))
        throw std::invalid_argument("trim_edges: fraction must lie in [0, 0.5)");
    std::sort(levels.begin(), levels.end());
    const auto cut = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(levels.size())));
    return {levels.begin() + static_cast<std::ptrdiff_t>(cut), levels.end() - static_cast<std::ptrdiff_t>(cut)};
}

/// Maps levels through a least-squares polynomial fit of the staircase
/// N(E_k) = k + 1. The abscissa is rescaled to [-1, 1], which makes the
/// result invariant under E -> aE + b for a > 0.
inline UnfoldedSpectrum unfold(std::vector<double> levels, int poly_degree = 7)
{
    if (poly_degree < 1)
        throw std::invalid_argument("unfold: poly_degree must be at least 1");
    std::sort(levels.begin(), levels.end());
    std::vector<double> uniq(levels);
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (static_cast<int>(uniq.size()) < poly_degree + 2)
        throw std::invalid_argument("unfold: need at least poly_degree + 2 distinct levels, got " +
                                    std::to_string(uniq.size()));

    const auto n = static_cast<Eigen::Index>(levels.size());
    const double lo = levels.front();
    const double hi = levels.back();
    const double mid = 0.5 * (hi + lo);
    const double half = 0.5 * (hi - lo);

    Eigen::MatrixXd vander(n, poly_degree + 1);
    Eigen::VectorXd staircase(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = (levels[k] - mid) / half;
        double p = 1.0;
        for (int d = 0; d <= poly_degree; ++d, p *= x)
            vander(k, d) = p;
        staircase[k] = static_cast<double>(k + 1);
    }
    const Eigen::VectorXd coeff = vander.colPivHouseholderQr().solve(staircase);
    const Eigen::VectorXd fitted = vander * coeff;

    UnfoldedSpectrum us;
    us.unfolded_levels.assign(fitted.data(), fitted.data() + n);
    us.spacings.resize(static_cast<std::size_t>(n - 1));
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        double s = fitted[k + 1] - fitted[k];
        if (s < 0.0) {
            s = 0.0;
            ++us.n_clamped;
        }
        us.spacings[static_cast<std::size_t>(k)] = s;
    }
    return us;
}

struct SpacingHistogram {
    std::vector<double> bin_edges;
    std::vector<double> densities;
    int n_in_range = 0;
    int n_overflow = 0;

    double bin_width() const { return bin_edges[1] - bin_edges[0]; }
    double bin_center(std::size_t b) const { return 0.5 * (bin_edges[b] + bin_edges[b + 1]); }
};

/// Density histogram on [0, s_max]; spacings above s_max are counted in
/// `n_overflow` and excluded from the normalisation.
inline SpacingHistogram spacing_histogram(const std::vector<double>& spacings, int n_bins, double s_max)
{
    if (n_bins < 2 || !(s_max > 0.0))
        throw std::invalid_argument("spacing_histogram: need n_bins >= 2 and s_max > 0");
    if (spacings.empty())
        throw std::invalid_argument("spacing_histogram: no spacings");

    SpacingHistogram h;
    const double width = s_max / n_bins;
    h.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int b = 0; b <= n_bins; ++b)
        h.bin_edges[b] = b * width;
    std::vector<int> counts(static_cast<std::size_t>(n_bins), 0);
    for (double s : spacings) {
        if (s > s_max) {
            ++h.n_overflow;
            continue;
        }
        const int b = std::min(n_bins - 1, static_cast<int>(s / width));
        ++counts[b];
        ++h.n_in_range;
    }
    h.densities.assign(static_cast<std::size_t>(n_bins), 0.0);
    if (h.n_in_range > 0)
        for (int b = 0; b < n_bins; ++b)
            h.densities[b] = counts[b] / (static_cast<double>(h.n_in_range) * width);
    return h;
}

inline SpacingHistogram spacing_histogram(const UnfoldedSpectrum& us, int n_bins, double s_max)
{
    return spacing_histogram(us.spacings, n_bins, s_max);
}

enum class SpacingLaw { poisson, semi_poisson, wigner };

inline constexpr SpacingLaw all_spacing_laws[] = {SpacingLaw::poisson, SpacingLaw::semi_poisson,
                                                   SpacingLaw::wigner};

inline std::string_view to_string(SpacingLaw law)
{
    switch (law) {
    case SpacingLaw::poisson:
        return "poisson";
    case SpacingLaw::semi_poisson:
        return "semi_poisson";
    case SpacingLaw::wigner:
        return "wigner";
    }
    return "?";
}

inline double reference_pdf(SpacingLaw law, double s)
{
    if (!(s >= 0.0))
        throw std::invalid_argument("reference_pdf: spacing must be non-negative");
    switch (law) {
    case SpacingLaw::poisson:
        return std::exp(-s);
    case SpacingLaw::semi_poisson:
        return 4.0 * s * std::exp(-2.0 * s);
    case SpacingLaw::wigner:
        return std::numbers::pi / 2.0 * s * std::exp(-std::numbers::pi * s * s / 4.0);
    }
    return 0.0;
}

inline double reference_cdf(SpacingLaw law, double s)
{
    if (!(s >= 0.0))
        throw std::invalid_argument("reference_cdf: spacing must be non-negative");
    switch (law) {
    case SpacingLaw::poisson:
        return -std::expm1(-s);
    case SpacingLaw::semi_poisson:
        return 1.0 - (1.0 + 2.0 * s) * std::exp(-2.0 * s);
    case SpacingLaw::wigner:
        return -std::expm1(-std::numbers::pi * s * s / 4.0);
    }
    return 0.0;
}

/// Kolmogorov-Smirnov statistic sup |F_emp - F_law|.
inline double ks_distance(std::vector<double> spacings, SpacingLaw law)
{
    if (spacings.size() < 10)
        throw std::invalid_argument("ks_distance: need at least 10 spacings");
    std::sort(spacings.begin(), spacings.end());
    const double n = static_cast<double>(spacings.size());
    double d = 0.0;
    for (std::size_t k = 0; k < spacings.size(); ++k) {
        const double f = reference_cdf(law, std::max(0.0, spacings[k]));
        d = std::max({d, (static_cast<double>(k) + 1.0) / n - f, f - static_cast<double>(k) / n});
    }
    return std::clamp(d, 0.0, 1.0);
}

} // namespace spinbill
