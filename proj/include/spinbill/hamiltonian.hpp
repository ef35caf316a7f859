#pragma once

// XX model restricted to the one-excitation sector.
//
// Basis state |m> has spin up at site m and down elsewhere. The XX coupling
// moves the excitation between bonded sites with amplitude 2*lambda. The
// uniform transverse field and the site-averaged part of the noise gradient
// only add a multiple of the identity in this sector and are dropped.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spinbill/geometry.hpp"
#include "spinbill/random.hpp"

namespace spinbill {

class Hamiltonian {
public:
    Hamiltonian(const BilliardGeometry& g, double lambda)
        : n_(g.num_sites()), lambda_(lambda), bonds_(g.bonds())
    {
    }

    int dim() const noexcept { return n_; }
    double lambda() const noexcept { return lambda_; }
    double hopping() const noexcept { return 2.0 * lambda_; }
    const std::vector<Bond>& bonds() const noexcept { return bonds_; }

    Eigen::MatrixXd dense() const
    {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_, n_);
        for (const auto& [a, b] : bonds_) {
            h(a, b) = hopping();
            h(b, a) = hopping();
        }
        return h;
    }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const
    {
        if (psi.size() != n_)
            throw std::invalid_argument("Hamiltonian::apply: dimension mismatch");
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n_);
        for (const auto& [a, b] : bonds_) {
            out[a] += hopping() * psi[b];
            out[b] += hopping() * psi[a];
        }
        return out;
    }

    /// <psi|H|psi>, real for a symmetric H.
    double expectation(const Eigen::VectorXcd& psi) const
    {
        return psi.dot(apply(psi)).real();
    }

    /// Coordinate triplets `m m' value`, both orientations, sorted by (m, m').
    void write_triplets(std::ostream& os) const
    {
        std::vector<Bond> entries;
        entries.reserve(2 * bonds_.size());
        for (const auto& [a, b] : bonds_) {
            entries.emplace_back(a, b);
            entries.emplace_back(b, a);
        }
        std::sort(entries.begin(), entries.end());
        const auto old = os.precision(17);
        for (const auto& [a, b] : entries)
            os << a << ' ' << b << ' ' << hopping() << '\n';
        os.precision(old);
    }

private:
    int n_;
    double lambda_;
    std::vector<Bond> bonds_;
};

inline Hamiltonian build_hamiltonian(const BilliardGeometry& g, double lambda)
{
    return Hamiltonian(g, lambda);
}

/// Stroboscopic gradient noise eps(t) * (i + j) sigma_z with eps(t) flat on
/// [0, epsilon_max], resampled once per step.
struct NoiseModel {
    double epsilon_max = 0.0;
    std::uint64_t seed = 0;
    std::vector<int> gradient; // i_m + j_m per site

    static NoiseModel for_geometry(const BilliardGeometry& g, double epsilon_max, std::uint64_t seed)
    {
        if (!(epsilon_max >= 0.0))
            throw std::invalid_argument("NoiseModel: epsilon_max must be non-negative");
        NoiseModel nm{epsilon_max, seed, {}};
        nm.gradient.reserve(g.num_sites());
        for (const auto& s : g.coords())
            nm.gradient.push_back(s.i + s.j);
        return nm;
    }

    bool active() const noexcept { return epsilon_max > 0.0; }
};

inline double sample_noise_amplitude(const NoiseModel& nm, std::mt19937_64& rng)
{
    return nm.epsilon_max * uniform01(rng);
}

/// Diagonal of the noise term in the one-excitation sector, d_m = 2 eps (i_m + j_m),
/// with the convention sigma_z|up> = +|up>.
inline Eigen::VectorXd noise_diagonal(const NoiseModel& nm, double eps_k)
{
    if (!(eps_k >= 0.0))
        throw std::invalid_argument("noise_diagonal: amplitude must be non-negative");
    Eigen::VectorXd d(static_cast<Eigen::Index>(nm.gradient.size()));
    for (std::size_t m = 0; m < nm.gradient.size(); ++m)
        d[static_cast<Eigen::Index>(m)] = 2.0 * eps_k * nm.gradient[m];
    return d;
}

inline Eigen::VectorXd noise_diagonal(const NoiseModel& nm, double eps_k, const BilliardGeometry& g)
{
    if (static_cast<int>(nm.gradient.size()) != g.num_sites())
        throw std::invalid_argument("noise_diagonal: noise model built for a different geometry");
    return noise_diagonal(nm, eps_k);
}

} // namespace spinbill
