#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinbill/errors.hpp"
#include "spinbill/geometry.hpp"
#include "spinbill/hamiltonian.hpp"

namespace spinbill {

using cplx = std::complex<double>;

/// Amplitudes over the occupied sites of one geometry, in site-index order.
struct StateVector {
    Eigen::VectorXcd amplitudes;

    int size() const noexcept { return static_cast<int>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }
};

inline StateVector initial_state(const BilliardGeometry& g, SiteCoord s)
{
    const int m = g.index_of(s);
    if (m < 0)
        throw std::invalid_argument("initial_state: site (" + std::to_string(s.i) + "," + std::to_string(s.j) +
                                    ") is not occupied");
    StateVector psi{Eigen::VectorXcd::Zero(g.num_sites())};
    psi.amplitudes[m] = 1.0;
    return psi;
}

/// Eigenvalues ascending; column k of `vectors` belongs to `energies[k]`.
struct SpectralDecomposition {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;

    int dim() const noexcept { return static_cast<int>(energies.size()); }
};

inline SpectralDecomposition diagonalize(const Hamiltonian& h)
{
    if (h.dim() < 1)
        throw std::invalid_argument("diagonalize: empty Hamiltonian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense());
    if (solver.info() != Eigen::Success)
        throw numeric_failure("diagonalize: symmetric eigensolver failed to converge (dim " +
                              std::to_string(h.dim()) + ")");
    SpectralDecomposition sd{solver.eigenvalues(), solver.eigenvectors()};
    if (!sd.energies.allFinite() || !sd.vectors.allFinite())
        throw numeric_failure("diagonalize: non-finite eigenpairs (dim " + std::to_string(h.dim()) + ")");
    return sd;
}

/// psi(t) = V exp(-i E t) V^T psi0.
inline StateVector evolve_spectral(const SpectralDecomposition& sd, const StateVector& psi0, double t)
{
    if (psi0.size() != sd.dim())
        throw std::invalid_argument("evolve_spectral: state dimension does not match spectrum");
    Eigen::VectorXcd coeff = sd.vectors.transpose().cast<cplx>() * psi0.amplitudes;
    for (Eigen::Index k = 0; k < coeff.size(); ++k)
        coeff[k] *= std::polar(1.0, -sd.energies[k] * t);
    return {sd.vectors.cast<cplx>() * coeff};
}

/// One stroboscopic step of length dt: D(dt/2) U0(dt) D(dt/2), where U0 is
/// the exact noise-free propagator and D the phase of the noise diagonal at
/// the step's amplitude.
class StroboscopicPropagator {
public:
    StroboscopicPropagator(const SpectralDecomposition& sd, double dt, std::vector<int> gradient = {})
        : dt_(dt), gradient_(std::move(gradient))
    {
        if (!(dt > 0.0))
            throw std::invalid_argument("StroboscopicPropagator: dt must be positive");
        if (!gradient_.empty() && static_cast<int>(gradient_.size()) != sd.dim())
            throw std::invalid_argument("StroboscopicPropagator: gradient length does not match spectrum");
        Eigen::VectorXcd phase(sd.dim());
        for (int k = 0; k < sd.dim(); ++k)
            phase[k] = std::polar(1.0, -sd.energies[k] * dt);
        const Eigen::MatrixXcd v = sd.vectors.cast<cplx>();
        u0_ = v * phase.asDiagonal() * v.transpose();
    }

    double dt() const noexcept { return dt_; }

    void step(Eigen::VectorXcd& psi, double eps) const
    {
        if (eps == 0.0 || gradient_.empty()) {
            psi = u0_ * psi;
            return;
        }
        const Eigen::VectorXcd half = half_step_phases(eps);
        psi = half.cwiseProduct(psi);
        psi = u0_ * psi;
        psi = half.cwiseProduct(psi);
    }

private:
    Eigen::VectorXcd half_step_phases(double eps) const
    {
        Eigen::VectorXcd half(static_cast<Eigen::Index>(gradient_.size()));
        for (std::size_t m = 0; m < gradient_.size(); ++m)
            half[static_cast<Eigen::Index>(m)] = std::polar(1.0, -2.0 * eps * gradient_[m] * dt_ / 2.0);
        return half;
    }

    double dt_;
    std::vector<int> gradient_;
    Eigen::MatrixXcd u0_;
};

struct PropagationPlan {
    double dt = std::numbers::pi / 4.0;
    std::int64_t n_steps = 0;
    std::int64_t record_stride = 1;
    std::optional<NoiseModel> noise;

    void validate() const
    {
        if (!(dt > 0.0))
            throw std::invalid_argument("PropagationPlan: dt must be positive");
        if (n_steps < 0)
            throw std::invalid_argument("PropagationPlan: n_steps must be non-negative");
        if (record_stride < 1)
            throw std::invalid_argument("PropagationPlan: record_stride must be at least 1");
    }
};

/// Runs the plan, calling `observe(step, t, psi)` at every recorded step
/// (every multiple of record_stride, starting with step 0).
template <class Observer>
void propagate(const SpectralDecomposition& sd, const PropagationPlan& plan, const StateVector& psi0,
               Observer&& observe)
{
    plan.validate();
    if (psi0.size() != sd.dim())
        throw std::invalid_argument("propagate: state dimension does not match spectrum");
    const bool noisy = plan.noise && plan.noise->active();
    if (noisy && static_cast<int>(plan.noise->gradient.size()) != sd.dim())
        throw std::invalid_argument("propagate: noise model built for a different geometry");

    const StroboscopicPropagator prop(sd, plan.dt, noisy ? plan.noise->gradient : std::vector<int>{});
    std::mt19937_64 rng(plan.noise ? plan.noise->seed : 0);
    Eigen::VectorXcd psi = psi0.amplitudes;
    for (std::int64_t k = 0;; ++k) {
        if (k % plan.record_stride == 0)
            observe(k, static_cast<double>(k) * plan.dt, static_cast<const Eigen::VectorXcd&>(psi));
        if (k == plan.n_steps)
            break;
        const double eps = noisy ? sample_noise_amplitude(*plan.noise, rng) : 0.0;
        prop.step(psi, eps);
    }
}

struct TrajectoryPoint {
    double t;
    StateVector state;
};

inline std::vector<TrajectoryPoint> evolve_stroboscopic(const Hamiltonian& h, const PropagationPlan& plan,
                                                        const StateVector& psi0)
{
    plan.validate();
    const SpectralDecomposition sd = diagonalize(h);
    std::vector<TrajectoryPoint> out;
    out.reserve(static_cast<std::size_t>(plan.n_steps / plan.record_stride + 1));
    propagate(sd, plan, psi0, [&](std::int64_t, double t, const Eigen::VectorXcd& psi) {
        out.push_back({t, StateVector{psi}});
    });
    return out;
}

struct CharacteristicTimes {
    double t_lambda; // one neighbour swap, pi / (4 lambda)
    double t_l;      // revival scale, 2 L t_lambda
    int length;      // larger bounding-box side
};

inline CharacteristicTimes characteristic_times(const BilliardGeometry& g, double lambda)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("characteristic_times: lambda must be positive");
    const double t_lambda = std::numbers::pi / (4.0 * lambda);
    const int length = std::max(g.lx(), g.ly());
    return {t_lambda, 2.0 * length * t_lambda, length};
}

} // namespace spinbill
