#ifndef FKENT_DYNAMICS_HPP
#define FKENT_DYNAMICS_HPP

// Real-time evolution i dpsi/dt = H psi (hbar = t = 1) by classical RK4.

#include "fkent/electron.hpp"
#include "fkent/error.hpp"
#include "fkent/measures.hpp"
#include "fkent/symmetric_eigen.hpp"

#include <cmath>
#include <cstdio>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fkent
{

inline constexpr double norm_drift_tol = 1e-8;
/// Largest dt * spectral-radius bound accepted by evolve().
inline constexpr double rk4_stability_margin = 2.5;

/// dpsi/dt = -i H psi on the ring with hopping 1.
inline std::vector<Complex> rhs(const WaveFunction& psi, const OnSitePotential& v)
{
	const std::size_t n = psi.size();
	if (v.size() != n)
		throw DomainError("rhs: potential has " + std::to_string(v.size()) + " sites, state has " + std::to_string(n));
	std::vector<Complex> out(n);
	const Complex minus_i(0.0, -1.0);
	for (std::size_t i = 0; i < n; ++i)
	{
		const std::size_t next = i + 1 < n ? i + 1 : 0;
		const std::size_t prev = i > 0 ? i - 1 : n - 1;
		out[i] = minus_i * (-(psi[next] + psi[prev]) + v[i] * psi[i]);
	}
	return out;
}

struct EvolutionSpec
{
	double dt = 0.01;
	std::size_t n_steps = 0;
	std::size_t record_every = 1;
	WaveFunction initial;
	/// Keep |psi_n| at every record.
	bool keep_snapshots = false;
};

struct TrajectoryPoint
{
	double time = 0.0;
	double avg_concurrence = 0.0;
	double participation_ratio = 0.0;
	double norm = 0.0; // |psi|^2
	std::vector<double> moduli;
};

struct Trajectory
{
	std::vector<TrajectoryPoint> points;
	WaveFunction final_state;
	double final_time = 0.0;
};

/// Integration stopped because |psi|^2 left 1 +- norm_drift_tol. Carries the
/// records made up to that point.
class NormDriftError : public NumericError
{
public:
	NormDriftError(const std::string& what, Trajectory partial) : NumericError(what), partial_(std::move(partial)) {}
	const Trajectory& partial() const noexcept { return partial_; }

private:
	Trajectory partial_;
};

namespace detail
{

// Applies -i (H - shift) psi into out.
inline void shifted_rhs(std::span<const Complex> psi, std::span<const double> v, double shift, std::span<Complex> out) noexcept
{
	const std::size_t n = psi.size();
	for (std::size_t i = 0; i < n; ++i)
	{
		const std::size_t next = i + 1 < n ? i + 1 : 0;
		const std::size_t prev = i > 0 ? i - 1 : n - 1;
		const Complex h = -(psi[next] + psi[prev]) + (v[i] - shift) * psi[i];
		out[i] = Complex(h.imag(), -h.real());
	}
}

} // namespace detail

/// RK4 evolution of spec.initial under the ring Hamiltonian with potential v.
///
/// The integrator propagates phi = exp(i c t) psi with c the midpoint of the
/// potential's range, which only changes the global phase; the recorded
/// measures and the returned final state are for psi itself. No
/// renormalization is applied. A record is taken at t = 0 and every
/// `record_every` steps, plus the last step.
inline Trajectory evolve(const EvolutionSpec& spec, const OnSitePotential& v)
{
	const std::size_t n = spec.initial.size();
	if (v.size() != n)
		throw DomainError("evolve: potential and initial state differ in size");
	if (n < 3)
		throw DomainError("evolve: need N >= 3");
	if (!(spec.dt > 0.0) || spec.record_every == 0)
		throw DomainError("evolve: dt and record_every must be positive");
	if (std::abs(spec.initial.norm_squared() - 1.0) > norm_drift_tol)
		throw DomainError("evolve: initial state is not normalized");

	const double shift = 0.5 * (v.max() + v.min());
	const double radius = 2.0 * FkParams::hopping + 0.5 * (v.max() - v.min());
	if (spec.dt * radius > rk4_stability_margin)
		throw DomainError("evolve: dt * spectral radius = " + std::to_string(spec.dt * radius) + " exceeds " +
		                  std::to_string(rk4_stability_margin));

	std::vector<Complex> phi(spec.initial.amplitudes().begin(), spec.initial.amplitudes().end());
	std::vector<Complex> k1(n), k2(n), k3(n), k4(n), tmp(n);
	const double dt = spec.dt;

	Trajectory traj;
	auto physical = [&](double time) {
		const Complex phase = std::polar(1.0, -shift * time);
		std::vector<Complex> psi(phi);
		for (auto& a : psi)
			a *= phase;
		return WaveFunction(std::move(psi));
	};
	auto record = [&](double time, double norm) {
		WaveFunction w(phi);
		const auto m = detail::normalized_moduli(w);
		TrajectoryPoint pt{time, detail::avg_concurrence(m), detail::participation_ratio(m), norm, {}};
		if (spec.keep_snapshots)
			pt.moduli = w.moduli();
		traj.points.push_back(std::move(pt));
	};

	record(0.0, spec.initial.norm_squared());
	double time = 0.0;
	for (std::size_t step = 1; step <= spec.n_steps; ++step)
	{
		detail::shifted_rhs(phi, v.values, shift, k1);
		for (std::size_t i = 0; i < n; ++i)
			tmp[i] = phi[i] + 0.5 * dt * k1[i];
		detail::shifted_rhs(tmp, v.values, shift, k2);
		for (std::size_t i = 0; i < n; ++i)
			tmp[i] = phi[i] + 0.5 * dt * k2[i];
		detail::shifted_rhs(tmp, v.values, shift, k3);
		for (std::size_t i = 0; i < n; ++i)
			tmp[i] = phi[i] + dt * k3[i];
		detail::shifted_rhs(tmp, v.values, shift, k4);
		double norm = 0.0;
		for (std::size_t i = 0; i < n; ++i)
		{
			phi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
			norm += std::norm(phi[i]);
		}
		time = static_cast<double>(step) * dt;

		if (!(std::abs(norm - 1.0) <= norm_drift_tol))
		{
			traj.final_state = physical(time);
			traj.final_time = time;
			char msg[128];
			std::snprintf(msg, sizeof msg, "evolve: |psi|^2 - 1 = %.3e at t = %.2f; reduce dt", norm - 1.0, time);
			throw NormDriftError(msg, std::move(traj));
		}
		if (step % spec.record_every == 0 || step == spec.n_steps)
			record(time, norm);
	}
	traj.final_state = physical(time);
	traj.final_time = time;
	return traj;
}

/// Propagation by expansion in the eigenbasis of H; exact up to the
/// eigensolver's rounding. Used to cross-check RK4 at nonzero potential.
class ExactPropagator
{
public:
	explicit ExactPropagator(const HamiltonianMatrix& h) : eig_(symmetric_eigen(h.dense())) {}

	WaveFunction state_at(const WaveFunction& initial, double time) const
	{
		const std::size_t n = eig_.values.size();
		if (initial.size() != n)
			throw DomainError("ExactPropagator: state size mismatch");
		std::vector<Complex> coeff(n, 0.0);
		for (std::size_t k = 0; k < n; ++k)
		{
			Complex c = 0.0;
			for (std::size_t i = 0; i < n; ++i)
				c += eig_.vectors(i, k) * initial[i];
			coeff[k] = c * std::polar(1.0, -eig_.values[k] * time);
		}
		std::vector<Complex> psi(n, 0.0);
		for (std::size_t i = 0; i < n; ++i)
			for (std::size_t k = 0; k < n; ++k)
				psi[i] += eig_.vectors(i, k) * coeff[k];
		return WaveFunction(std::move(psi));
	}

	std::span<const double> energies() const noexcept { return eig_.values; }

private:
	SymmetricEigen eig_;
};

} // namespace fkent

#endif // FKENT_DYNAMICS_HPP
