#ifndef FKENT_RELAX_HPP
#define FKENT_RELAX_HPP

// Energy functional of the FK ring and its minimization by gradient descent.
//
//   U = sum_n  1/2 (x_{n+1} - x_n)^2 + (K / 2pi) (1 - cos 2pi x_n)
//
// The pinning amplitude K/2pi makes the equilibrium condition
//   x_{n+1} + x_{n-1} - 2 x_n = K sin(2pi x_n)
// the standard map with parameter 2pi K, so the golden-mean breaking of
// analyticity sits at K_c = 0.971635 / 2pi = 0.154641.

#include "fkent/chain.hpp"
#include "fkent/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace fkent
{

inline constexpr double critical_coupling = 0.154641;

namespace detail
{

inline double sin_2pi(double x) noexcept { return std::sin(2.0 * std::numbers::pi * fractional_part(x)); }

/// sin(pi s) with s reduced modulo 2 first.
inline double sin_pi(double s) noexcept
{
	const double r = s - 2.0 * std::floor(0.5 * s);
	return std::sin(std::numbers::pi * r);
}

inline double wells(const ChainGeometry& g) noexcept { return static_cast<double>(g.n_wells()); }

inline double energy(std::span<const double> x, double wells, double k) noexcept
{
	const std::size_t n = x.size();
	double spring = 0.0;
	double pinning = 0.0;
	for (std::size_t i = 0; i < n; ++i)
	{
		const double next = i + 1 < n ? x[i + 1] : x[0] + wells;
		const double d = next - x[i];
		spring += 0.5 * d * d;
		// 1 - cos(2 pi x) = 2 sin^2(pi x)
		const double s = sin_pi(x[i]);
		pinning += 2.0 * s * s;
	}
	return spring + k / (2.0 * std::numbers::pi) * pinning;
}

inline void gradient(std::span<const double> x, double wells, double k, std::span<double> g) noexcept
{
	const std::size_t n = x.size();
	for (std::size_t i = 0; i < n; ++i)
	{
		const double prev = i > 0 ? x[i - 1] : x[n - 1] - wells;
		const double next = i + 1 < n ? x[i + 1] : x[0] + wells;
		g[i] = (x[i] - prev) - (next - x[i]) + k * sin_2pi(x[i]);
	}
}

/// U(y) - U(x) evaluated term by term from the displacement, accurate to
/// rounding relative to the change itself rather than to U.
inline double energy_change(std::span<const double> x, std::span<const double> y, double wells, double k) noexcept
{
	const std::size_t n = x.size();
	double spring = 0.0;
	double pinning = 0.0;
	for (std::size_t i = 0; i < n; ++i)
	{
		const std::size_t j = i + 1 < n ? i + 1 : 0;
		const double shift = i + 1 < n ? 0.0 : wells;
		const double dx = x[j] + shift - x[i];
		const double dy = y[j] + shift - y[i];
		const double step_i = y[i] - x[i];
		const double step_j = y[j] - x[j];
		spring += 0.5 * (step_j - step_i) * (dx + dy);
		// cos(2 pi x) - cos(2 pi y) = 2 sin(pi (x + y)) sin(pi (y - x))
		pinning += 2.0 * sin_pi(x[i] + y[i]) * std::sin(std::numbers::pi * step_i);
	}
	return spring + k / (2.0 * std::numbers::pi) * pinning;
}

inline double sup_norm(std::span<const double> v) noexcept
{
	double m = 0.0;
	for (double a : v)
		m = std::max(m, std::abs(a));
	return m;
}

} // namespace detail

inline double fk_energy(const Configuration& c, double k)
{
	return detail::energy(c.positions(), detail::wells(c.geometry()), k);
}

/// dU/dx_n = 2x_n - x_{n+1} - x_{n-1} + K sin(2pi x_n), winding images at the ends.
inline std::vector<double> fk_gradient(const Configuration& c, double k)
{
	std::vector<double> g(c.size());
	detail::gradient(c.positions(), detail::wells(c.geometry()), k, g);
	return g;
}

/// Per-site equilibrium residual x_{n+1} + x_{n-1} - 2x_n - K sin(2pi x_n).
/// Equal to -fk_gradient; kept separate because it is the quantity reported
/// when checking stationarity.
inline std::vector<double> stationarity_residual(const Configuration& c, double k)
{
	std::vector<double> r(c.size());
	const auto n = static_cast<std::ptrdiff_t>(c.size());
	for (std::ptrdiff_t i = 0; i < n; ++i)
		r[static_cast<std::size_t>(i)] =
		    c.image(i + 1) + c.image(i - 1) - 2.0 * c[static_cast<std::size_t>(i)] -
		    k * detail::sin_2pi(c[static_cast<std::size_t>(i)]);
	return r;
}

struct StepPolicy
{
	double initial = 0.05;
	double grow = 1.1;
	double shrink = 0.5;
	double min_step = 1e-18;
};

struct RelaxOptions
{
	double grad_tol = 1e-12;
	std::size_t max_iters = 10'000'000;
	StepPolicy step;
	/// Called after every accepted step with (accepted-step count, positions).
	std::function<void(std::size_t, std::span<const double>)> observer;
};

struct RelaxReport
{
	Configuration config;
	double final_energy = 0.0;
	double final_grad_norm = 0.0;
	std::size_t iterations = 0;
};

/// Relaxation gave up; carries the last accepted iterate and the coupling.
class ConvergenceError : public NumericError
{
public:
	ConvergenceError(const std::string& what, RelaxReport last, double coupling)
		: NumericError(what), last_(std::move(last)), coupling_(coupling)
	{
	}

	const RelaxReport& last_iterate() const noexcept { return last_; }
	double coupling() const noexcept { return coupling_; }

private:
	RelaxReport last_;
	double coupling_;
};

/// Adaptive-step gradient descent from `start` to a stationary point of U.
///
/// A trial step x - eta * grad is accepted when it keeps the ring ordered and
/// does not raise the energy; eta then grows by `step.grow`. Otherwise eta
/// shrinks by `step.shrink` and the step is retried. Throws ConvergenceError
/// when `max_iters` trial steps pass without reaching `grad_tol`.
inline RelaxReport relax(const ChainGeometry& g, double k, const RelaxOptions& opts, const Configuration& start)
{
	if (!(k >= 0.0))
		throw DomainError("relax: coupling K must be >= 0");
	if (!(opts.grad_tol > 0.0) || opts.max_iters == 0)
		throw DomainError("relax: grad_tol and max_iters must be positive");
	if (!(start.geometry() == g))
		throw DomainError("relax: start configuration has a different geometry");

	const double wells = detail::wells(g);
	const std::size_t n = g.n_sites();

	if (k == 0.0)
	{
		// Gradient flow of the pure spring energy conserves the centre of mass
		// and ends at equal spacing.
		auto ref = initial_configuration(g);
		const auto xs = start.positions();
		double shift = 0.0;
		for (std::size_t i = 0; i < n; ++i)
			shift += xs[i] - ref[i];
		shift /= static_cast<double>(n);
		std::vector<double> x(n);
		for (std::size_t i = 0; i < n; ++i)
			x[i] = ref[i] + shift;
		// Reuse the start verbatim when it already is that fixed point.
		const bool same = std::equal(x.begin(), x.end(), xs.begin(),
		                             [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)); });
		Configuration c = same ? start : Configuration(g, std::move(x));
		std::vector<double> grad(n);
		detail::gradient(c.positions(), wells, 0.0, grad);
		return RelaxReport{c, fk_energy(c, 0.0), detail::sup_norm(grad), 0};
	}

	std::vector<double> x(start.positions().begin(), start.positions().end());
	std::vector<double> trial(n);
	std::vector<double> grad(n);
	detail::gradient(x, wells, k, grad);
	double grad_norm = detail::sup_norm(grad);
	double eta = opts.step.initial;
	std::size_t accepted = 0;
	std::size_t attempts = 0;

	auto report = [&] {
		return RelaxReport{Configuration(g, x), detail::energy(x, wells, k), grad_norm, accepted};
	};

	while (grad_norm > opts.grad_tol)
	{
		if (attempts++ >= opts.max_iters)
			throw ConvergenceError("relax: no convergence within " + std::to_string(opts.max_iters) +
			                           " steps (|grad| = " + std::to_string(grad_norm) + ")",
			                       report(), k);
		for (std::size_t i = 0; i < n; ++i)
			trial[i] = x[i] - eta * grad[i];

		double delta = 1.0;
		if (Configuration::is_ordered(g, trial))
			delta = detail::energy_change(x, trial, wells, k);

		if (delta <= 0.0)
		{
			x.swap(trial);
			detail::gradient(x, wells, k, grad);
			grad_norm = detail::sup_norm(grad);
			eta *= opts.step.grow;
			++accepted;
			if (opts.observer)
				opts.observer(accepted, x);
		}
		else
		{
			eta *= opts.step.shrink;
			if (eta < opts.step.min_step)
				throw ConvergenceError("relax: step size underflow at |grad| = " + std::to_string(grad_norm), report(), k);
		}
	}
	return report();
}

/// Relaxes along an increasing K grid, seeding each point with the previous
/// result; the first point starts from equal spacing.
inline std::vector<RelaxReport> continuation_relax(const ChainGeometry& g, std::span<const double> k_grid,
                                                   const RelaxOptions& opts)
{
	for (std::size_t i = 1; i < k_grid.size(); ++i)
		if (!(k_grid[i] > k_grid[i - 1]))
			throw DomainError("continuation_relax: K grid must be strictly increasing");

	std::vector<RelaxReport> out;
	out.reserve(k_grid.size());
	Configuration seed = initial_configuration(g);
	for (double k : k_grid)
	{
		out.push_back(relax(g, k, opts, seed));
		seed = out.back().config;
	}
	return out;
}

/// Largest cyclic gap between sorted fractional parts of the positions.
/// About 1/N on an invariant circle; opens up to O(1) on a cantorus.
inline double hull_gap(const Configuration& c)
{
	std::vector<double> f(c.size());
	for (std::size_t i = 0; i < c.size(); ++i)
		f[i] = fractional_part(c[i]);
	std::sort(f.begin(), f.end());
	double gap = f.front() + 1.0 - f.back();
	for (std::size_t i = 1; i < f.size(); ++i)
		gap = std::max(gap, f[i] - f[i - 1]);
	return gap;
}

} // namespace fkent

#endif // FKENT_RELAX_HPP
