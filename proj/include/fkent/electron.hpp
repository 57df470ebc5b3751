#ifndef FKENT_ELECTRON_HPP
#define FKENT_ELECTRON_HPP

// One electron hopping on the relaxed FK ring:
//
//   (H psi)_n = -t (psi_{n+1} + psi_{n-1}) + V_n psi_n,   V_n = lambda cos(2pi sigma x_n)
//
// with periodic indices.

#include "fkent/chain.hpp"
#include "fkent/error.hpp"
#include "fkent/symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace fkent
{

using Complex = std::complex<double>;

struct OnSitePotential
{
	std::vector<double> values;

	std::size_t size() const noexcept { return values.size(); }
	double operator[](std::size_t i) const noexcept { return values[i]; }
	double max() const { return *std::max_element(values.begin(), values.end()); }
	double min() const { return *std::min_element(values.begin(), values.end()); }
};

/// Single-particle amplitudes psi_1..psi_N in the site basis.
class WaveFunction
{
public:
	WaveFunction() = default;
	explicit WaveFunction(std::vector<Complex> amplitudes) : psi_(std::move(amplitudes)) {}

	static WaveFunction from_real(std::span<const double> amplitudes)
	{
		return WaveFunction(std::vector<Complex>(amplitudes.begin(), amplitudes.end()));
	}

	/// |site> (0-based site index).
	static WaveFunction basis(std::size_t n, std::size_t site)
	{
		if (site >= n)
			throw DomainError("basis state: site " + std::to_string(site) + " outside ring of " + std::to_string(n));
		std::vector<Complex> a(n, 0.0);
		a[site] = 1.0;
		return WaveFunction(std::move(a));
	}

	/// Equal-weight W state.
	static WaveFunction uniform(std::size_t n)
	{
		return WaveFunction(std::vector<Complex>(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0)));
	}

	std::size_t size() const noexcept { return psi_.size(); }
	const Complex& operator[](std::size_t i) const noexcept { return psi_[i]; }
	std::span<const Complex> amplitudes() const noexcept { return psi_; }

	double norm_squared() const noexcept
	{
		double s = 0.0;
		for (const auto& a : psi_)
			s += std::norm(a);
		return s;
	}

	std::vector<double> moduli() const
	{
		std::vector<double> m(psi_.size());
		for (std::size_t i = 0; i < m.size(); ++i)
			m[i] = std::abs(psi_[i]);
		return m;
	}

private:
	std::vector<Complex> psi_;
};

/// Tight-binding ring Hamiltonian, stored dense.
class HamiltonianMatrix
{
public:
	HamiltonianMatrix(const OnSitePotential& v, double hopping) : hopping_(hopping), potential_(v)
	{
		const std::size_t n = v.size();
		if (n < 3)
			throw DomainError("hamiltonian: need N >= 3 sites for a periodic ring, got " + std::to_string(n));
		m_ = DenseMatrix(n);
		for (std::size_t i = 0; i < n; ++i)
		{
			m_(i, i) = v[i];
			const std::size_t j = (i + 1) % n;
			m_(i, j) = -hopping;
			m_(j, i) = -hopping;
		}
	}

	std::size_t size() const noexcept { return m_.rows(); }
	double hopping() const noexcept { return hopping_; }
	const OnSitePotential& potential() const noexcept { return potential_; }
	const DenseMatrix& dense() const noexcept { return m_; }
	double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }

	/// H psi using the ring stencil.
	std::vector<Complex> apply(std::span<const Complex> psi) const
	{
		const std::size_t n = size();
		std::vector<Complex> out(n);
		for (std::size_t i = 0; i < n; ++i)
		{
			const std::size_t next = i + 1 < n ? i + 1 : 0;
			const std::size_t prev = i > 0 ? i - 1 : n - 1;
			out[i] = -hopping_ * (psi[next] + psi[prev]) + potential_[i] * psi[i];
		}
		return out;
	}

	/// <psi|H|psi>, real for Hermitian H.
	double expectation(const WaveFunction& psi) const
	{
		const auto h = apply(psi.amplitudes());
		Complex s = 0.0;
		for (std::size_t i = 0; i < size(); ++i)
			s += std::conj(psi[i]) * h[i];
		return s.real();
	}

private:
	double hopping_;
	OnSitePotential potential_;
	DenseMatrix m_;
};

/// V_n = lambda cos(2pi sigma x_n), sigma = N/L of the configuration's ring.
inline OnSitePotential potential(const Configuration& c, double lambda)
{
	const double sigma = c.geometry().sigma();
	OnSitePotential v{std::vector<double>(c.size())};
	for (std::size_t i = 0; i < c.size(); ++i)
		v.values[i] = lambda * std::cos(2.0 * std::numbers::pi * fractional_part(sigma * c[i]));
	return v;
}

inline HamiltonianMatrix hamiltonian(const OnSitePotential& v, double hopping = FkParams::hopping)
{
	return HamiltonianMatrix(v, hopping);
}

inline constexpr double degeneracy_threshold = 1e-12;
inline constexpr double eigen_residual_tol = 1e-10;

struct GroundState
{
	double energy = 0.0;
	WaveFunction psi;
	/// Lowest two levels closer than degeneracy_threshold; psi chosen by tie-break.
	bool degenerate = false;
	double residual = 0.0;
};

/// All eigenvalues, ascending.
inline std::vector<double> spectrum(const HamiltonianMatrix& h) { return symmetric_eigen(h.dense()).values; }

namespace detail
{

inline std::size_t argmax_abs(std::span<const double> v) noexcept
{
	std::size_t best = 0;
	for (std::size_t i = 1; i < v.size(); ++i)
		if (std::abs(v[i]) > std::abs(v[best]))
			best = i;
	return best;
}

/// Rotates the columns in `vs` (an orthonormal basis of one degenerate
/// level) towards maximal localization, i.e. largest sum of psi^4.
/// Pairwise Jacobi sweeps: for columns a, b the optimal angle is
/// arg(sum (a + ib)^4) / 4.
inline void localize(std::vector<std::vector<double>>& vs)
{
	for (int sweep = 0; sweep < 100; ++sweep)
	{
		double largest = 0.0;
		for (std::size_t i = 0; i < vs.size(); ++i)
			for (std::size_t j = i + 1; j < vs.size(); ++j)
			{
				auto& a = vs[i];
				auto& b = vs[j];
				std::complex<double> z = 0.0;
				for (std::size_t n = 0; n < a.size(); ++n)
				{
					const std::complex<double> w(a[n], b[n]);
					z += (w * w) * (w * w);
				}
				const double theta = 0.25 * std::arg(z);
				const double c = std::cos(theta), s = std::sin(theta);
				for (std::size_t n = 0; n < a.size(); ++n)
				{
					const double x = a[n], y = b[n];
					a[n] = c * x + s * y;
					b[n] = -s * x + c * y;
				}
				largest = std::max(largest, std::abs(theta));
			}
		if (largest < 1e-14)
			break;
	}
}

} // namespace detail

/// Lowest eigenpair. The eigenvector is real, unit norm, with its
/// largest-magnitude component positive.
///
/// When the lowest level is degenerate the eigenvectors are an arbitrary
/// basis of it. They are first rotated to the most localized basis; then the
/// vector whose peak sits at the smallest site index wins and `degenerate`
/// is set.
inline GroundState ground_state(const HamiltonianMatrix& h)
{
	const auto eig = symmetric_eigen(h.dense());
	const std::size_t n = h.size();

	std::size_t cluster = 1;
	while (cluster < n && eig.values[cluster] - eig.values[0] < degeneracy_threshold)
		++cluster;
	const bool degenerate = cluster > 1;

	std::vector<double> vec;
	if (degenerate)
	{
		std::vector<std::vector<double>> vs;
		for (std::size_t k = 0; k < cluster; ++k)
			vs.push_back(eig.vector(k));
		detail::localize(vs);
		std::size_t pick = 0;
		for (std::size_t k = 1; k < cluster; ++k)
			if (detail::argmax_abs(vs[k]) < detail::argmax_abs(vs[pick]))
				pick = k;
		vec = std::move(vs[pick]);
	}
	else
		vec = eig.vector(0);

	double norm = 0.0;
	for (double a : vec)
		norm += a * a;
	norm = std::sqrt(norm);
	const double sign = vec[detail::argmax_abs(vec)] < 0.0 ? -1.0 : 1.0;
	for (double& a : vec)
		a *= sign / norm;

	GroundState gs{eig.values[0], WaveFunction::from_real(vec), degenerate, 0.0};
	if (degenerate)
		gs.energy = h.expectation(gs.psi);
	const auto hpsi = h.apply(gs.psi.amplitudes());
	double r2 = 0.0;
	for (std::size_t i = 0; i < n; ++i)
		r2 += std::norm(hpsi[i] - gs.energy * gs.psi[i]);
	gs.residual = std::sqrt(r2);
	if (!(gs.residual <= eigen_residual_tol))
		throw NumericError("ground_state: eigen-residual " + std::to_string(gs.residual) + " exceeds tolerance (N = " +
		                   std::to_string(n) + ", E0 = " + std::to_string(gs.energy) + ")");
	return gs;
}

} // namespace fkent

#endif // FKENT_ELECTRON_HPP
