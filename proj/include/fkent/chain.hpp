#ifndef FKENT_CHAIN_HPP
#define FKENT_CHAIN_HPP

// Fibonacci ring geometry and atomic configurations of the FK chain.
//
// A chain of N = F_m atoms is wrapped around L = F_{m-1} periods of the
// substrate potential. Positions are absolute (units of the potential period)
// and the ring closes with a winding: x_{n+N} = x_n + L.

#include "fkent/error.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fkent
{

inline constexpr int max_fibonacci_index = 40;

/// F_m with F_1 = F_2 = 1.
inline std::uint64_t fibonacci(int m)
{
	if (m < 1 || m > max_fibonacci_index)
		throw DomainError("fibonacci: index " + std::to_string(m) + " outside [1, 40]");
	std::uint64_t a = 1, b = 1;
	for (int i = 2; i < m; ++i)
		a = std::exchange(b, a + b);
	return b;
}

/// Index m with F_m == n and m >= 2, or 0 if n is not a Fibonacci number.
inline int fibonacci_index(std::uint64_t n)
{
	for (int m = 2; m <= max_fibonacci_index; ++m)
	{
		const std::uint64_t f = fibonacci(m);
		if (f == n)
			return m;
		if (f > n)
			break;
	}
	return 0;
}

/// Golden-mean approximant ring: N = F_m sites over L = F_{m-1} wells.
class ChainGeometry
{
public:
	explicit ChainGeometry(int m)
	{
		if (m < 4 || m > max_fibonacci_index)
			throw DomainError("geometry: index " + std::to_string(m) + " outside [4, 40] (need N >= 3)");
		m_ = m;
		n_ = static_cast<std::size_t>(fibonacci(m));
		l_ = static_cast<std::size_t>(fibonacci(m - 1));
	}

	int index() const noexcept { return m_; }
	std::size_t n_sites() const noexcept { return n_; }
	std::size_t n_wells() const noexcept { return l_; }
	/// sigma = N/L; with this choice sigma * x_n is an integer at equal spacing.
	double sigma() const noexcept { return static_cast<double>(n_) / static_cast<double>(l_); }
	/// Mean atomic spacing L/N.
	double spacing() const noexcept { return static_cast<double>(l_) / static_cast<double>(n_); }

	friend bool operator==(const ChainGeometry&, const ChainGeometry&) = default;

private:
	int m_ = 0;
	std::size_t n_ = 0;
	std::size_t l_ = 0;
};

inline ChainGeometry geometry(int m) { return ChainGeometry(m); }

/// Model couplings. Hopping is fixed at 1 and every energy is in its units.
struct FkParams
{
	double coupling = 0.0; // K
	double lambda = 0.0;   // on-site amplitude
	static constexpr double hopping = 1.0;
};

/// Ordered positions x_1..x_N on a ring of circumference L.
class Configuration
{
public:
	Configuration(ChainGeometry g, std::vector<double> positions)
		: geometry_(g), x_(std::move(positions))
	{
		if (x_.size() != geometry_.n_sites())
			throw DomainError("configuration: expected " + std::to_string(geometry_.n_sites()) +
			                  " positions, got " + std::to_string(x_.size()));
		if (!is_ordered(geometry_, x_))
			throw DomainError("configuration: positions must be strictly increasing across the winding");
	}

	const ChainGeometry& geometry() const noexcept { return geometry_; }
	std::size_t size() const noexcept { return x_.size(); }
	std::span<const double> positions() const noexcept { return x_; }
	double operator[](std::size_t i) const noexcept { return x_[i]; }

	/// Position with winding images for any integer site offset (0-based).
	double image(std::ptrdiff_t i) const noexcept
	{
		const auto n = static_cast<std::ptrdiff_t>(x_.size());
		std::ptrdiff_t wrap = i >= 0 ? i / n : -((-i + n - 1) / n);
		return x_[static_cast<std::size_t>(i - wrap * n)] +
		       static_cast<double>(wrap) * static_cast<double>(geometry_.n_wells());
	}

	/// Strict ordering including the closing bond x_N < x_1 + L.
	static bool is_ordered(const ChainGeometry& g, std::span<const double> x) noexcept
	{
		if (x.empty())
			return false;
		for (std::size_t i = 0; i + 1 < x.size(); ++i)
			if (!(x[i + 1] > x[i]))
				return false;
		return x.front() + static_cast<double>(g.n_wells()) > x.back();
	}

private:
	ChainGeometry geometry_;
	std::vector<double> x_;
};

/// Equal spacing x_n = n L / N, the exact minimizer at K = 0.
inline Configuration initial_configuration(const ChainGeometry& g)
{
	std::vector<double> x(g.n_sites());
	const double l = static_cast<double>(g.n_wells());
	const double n = static_cast<double>(g.n_sites());
	for (std::size_t i = 0; i < x.size(); ++i)
		x[i] = static_cast<double>(i + 1) * l / n;
	return Configuration(g, std::move(x));
}

/// x - floor(x); exact in floating point.
inline double fractional_part(double x) noexcept { return x - std::floor(x); }

} // namespace fkent

#endif // FKENT_CHAIN_HPP
