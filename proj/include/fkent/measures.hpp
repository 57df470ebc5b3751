#ifndef FKENT_MEASURES_HPP
#define FKENT_MEASURES_HPP

// Pairwise mode entanglement and localization of one-particle states.
//
// For psi = sum_n psi_n |n> the concurrence between sites i and j is
// C_ij = 2 |psi_i| |psi_j|. Averages run over the M = N(N-1)/2 pairs. Every
// measure depends on the moduli |psi_n| only.

#include "fkent/electron.hpp"
#include "fkent/error.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fkent
{

inline constexpr double normalization_tol = 1e-8;
inline constexpr double relation_tol = 1e-12;

struct EntanglementSummary
{
	double avg_concurrence = 0.0;
	double avg_sq_concurrence = 0.0;
	double participation_ratio = 0.0;
	std::size_t n_sites = 0;
};

namespace detail
{

inline double pair_count(std::size_t n) noexcept
{
	const double nn = static_cast<double>(n);
	return 0.5 * nn * (nn - 1.0);
}

/// Moduli rescaled to unit norm. Rejects states whose norm^2 is off by more
/// than normalization_tol.
inline std::vector<double> normalized_moduli(const WaveFunction& psi)
{
	if (psi.size() < 2)
		throw DomainError("measures: need at least two sites");
	auto m = psi.moduli();
	double s = 0.0;
	for (double a : m)
		s += a * a;
	if (!(std::abs(s - 1.0) <= normalization_tol))
		throw DomainError("measures: state not normalized (|psi|^2 = " + std::to_string(s) + ")");
	if (s != 1.0)
	{
		const double scale = 1.0 / std::sqrt(s);
		for (double& a : m)
			a *= scale;
	}
	return m;
}

inline double avg_concurrence(std::span<const double> m) noexcept
{
	double s1 = 0.0;
	for (double a : m)
		s1 += a;
	return (s1 * s1 - 1.0) / pair_count(m.size());
}

inline double participation_ratio(std::span<const double> m) noexcept
{
	double s4 = 0.0;
	for (double a : m)
		s4 += a * a * a * a;
	return 1.0 / (static_cast<double>(m.size()) * s4);
}

// 4 sum_{i<j} a_i a_j with a = |psi|^2, via 2 sum_{i<j} a_i a_j = (sum a)^2 - sum a^2.
inline double avg_sq_concurrence(std::span<const double> m) noexcept
{
	double s2 = 0.0;
	double s4 = 0.0;
	for (double a : m)
	{
		const double w = a * a;
		s2 += w;
		s4 += w * w;
	}
	return 2.0 * (s2 * s2 - s4) / pair_count(m.size());
}

} // namespace detail

/// C_ij = 2|psi_i||psi_j| for distinct 0-based sites.
inline double concurrence(const WaveFunction& psi, std::size_t i, std::size_t j)
{
	if (i == j || i >= psi.size() || j >= psi.size())
		throw DomainError("concurrence: need two distinct sites inside the ring");
	const auto m = detail::normalized_moduli(psi);
	return 2.0 * m[i] * m[j];
}

/// <C> = [(sum |psi_n|)^2 - 1] / M.
inline double average_concurrence(const WaveFunction& psi)
{
	return detail::avg_concurrence(detail::normalized_moduli(psi));
}

/// p = 1 / (N sum |psi_n|^4); 1/N for a single site, 1 for the uniform state.
inline double participation_ratio(const WaveFunction& psi)
{
	return detail::participation_ratio(detail::normalized_moduli(psi));
}

/// <C^2> = (1/M) sum_{i<j} C_ij^2, from the second and fourth moment sums
/// without assuming the normalization identity.
inline double average_squared_concurrence(const WaveFunction& psi)
{
	return detail::avg_sq_concurrence(detail::normalized_moduli(psi));
}

/// Closed form <C^2> = 4/(N(N-1)) (1 - 1/(N p)).
inline double squared_concurrence_from_participation(double p, std::size_t n)
{
	const double nn = static_cast<double>(n);
	return 4.0 / (nn * (nn - 1.0)) * (1.0 - 1.0 / (nn * p));
}

/// O(N^2) pair average of C_ij. Reference route for checking the closed form.
inline double pair_sum_average_concurrence(const WaveFunction& psi)
{
	const auto m = detail::normalized_moduli(psi);
	double s = 0.0;
	for (std::size_t i = 0; i < m.size(); ++i)
		for (std::size_t j = i + 1; j < m.size(); ++j)
			s += 2.0 * m[i] * m[j];
	return s / detail::pair_count(m.size());
}

/// O(N^2) pair average of C_ij^2.
inline double pair_sum_average_squared_concurrence(const WaveFunction& psi)
{
	const auto m = detail::normalized_moduli(psi);
	double s = 0.0;
	for (std::size_t i = 0; i < m.size(); ++i)
		for (std::size_t j = i + 1; j < m.size(); ++j)
		{
			const double c = 2.0 * m[i] * m[j];
			s += c * c;
		}
	return s / detail::pair_count(m.size());
}

/// All three measures; throws NumericError if the <C^2>-p relation fails.
inline EntanglementSummary summarize(const WaveFunction& psi)
{
	const auto m = detail::normalized_moduli(psi);
	EntanglementSummary s{detail::avg_concurrence(m), detail::avg_sq_concurrence(m), detail::participation_ratio(m),
	                      m.size()};
	const double closed = squared_concurrence_from_participation(s.participation_ratio, s.n_sites);
	if (!(std::abs(s.avg_sq_concurrence - closed) <= relation_tol))
		throw NumericError("summarize: <C^2> = " + std::to_string(s.avg_sq_concurrence) +
		                   " disagrees with participation-ratio relation " + std::to_string(closed));
	return s;
}

} // namespace fkent

#endif // FKENT_MEASURES_HPP
