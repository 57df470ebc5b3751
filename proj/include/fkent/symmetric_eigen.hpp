#ifndef FKENT_SYMMETRIC_EIGEN_HPP
#define FKENT_SYMMETRIC_EIGEN_HPP

// Dense real symmetric eigendecomposition.
//
// Householder reduction to tridiagonal form followed by the implicit-shift QL
// iteration, both accumulating the orthogonal transformation. This follows
// the EISPACK tred2/tql2 pair (Bowdler, Martin, Reinsch, Wilkinson).

#include "fkent/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace fkent
{

/// Row-major dense square matrix of doubles.
class DenseMatrix
{
public:
	DenseMatrix() = default;
	explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

	std::size_t rows() const noexcept { return n_; }
	std::size_t cols() const noexcept { return n_; }

	double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * n_ + j]; }
	double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }

	std::span<const double> row(std::size_t i) const noexcept { return {a_.data() + i * n_, n_}; }

	bool is_symmetric() const noexcept
	{
		for (std::size_t i = 0; i < n_; ++i)
			for (std::size_t j = i + 1; j < n_; ++j)
				if ((*this)(i, j) != (*this)(j, i))
					return false;
		return true;
	}

	friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
	std::size_t n_ = 0;
	std::vector<double> a_;
};

/// Eigenvalues ascending; column k of `vectors` is the unit eigenvector of values[k].
struct SymmetricEigen
{
	std::vector<double> values;
	DenseMatrix vectors;

	std::vector<double> vector(std::size_t k) const
	{
		std::vector<double> v(vectors.rows());
		for (std::size_t i = 0; i < v.size(); ++i)
			v[i] = vectors(i, k);
		return v;
	}
};

namespace detail
{

// Householder tridiagonalization. On return d holds the diagonal, e[1..n-1]
// the subdiagonal (e[0] = 0) and v the accumulated transformation.
inline void tridiagonalize(DenseMatrix& v, std::vector<double>& d, std::vector<double>& e)
{
	const std::size_t n = v.rows();
	for (std::size_t j = 0; j < n; ++j)
		d[j] = v(n - 1, j);

	for (std::size_t i = n - 1; i > 0; --i)
	{
		double scale = 0.0;
		double h = 0.0;
		for (std::size_t k = 0; k < i; ++k)
			scale += std::abs(d[k]);

		if (scale == 0.0)
		{
			e[i] = d[i - 1];
			for (std::size_t j = 0; j < i; ++j)
			{
				d[j] = v(i - 1, j);
				v(i, j) = 0.0;
				v(j, i) = 0.0;
			}
		}
		else
		{
			for (std::size_t k = 0; k < i; ++k)
			{
				d[k] /= scale;
				h += d[k] * d[k];
			}
			double f = d[i - 1];
			double g = std::sqrt(h);
			if (f > 0.0)
				g = -g;
			e[i] = scale * g;
			h -= f * g;
			d[i - 1] = f - g;
			for (std::size_t j = 0; j < i; ++j)
				e[j] = 0.0;

			for (std::size_t j = 0; j < i; ++j)
			{
				f = d[j];
				v(j, i) = f;
				g = e[j] + v(j, j) * f;
				for (std::size_t k = j + 1; k <= i - 1; ++k)
				{
					g += v(k, j) * d[k];
					e[k] += v(k, j) * f;
				}
				e[j] = g;
			}
			f = 0.0;
			for (std::size_t j = 0; j < i; ++j)
			{
				e[j] /= h;
				f += e[j] * d[j];
			}
			const double hh = f / (h + h);
			for (std::size_t j = 0; j < i; ++j)
				e[j] -= hh * d[j];
			for (std::size_t j = 0; j < i; ++j)
			{
				f = d[j];
				g = e[j];
				for (std::size_t k = j; k <= i - 1; ++k)
					v(k, j) -= (f * e[k] + g * d[k]);
				d[j] = v(i - 1, j);
				v(i, j) = 0.0;
			}
		}
		d[i] = h;
	}

	for (std::size_t i = 0; i + 1 < n; ++i)
	{
		v(n - 1, i) = v(i, i);
		v(i, i) = 1.0;
		const double h = d[i + 1];
		if (h != 0.0)
		{
			for (std::size_t k = 0; k <= i; ++k)
				d[k] = v(k, i + 1) / h;
			for (std::size_t j = 0; j <= i; ++j)
			{
				double g = 0.0;
				for (std::size_t k = 0; k <= i; ++k)
					g += v(k, i + 1) * v(k, j);
				for (std::size_t k = 0; k <= i; ++k)
					v(k, j) -= g * d[k];
			}
		}
		for (std::size_t k = 0; k <= i; ++k)
			v(k, i + 1) = 0.0;
	}
	for (std::size_t j = 0; j < n; ++j)
	{
		d[j] = v(n - 1, j);
		v(n - 1, j) = 0.0;
	}
	v(n - 1, n - 1) = 1.0;
	e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e), rotating the columns of v.
inline void tridiagonal_ql(DenseMatrix& v, std::vector<double>& d, std::vector<double>& e, std::size_t max_sweeps)
{
	const std::size_t n = v.rows();
	for (std::size_t i = 1; i < n; ++i)
		e[i - 1] = e[i];
	e[n - 1] = 0.0;

	double f = 0.0;
	double tst1 = 0.0;
	constexpr double eps = std::numeric_limits<double>::epsilon();

	for (std::size_t l = 0; l < n; ++l)
	{
		tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
		std::size_t m = l;
		while (m < n)
		{
			if (std::abs(e[m]) <= eps * tst1)
				break;
			++m;
		}

		if (m > l)
		{
			std::size_t sweeps = 0;
			do
			{
				if (++sweeps > max_sweeps)
					throw NumericError("symmetric_eigen: QL iteration did not converge for eigenvalue " +
					                   std::to_string(l) + " (|e| = " + std::to_string(std::abs(e[l])) + ")");

				double g = d[l];
				double p = (d[l + 1] - g) / (2.0 * e[l]);
				double r = std::hypot(p, 1.0);
				if (p < 0)
					r = -r;
				d[l] = e[l] / (p + r);
				d[l + 1] = e[l] * (p + r);
				const double dl1 = d[l + 1];
				double h = g - d[l];
				for (std::size_t i = l + 2; i < n; ++i)
					d[i] -= h;
				f += h;

				p = d[m];
				double c = 1.0, c2 = 1.0, c3 = 1.0;
				const double el1 = e[l + 1];
				double s = 0.0, s2 = 0.0;
				for (std::size_t ii = m; ii-- > l;)
				{
					c3 = c2;
					c2 = c;
					s2 = s;
					g = c * e[ii];
					h = c * p;
					r = std::hypot(p, e[ii]);
					e[ii + 1] = s * r;
					s = e[ii] / r;
					c = p / r;
					p = c * d[ii] - s * g;
					d[ii + 1] = h + s * (c * g + s * d[ii]);
					for (std::size_t k = 0; k < n; ++k)
					{
						h = v(k, ii + 1);
						v(k, ii + 1) = s * v(k, ii) + c * h;
						v(k, ii) = c * v(k, ii) - s * h;
					}
				}
				p = -s * s2 * c3 * el1 * e[l] / dl1;
				e[l] = s * p;
				d[l] = c * p;
			} while (std::abs(e[l]) > eps * tst1);
		}
		d[l] += f;
		e[l] = 0.0;
	}
}

} // namespace detail

/// Full spectrum and eigenvectors of a symmetric matrix, eigenvalues ascending.
inline SymmetricEigen symmetric_eigen(const DenseMatrix& a)
{
	const std::size_t n = a.rows();
	if (n == 0)
		throw DomainError("symmetric_eigen: empty matrix");
	if (!a.is_symmetric())
		throw DomainError("symmetric_eigen: matrix is not symmetric");

	DenseMatrix v = a;
	std::vector<double> d(n), e(n);
	if (n == 1)
		return SymmetricEigen{{a(0, 0)}, [] { DenseMatrix one(1); one(0, 0) = 1.0; return one; }()};

	detail::tridiagonalize(v, d, e);
	detail::tridiagonal_ql(v, d, e, 60);

	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

	SymmetricEigen out{std::vector<double>(n), DenseMatrix(n)};
	for (std::size_t k = 0; k < n; ++k)
	{
		out.values[k] = d[order[k]];
		for (std::size_t i = 0; i < n; ++i)
			out.vectors(i, k) = v(i, order[k]);
	}
	return out;
}

} // namespace fkent

#endif // FKENT_SYMMETRIC_EIGEN_HPP
