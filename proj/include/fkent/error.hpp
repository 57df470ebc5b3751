#ifndef FKENT_ERROR_HPP
#define FKENT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fkent
{

/// Precondition violated by the caller (bad index, empty grid, N too small).
class DomainError : public std::domain_error
{
public:
	using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its target (eigensolver, integrator).
class NumericError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

} // namespace fkent

#endif // FKENT_ERROR_HPP
