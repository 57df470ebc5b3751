#ifndef FKENT_FKENT_HPP
#define FKENT_FKENT_HPP

#include "fkent/chain.hpp"
#include "fkent/dynamics.hpp"
#include "fkent/electron.hpp"
#include "fkent/error.hpp"
#include "fkent/experiments.hpp"
#include "fkent/measures.hpp"
#include "fkent/relax.hpp"
#include "fkent/symmetric_eigen.hpp"

#endif // FKENT_FKENT_HPP
