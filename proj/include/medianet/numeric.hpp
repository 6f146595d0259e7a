/*!
  \file numeric.hpp
  \brief Exact integer and rational arithmetic used by the analysis code.

  Counting results are exact arbitrary-precision integers and all
  probabilities are kept as exact rationals until presentation time.
*/

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <random>
#include <stdexcept>

namespace medianet
{

using big_int = boost::multiprecision::cpp_int;
using big_rat = boost::multiprecision::cpp_rational;

//! The one RNG type used across the library; all randomness is seeded.
using rng_engine = std::mt19937_64;

/*! \brief Binomial coefficient C(n, r) as an exact integer. */
inline big_int binomial( unsigned n, unsigned r )
{
  if ( r > n )
    return 0;
  if ( r > n - r )
    r = n - r;
  big_int result = 1;
  for ( unsigned i = 1; i <= r; ++i )
  {
    result *= n - r + i;
    result /= i;
  }
  return result;
}

inline double to_double( const big_rat& value )
{
  return static_cast<double>( value );
}

} // namespace medianet
