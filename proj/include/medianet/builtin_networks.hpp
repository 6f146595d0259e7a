/*!
  \file builtin_networks.hpp
  \brief Size-minimal published median networks and median-of-medians composition.

  The comparator sequences below are the classic minimal selection networks
  (3 CAS for n=3, 7 for n=5, 13 for n=7, 19 for n=9, 99 for n=25) in wire
  shorthand.  None of them is trusted as copied: the test suite certifies
  each one against the exact-median predicate before anything else uses it.
*/

#pragma once

#include "network.hpp"

#include <string_view>

namespace medianet
{

namespace detail
{

inline constexpr std::string_view median3_text = R"(# exact 3-input median, 3 CAS
n 3
swap 0 1
swap 1 2
swap 0 1
out 1
)";

inline constexpr std::string_view median5_text = R"(# exact 5-input median, 7 CAS (minimal)
n 5
swap 0 1
swap 2 3
swap 0 2
swap 1 3
swap 1 2
swap 1 4
swap 2 4
out 2
)";

inline constexpr std::string_view median7_text = R"(# exact 7-input median, 13 CAS
n 7
swap 0 5
swap 0 3
swap 1 6
swap 2 4
swap 0 1
swap 3 5
swap 2 6
swap 2 3
swap 3 6
swap 4 5
swap 1 4
swap 1 3
swap 3 4
out 3
)";

inline constexpr std::string_view median9_text = R"(# exact 9-input median, 19 CAS
n 9
swap 1 2
swap 4 5
swap 7 8
swap 0 1
swap 3 4
swap 6 7
swap 1 2
swap 4 5
swap 7 8
swap 0 3
swap 5 8
swap 4 7
swap 3 6
swap 1 4
swap 2 5
swap 4 7
swap 4 2
swap 6 4
swap 4 2
out 4
)";

inline constexpr std::string_view median25_text = R"(# exact 25-input median, 99 CAS
n 25
swap 0 1
swap 3 4
swap 2 4
swap 2 3
swap 6 7
swap 5 7
swap 5 6
swap 9 10
swap 8 10
swap 8 9
swap 12 13
swap 11 13
swap 11 12
swap 15 16
swap 14 16
swap 14 15
swap 18 19
swap 17 19
swap 17 18
swap 21 22
swap 20 22
swap 20 21
swap 23 24
swap 2 5
swap 3 6
swap 0 6
swap 0 3
swap 4 7
swap 1 7
swap 1 4
swap 11 14
swap 8 14
swap 8 11
swap 12 15
swap 9 15
swap 9 12
swap 13 16
swap 10 16
swap 10 13
swap 20 23
swap 17 23
swap 17 20
swap 21 24
swap 18 24
swap 18 21
swap 19 22
swap 9 18
swap 0 18
swap 8 17
swap 0 9
swap 10 19
swap 1 19
swap 1 10
swap 11 20
swap 2 20
swap 12 21
swap 2 11
swap 3 21
swap 3 12
swap 13 22
swap 4 22
swap 4 13
swap 14 23
swap 5 23
swap 5 14
swap 15 24
swap 6 24
swap 6 15
swap 7 16
swap 7 19
swap 13 21
swap 15 23
swap 7 13
swap 7 15
swap 1 9
swap 3 11
swap 5 17
swap 11 17
swap 9 17
swap 4 10
swap 6 12
swap 7 14
swap 4 6
swap 4 7
swap 12 14
swap 10 14
swap 6 7
swap 10 12
swap 6 10
swap 6 17
swap 12 17
swap 7 17
swap 7 10
swap 12 18
swap 7 12
swap 10 18
swap 12 20
swap 10 20
swap 10 12
out 12
)";

} // namespace detail

/*! \brief Text of a shipped minimal median network (n in {3, 5, 7, 9, 25}). */
inline std::string_view builtin_median_text( unsigned n )
{
  switch ( n )
  {
  case 3:
    return detail::median3_text;
  case 5:
    return detail::median5_text;
  case 7:
    return detail::median7_text;
  case 9:
    return detail::median9_text;
  case 25:
    return detail::median25_text;
  default:
    throw std::invalid_argument( "builtin_median_text: no built-in network for n=" + std::to_string( n ) );
  }
}

inline network builtin_median( unsigned n )
{
  return parse_network( builtin_median_text( n ) );
}

/*! \brief Median-of-medians network: group medians followed by a median of
 *         the group results (n=9: 3x3-median groups, 12 CAS; n=25: 5x5-median
 *         groups, 42 CAS).
 */
inline network gen_mom( unsigned n )
{
  unsigned group = 0;
  switch ( n )
  {
  case 9:
    group = 3;
    break;
  case 25:
    group = 5;
    break;
  default:
    throw std::invalid_argument( "gen_mom: supported input counts are 9 and 25" );
  }

  const auto sub = builtin_median( group );
  network net( n );
  std::vector<signal_id> group_medians;
  for ( unsigned g = 0; g < group; ++g )
  {
    std::vector<signal_id> ins( group );
    std::iota( ins.begin(), ins.end(), g * group );
    group_medians.push_back( append_network( net, sub, ins )[0] );
  }
  net.set_outputs( { append_network( net, sub, group_medians )[0] } );
  return net;
}

} // namespace medianet
