/*!
  \file analysis.hpp
  \brief Exact rank-error analysis of single-output comparison networks.

  A single-output CAS network over an odd number of inputs is a selection
  circuit: it always returns one of its inputs.  Restricting the inputs to
  0/1 turns every CAS into an (AND, OR) pair, and the rank behaviour of the
  network is fully determined by how the Boolean version acts on each
  population level of the input cube.  The analysis builds decision
  diagrams for the network together with a certified sorting network used
  as a ones counter, and derives the miss counts per rank distance with
  exact model counting.  Two independent brute-force oracles (bit-parallel
  0/1 enumeration and full permutation enumeration) are provided for
  cross-checking; they must agree exactly.
*/

#pragma once

#include "bdd.hpp"
#include "network.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace medianet
{

/*! \brief Exact rank-error profile of a single-output network.
 *
 * `a_left[i]` counts the input assignments with exactly m-1+i ones on
 * which the network wrongly returns 0; `a_right[i]` counts assignments
 * with exactly m-i ones on which it wrongly returns 1 (index 0 holds the
 * correct cases).  `hist` is the distribution of the returned element's
 * rank distance from the median, ordered from distance -(m-1) on the low
 * side to +(m-1) on the high side; entry m-1 is the probability of an
 * exact hit.
 */
struct error_profile
{
  unsigned n = 0;                 //!< input count (odd)
  unsigned m = 0;                 //!< median rank, (n+1)/2
  std::size_t k = 0;              //!< CAS count of the analyzed network
  std::vector<big_int> a_left;    //!< miss counts below the median, size m
  std::vector<big_int> a_right;   //!< miss counts above the median, size m
  std::vector<big_rat> hist;      //!< rank-distance distribution, size n
  unsigned d_left = 0;            //!< worst-case distance below
  unsigned d_right = 0;           //!< worst-case distance above
  big_rat h0;                     //!< probability of returning the median
  big_rat q;                      //!< quality: sum of j^2-weighted histogram

  bool exact() const { return d_left == 0 && d_right == 0; }
};

namespace detail
{

inline void require_analyzable( const network& net )
{
  if ( !net.single_output() )
    throw std::invalid_argument( "analysis: network must have a single output" );
  if ( net.num_inputs() % 2 == 0 )
    throw std::invalid_argument( "analysis: input count must be odd" );
}

/*! \brief Builds the BDD of every signal; returns one ref per signal id. */
inline std::vector<bdd_ref> build_signal_bdds( const network& net, bdd_manager& mgr )
{
  std::vector<bdd_ref> sig( net.num_signals() );
  for ( unsigned i = 0; i < net.num_inputs(); ++i )
    sig[i] = mgr.var( i + 1 );
  std::size_t next = net.num_inputs();
  for ( const auto& op : net.ops() )
  {
    sig[next++] = mgr.apply_and( sig[op.in_a], sig[op.in_b] );
    sig[next++] = mgr.apply_or( sig[op.in_a], sig[op.in_b] );
  }
  return sig;
}

} // namespace detail

/*! \brief True iff the sorter's k-th smallest output equals the k-th
 *         threshold function for every k: a formal certificate over all
 *         2^n inputs via canonical-handle comparison.
 */
inline bool is_exact_sorter( const network& sorter )
{
  const unsigned n = sorter.num_inputs();
  if ( sorter.outputs().size() != n )
    return false;
  bdd_manager mgr( n );
  const auto sig = detail::build_signal_bdds( sorter, mgr );
  for ( unsigned j = 1; j <= n; ++j )
  {
    if ( sig[sorter.outputs()[j - 1]] != mgr.threshold( n - j + 1 ) )
      return false;
  }
  return true;
}

/*! \brief The analyzed network, a sorter acting as ones counter, and the
 *         derived per-distance output functions, all in one manager.
 */
struct virtual_circuit
{
  bdd_manager mgr;
  unsigned n = 0;
  unsigned m = 0;
  bdd_ref net_out = bdd_manager::false_ref;   //!< Boolean function of the network
  std::vector<bdd_ref> sorted;                //!< sorter outputs, ascending
  std::vector<bdd_ref> level_exact;           //!< E_c: exactly c ones, c = 0..n
  std::vector<bdd_ref> q_left;                //!< misses at distance i below, i = 0..m-1
  std::vector<bdd_ref> q_right;               //!< misses at distance i above, i = 0..m-1

  virtual_circuit( unsigned num_vars )
      : mgr( num_vars ), n( num_vars )
  {
  }
};

/*! \brief Assembles the analysis circuit for M with the given sorter.
 *
 * The sorter is certified against the threshold functions inside the
 * shared manager before use; a non-sorting network is rejected.
 */
inline virtual_circuit build_virtual_circuit( const network& M, const network& sorter )
{
  detail::require_analyzable( M );
  if ( sorter.num_inputs() != M.num_inputs() )
    throw std::invalid_argument( "build_virtual_circuit: sorter arity mismatch" );
  if ( sorter.outputs().size() != sorter.num_inputs() )
    throw std::invalid_argument( "build_virtual_circuit: sorter must expose all outputs" );

  const unsigned n = M.num_inputs();
  virtual_circuit vc( n );
  vc.m = ( n + 1 ) / 2;

  const auto sorter_sig = detail::build_signal_bdds( sorter, vc.mgr );
  vc.sorted.resize( n );
  for ( unsigned j = 1; j <= n; ++j )
  {
    vc.sorted[j - 1] = sorter_sig[sorter.outputs()[j - 1]];
    if ( vc.sorted[j - 1] != vc.mgr.threshold( n - j + 1 ) )
      throw std::invalid_argument( "build_virtual_circuit: sorter failed certification" );
  }

  const auto net_sig = detail::build_signal_bdds( M, vc.mgr );
  vc.net_out = net_sig[M.outputs()[0]];

  // E_c = y_{n-c+1} AND NOT y_{n-c} with y_0 == false, y_{n+1} == true
  auto y = [&]( unsigned j ) -> bdd_ref {
    if ( j == 0 )
      return bdd_manager::false_ref;
    if ( j == n + 1 )
      return bdd_manager::true_ref;
    return vc.sorted[j - 1];
  };
  vc.level_exact.resize( n + 1 );
  for ( unsigned c = 0; c <= n; ++c )
    vc.level_exact[c] = vc.mgr.apply_and( y( n - c + 1 ), vc.mgr.apply_not( y( n - c ) ) );

  const auto not_out = vc.mgr.apply_not( vc.net_out );
  vc.q_left.resize( vc.m );
  vc.q_right.resize( vc.m );
  for ( unsigned i = 0; i < vc.m; ++i )
  {
    vc.q_right[i] = vc.mgr.apply_and( vc.net_out, vc.level_exact[vc.m - i] );
    vc.q_left[i] = vc.mgr.apply_and( not_out, vc.level_exact[vc.m - 1 + i] );
  }
  return vc;
}

/*! \brief Exact miss counts (a_left, a_right) of M via model counting. */
inline std::pair<std::vector<big_int>, std::vector<big_int>>
error_counts( const network& M )
{
  auto vc = build_virtual_circuit( M, gen_batcher_sorter( M.num_inputs() ) );
  std::vector<big_int> a_left( vc.m ), a_right( vc.m );
  for ( unsigned i = 0; i < vc.m; ++i )
  {
    a_left[i] = vc.mgr.satcount( vc.q_left[i] );
    a_right[i] = vc.mgr.satcount( vc.q_right[i] );
  }
  return { std::move( a_left ), std::move( a_right ) };
}

/*! \brief Rank-distance distribution from the miss counts, exact rationals.
 *
 * Entry ordering matches error_profile::hist.  The left/right estimates of
 * the central probability must coincide; a mismatch indicates corrupted
 * counts and raises logic_error.
 */
inline std::vector<big_rat> histogram( const std::vector<big_int>& a_left,
                                       const std::vector<big_int>& a_right, unsigned n )
{
  const unsigned m = ( n + 1 ) / 2;
  if ( a_left.size() != m || a_right.size() != m )
    throw std::invalid_argument( "histogram: expected m counts per side" );

  auto h_right = [&]( unsigned i ) {
    big_rat h( a_right[i], binomial( n, m - i ) );
    if ( i < m - 1 )
      h -= big_rat( a_right[i + 1], binomial( n, m - i - 1 ) );
    return h;
  };
  auto h_left = [&]( unsigned i ) {
    big_rat h( a_left[i], binomial( n, m - 1 + i ) );
    if ( i < m - 1 )
      h -= big_rat( a_left[i + 1], binomial( n, m + i ) );
    return h;
  };

  if ( h_left( 0 ) != h_right( 0 ) )
    throw std::logic_error( "histogram: central probability mismatch (corrupt counts)" );

  std::vector<big_rat> hist( n );
  hist[m - 1] = h_right( 0 );
  for ( unsigned i = 1; i < m; ++i )
  {
    hist[m - 1 - i] = h_left( i );
    hist[m - 1 + i] = h_right( i );
  }
  return hist;
}

/*! \brief Worst-case rank distances: largest i >= 1 with a nonzero miss count. */
inline std::pair<unsigned, unsigned> worst_case( const std::vector<big_int>& a_left,
                                                 const std::vector<big_int>& a_right )
{
  unsigned d_left = 0, d_right = 0;
  for ( unsigned i = 1; i < a_left.size(); ++i )
  {
    if ( a_left[i] != 0 )
      d_left = i;
  }
  for ( unsigned i = 1; i < a_right.size(); ++i )
  {
    if ( a_right[i] != 0 )
      d_right = i;
  }
  return { d_left, d_right };
}

/*! \brief Quality metric: squared rank distance weighted by the histogram. */
inline big_rat quality( const std::vector<big_rat>& hist, unsigned m )
{
  if ( hist.size() != 2 * static_cast<std::size_t>( m ) - 1 )
    throw std::invalid_argument( "quality: histogram length mismatch" );
  big_rat q = 0;
  for ( int j = -static_cast<int>( m ) + 1; j <= static_cast<int>( m ) - 1; ++j )
    q += big_rat( j * j ) * hist[static_cast<std::size_t>( m - 1 + j )];
  return q;
}

namespace detail
{

inline error_profile profile_from_counts( unsigned n, std::size_t k,
                                          std::vector<big_int> a_left,
                                          std::vector<big_int> a_right )
{
  error_profile p;
  p.n = n;
  p.m = ( n + 1 ) / 2;
  p.k = k;
  p.hist = histogram( a_left, a_right, n );
  std::tie( p.d_left, p.d_right ) = worst_case( a_left, a_right );
  p.h0 = p.hist[p.m - 1];
  p.q = quality( p.hist, p.m );
  p.a_left = std::move( a_left );
  p.a_right = std::move( a_right );
  return p;
}

} // namespace detail

/*! \brief Full exact analysis of a single-output network (fresh manager). */
inline error_profile analyze( const network& M )
{
  auto [a_left, a_right] = error_counts( M );
  return detail::profile_from_counts( M.num_inputs(), prune( M ).num_cas(),
                                      std::move( a_left ), std::move( a_right ) );
}

/*! \brief True iff M computes the exact median, decided by comparing its
 *         canonical diagram with the majority threshold function.
 */
inline bool is_exact_median( const network& M )
{
  detail::require_analyzable( M );
  bdd_manager mgr( M.num_inputs() );
  const auto sig = detail::build_signal_bdds( M, mgr );
  return sig[M.outputs()[0]] == mgr.threshold( ( M.num_inputs() + 1 ) / 2 );
}

/*! \brief Reference implementation of the miss counts by enumerating all
 *         2^n Boolean vectors (bit-parallel, 64 lanes at a time).
 */
inline std::pair<std::vector<big_int>, std::vector<big_int>>
binary_oracle( const network& M )
{
  detail::require_analyzable( M );
  const unsigned n = M.num_inputs();
  if ( n > 30 )
    throw std::invalid_argument( "binary_oracle: refusing n > 30 (2^n enumeration)" );
  const unsigned m = ( n + 1 ) / 2;

  // zeros_at_level[c] counts vectors of population c on which M returns 0
  std::vector<std::uint64_t> zeros_at_level( n + 1, 0 ), ones_at_level( n + 1, 0 );

  const std::uint64_t total = std::uint64_t( 1 ) << n;
  std::vector<std::uint64_t> lanes( n );
  std::array<unsigned, 64> lane_pop{};
  for ( unsigned l = 0; l < 64; ++l )
    lane_pop[l] = static_cast<unsigned>( std::popcount( static_cast<std::uint64_t>( l ) ) );

  for ( std::uint64_t base = 0; base < total; base += 64 )
  {
    for ( unsigned i = 0; i < n; ++i )
    {
      if ( i < 6 )
      {
        // bit i of the lane index, as a 64-lane pattern
        static constexpr std::uint64_t pattern[6] = {
          0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
          0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull
        };
        lanes[i] = pattern[i];
      }
      else
      {
        lanes[i] = ( ( base >> i ) & 1 ) ? ~std::uint64_t( 0 ) : 0;
      }
    }
    const auto out = evaluate_bitsliced( M, lanes )[0];
    const unsigned base_pop = static_cast<unsigned>( std::popcount( base ) );
    const unsigned valid = static_cast<unsigned>( std::min<std::uint64_t>( 64, total - base ) );
    for ( unsigned l = 0; l < valid; ++l )
    {
      const unsigned level = base_pop + lane_pop[l];
      if ( ( out >> l ) & 1 )
        ++ones_at_level[level];
      else
        ++zeros_at_level[level];
    }
  }

  std::vector<big_int> a_left( m ), a_right( m );
  for ( unsigned i = 0; i < m; ++i )
  {
    a_left[i] = zeros_at_level[m - 1 + i];
    a_right[i] = ones_at_level[m - i];
  }
  return { std::move( a_left ), std::move( a_right ) };
}

/*! \brief Same full profile as analyze() but with oracle counts. */
inline error_profile binary_oracle_profile( const network& M )
{
  auto [a_left, a_right] = binary_oracle( M );
  return detail::profile_from_counts( M.num_inputs(), prune( M ).num_cas(),
                                      std::move( a_left ), std::move( a_right ) );
}

/*! \brief Rank-distance distribution by evaluating all n! permutations of
 *         (1..n); must equal histogram() exactly.
 */
inline std::vector<big_rat> perm_oracle( const network& M )
{
  detail::require_analyzable( M );
  const unsigned n = M.num_inputs();
  if ( n > 10 )
    throw std::invalid_argument( "perm_oracle: refusing n > 10 (n! enumeration)" );

  std::vector<int> values( n );
  std::iota( values.begin(), values.end(), 1 );
  std::vector<std::uint64_t> rank_count( n + 1, 0 );
  std::uint64_t total = 0;
  std::vector<int> scratch;
  do
  {
    const int v = M.evaluate_single( std::span<const int>( values ), scratch );
    ++rank_count[static_cast<unsigned>( v )];   // value equals its rank here
    ++total;
  } while ( std::next_permutation( values.begin(), values.end() ) );

  std::vector<big_rat> hist( n );
  for ( unsigned r = 1; r <= n; ++r )
    hist[r - 1] = big_rat( rank_count[r], total );
  return hist;
}

} // namespace medianet
