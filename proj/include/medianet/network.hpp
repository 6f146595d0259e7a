/*!
  \file network.hpp
  \brief Feed-forward compare-and-swap network representation.

  A network over n primary inputs is an ordered list of CAS elements.
  Signal ids 0..n-1 name the primary inputs; CAS number k defines two new
  signals, n+2k for its min output and n+2k+1 for its max output.  Every
  CAS input must reference a signal defined earlier, so the structure is a
  feed-forward DAG by construction.
*/

#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace medianet
{

using signal_id = std::uint32_t;

/*! \brief One compare-and-swap element; inputs are order-insensitive. */
struct cas_op
{
  signal_id in_a;
  signal_id in_b;

  auto operator<=>( const cas_op& ) const = default;
};

/*! \brief Error raised while reading a network file; carries the line number. */
class parse_error : public std::runtime_error
{
public:
  parse_error( unsigned line, const std::string& what )
      : std::runtime_error( "line " + std::to_string( line ) + ": " + what ),
        line_( line )
  {
  }

  unsigned line() const { return line_; }

private:
  unsigned line_;
};

class network
{
public:
  explicit network( unsigned num_inputs )
      : num_inputs_( num_inputs )
  {
    if ( num_inputs == 0 )
      throw std::invalid_argument( "network: input count must be positive" );
  }

  unsigned num_inputs() const { return num_inputs_; }
  std::size_t num_cas() const { return ops_.size(); }
  std::size_t num_signals() const { return num_inputs_ + 2 * ops_.size(); }

  std::span<const cas_op> ops() const { return ops_; }
  std::span<const signal_id> outputs() const { return outputs_; }

  signal_id min_signal( std::size_t k ) const { return static_cast<signal_id>( num_inputs_ + 2 * k ); }
  signal_id max_signal( std::size_t k ) const { return static_cast<signal_id>( num_inputs_ + 2 * k + 1 ); }

  /*! \brief True for signals produced by a CAS (as opposed to primary inputs). */
  bool is_cas_output( signal_id s ) const { return s >= num_inputs_; }

  /*! \brief Index of the CAS producing signal s. */
  std::size_t producer( signal_id s ) const { return ( s - num_inputs_ ) / 2; }

  bool single_output() const { return outputs_.size() == 1; }

  /*! \brief Appends a CAS reading a and b; returns its (min, max) signal ids. */
  std::pair<signal_id, signal_id> add_cas( signal_id a, signal_id b )
  {
    const auto defined = num_signals();
    if ( a >= defined || b >= defined )
      throw std::invalid_argument( "add_cas: undefined signal reference" );
    ops_.push_back( { a, b } );
    return { min_signal( ops_.size() - 1 ), max_signal( ops_.size() - 1 ) };
  }

  void set_outputs( std::vector<signal_id> outs )
  {
    for ( auto s : outs )
    {
      if ( s >= num_signals() )
        throw std::invalid_argument( "set_outputs: undefined signal " + std::to_string( s ) );
    }
    outputs_ = std::move( outs );
  }

  /*! \brief Evaluates the network on totally ordered values; returns the output values. */
  template<typename T>
  std::vector<T> evaluate( std::span<const T> inputs ) const
  {
    std::vector<T> signals;
    evaluate_signals( inputs, signals );
    std::vector<T> result;
    result.reserve( outputs_.size() );
    for ( auto s : outputs_ )
      result.push_back( signals[s] );
    return result;
  }

  template<typename T>
  std::vector<T> evaluate( std::initializer_list<T> inputs ) const
  {
    return evaluate( std::span<const T>( inputs.begin(), inputs.size() ) );
  }

  /*! \brief Single-output evaluation reusing a caller-provided scratch buffer. */
  template<typename T>
  T evaluate_single( std::span<const T> inputs, std::vector<T>& scratch ) const
  {
    if ( outputs_.size() != 1 )
      throw std::invalid_argument( "evaluate_single: network is not single-output" );
    evaluate_signals( inputs, scratch );
    return scratch[outputs_[0]];
  }

  /*! \brief Fills `signals` with the value of every signal (inputs first). */
  template<typename T>
  void evaluate_signals( std::span<const T> inputs, std::vector<T>& signals ) const
  {
    if ( inputs.size() != num_inputs_ )
      throw std::invalid_argument( "evaluate: expected " + std::to_string( num_inputs_ ) +
                                   " inputs, got " + std::to_string( inputs.size() ) );
    signals.resize( num_signals() );
    std::copy( inputs.begin(), inputs.end(), signals.begin() );
    std::size_t next = num_inputs_;
    for ( const auto& op : ops_ )
    {
      const T a = signals[op.in_a];
      const T b = signals[op.in_b];
      signals[next++] = std::min( a, b );
      signals[next++] = std::max( a, b );
    }
  }

  auto operator<=>( const network& ) const = default;

private:
  unsigned num_inputs_;
  std::vector<cas_op> ops_;
  std::vector<signal_id> outputs_;
};

/*! \brief Boolean evaluation of 64 input vectors at once (one bit lane each).
 *
 * On 0/1 inputs a CAS degenerates to an (AND, OR) gate pair, so a whole
 * word of lanes is processed with two bitwise operations per element.
 */
inline std::vector<std::uint64_t> evaluate_bitsliced( const network& net,
                                                      std::span<const std::uint64_t> lane_inputs )
{
  if ( lane_inputs.size() != net.num_inputs() )
    throw std::invalid_argument( "evaluate_bitsliced: arity mismatch" );
  std::vector<std::uint64_t> signals( net.num_signals() );
  std::copy( lane_inputs.begin(), lane_inputs.end(), signals.begin() );
  std::size_t next = net.num_inputs();
  for ( const auto& op : net.ops() )
  {
    const auto a = signals[op.in_a];
    const auto b = signals[op.in_b];
    signals[next++] = a & b;
    signals[next++] = a | b;
  }
  std::vector<std::uint64_t> result;
  result.reserve( net.outputs().size() );
  for ( auto s : net.outputs() )
    result.push_back( signals[s] );
  return result;
}

namespace detail
{

inline std::vector<std::string_view> split_tokens( std::string_view line )
{
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while ( pos < line.size() )
  {
    while ( pos < line.size() && ( line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r' ) )
      ++pos;
    if ( pos >= line.size() || line[pos] == '#' )
      break;
    std::size_t end = pos;
    while ( end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r' && line[end] != '#' )
      ++end;
    tokens.push_back( line.substr( pos, end - pos ) );
    pos = end;
  }
  return tokens;
}

inline bool parse_uint( std::string_view token, std::uint64_t& value )
{
  auto [ptr, ec] = std::from_chars( token.data(), token.data() + token.size(), value );
  return ec == std::errc{} && ptr == token.data() + token.size();
}

} // namespace detail

/*! \brief Reads a network from its text format.
 *
 * Format: `n <N>` first, then `cas <a> <b>` lines with signal ids, one
 * `out <s>...` line.  `#` starts a comment.  As a shorthand, `swap <i> <j>`
 * lines use wire indices 0..n-1 (min is written to wire i); in swap form
 * `out` names wires and defaults to all wires in order.  The two op forms
 * cannot be mixed.
 */
inline network parse_network( std::string_view text )
{
  std::optional<network> net;
  std::vector<signal_id> wire;              // swap form: current signal of each wire
  bool swap_form = false, cas_form = false;
  bool have_out = false;
  std::vector<signal_id> outs;

  unsigned line_no = 0;
  std::size_t pos = 0;
  while ( pos <= text.size() )
  {
    const auto eol = text.find( '\n', pos );
    const auto line = text.substr( pos, eol == std::string_view::npos ? text.size() - pos : eol - pos );
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const auto tok = detail::split_tokens( line );
    if ( tok.empty() )
      continue;

    if ( tok[0] == "n" )
    {
      if ( net )
        throw parse_error( line_no, "duplicate input-count declaration" );
      std::uint64_t n = 0;
      if ( tok.size() != 2 || !detail::parse_uint( tok[1], n ) || n == 0 )
        throw parse_error( line_no, "malformed input count (want `n <positive integer>`)" );
      net.emplace( static_cast<unsigned>( n ) );
      wire.resize( n );
      std::iota( wire.begin(), wire.end(), 0u );
      continue;
    }

    if ( !net )
      throw parse_error( line_no, "input count must be declared before `" + std::string( tok[0] ) + "`" );
    if ( have_out )
      throw parse_error( line_no, "no directives allowed after `out`" );

    if ( tok[0] == "cas" || tok[0] == "swap" )
    {
      std::uint64_t a = 0, b = 0;
      if ( tok.size() != 3 || !detail::parse_uint( tok[1], a ) || !detail::parse_uint( tok[2], b ) )
        throw parse_error( line_no, "malformed " + std::string( tok[0] ) + " line" );
      if ( tok[0] == "cas" )
      {
        if ( swap_form )
          throw parse_error( line_no, "cannot mix `cas` and `swap` lines" );
        cas_form = true;
        if ( a >= net->num_signals() )
          throw parse_error( line_no, "undefined signal " + std::to_string( a ) );
        if ( b >= net->num_signals() )
          throw parse_error( line_no, "undefined signal " + std::to_string( b ) );
        net->add_cas( static_cast<signal_id>( a ), static_cast<signal_id>( b ) );
      }
      else
      {
        if ( cas_form )
          throw parse_error( line_no, "cannot mix `cas` and `swap` lines" );
        swap_form = true;
        if ( a >= wire.size() || b >= wire.size() )
          throw parse_error( line_no, "wire index out of range" );
        if ( a == b )
          throw parse_error( line_no, "swap needs two distinct wires" );
        const auto [mn, mx] = net->add_cas( wire[a], wire[b] );
        wire[a] = mn;   // min lands on the first listed wire
        wire[b] = mx;
      }
      continue;
    }

    if ( tok[0] == "out" )
    {
      if ( tok.size() < 2 )
        throw parse_error( line_no, "empty output list" );
      for ( std::size_t i = 1; i < tok.size(); ++i )
      {
        std::uint64_t s = 0;
        if ( !detail::parse_uint( tok[i], s ) )
          throw parse_error( line_no, "malformed output list" );
        if ( swap_form )
        {
          if ( s >= wire.size() )
            throw parse_error( line_no, "wire index out of range" );
          outs.push_back( wire[s] );
        }
        else
        {
          if ( s >= net->num_signals() )
            throw parse_error( line_no, "undefined signal " + std::to_string( s ) );
          outs.push_back( static_cast<signal_id>( s ) );
        }
      }
      have_out = true;
      continue;
    }

    throw parse_error( line_no, "unknown directive `" + std::string( tok[0] ) + "`" );
  }

  if ( !net )
    throw parse_error( line_no, "missing input count declaration" );
  if ( !have_out )
  {
    if ( !swap_form )
      throw parse_error( line_no, "missing output declaration" );
    outs = wire;   // swap form: final wire state is the implicit output list
  }
  net->set_outputs( std::move( outs ) );
  return *std::move( net );
}

/*! \brief Writes the signal-DAG text form; parse_network round-trips it. */
inline std::string serialize_network( const network& net )
{
  std::string text = "n " + std::to_string( net.num_inputs() );
  for ( const auto& op : net.ops() )
  {
    text += "\ncas " + std::to_string( op.in_a ) + " " + std::to_string( op.in_b );
  }
  text += "\nout";
  for ( auto s : net.outputs() )
    text += " " + std::to_string( s );
  return text;
}

/*! \brief Removes every CAS with no consumed path to an output.
 *
 * A kept CAS consumes both of its input signals, so the structural cone
 * is traced backwards over inputs of kept elements.  Signal ids are
 * renumbered; evaluation at the outputs is unchanged.
 */
inline network prune( const network& net )
{
  const auto k = net.num_cas();
  std::vector<bool> consumed( net.num_signals(), false );
  for ( auto s : net.outputs() )
    consumed[s] = true;

  std::vector<bool> keep( k, false );
  for ( std::size_t i = k; i-- > 0; )
  {
    if ( consumed[net.min_signal( i )] || consumed[net.max_signal( i )] )
    {
      keep[i] = true;
      consumed[net.ops()[i].in_a] = true;
      consumed[net.ops()[i].in_b] = true;
    }
  }

  network result( net.num_inputs() );
  std::vector<signal_id> remap( net.num_signals() );
  std::iota( remap.begin(), remap.begin() + net.num_inputs(), 0u );
  for ( std::size_t i = 0; i < k; ++i )
  {
    if ( !keep[i] )
      continue;
    const auto [mn, mx] = result.add_cas( remap[net.ops()[i].in_a], remap[net.ops()[i].in_b] );
    remap[net.min_signal( i )] = mn;
    remap[net.max_signal( i )] = mx;
  }
  std::vector<signal_id> outs;
  outs.reserve( net.outputs().size() );
  for ( auto s : net.outputs() )
    outs.push_back( remap[s] );
  result.set_outputs( std::move( outs ) );
  return result;
}

/*! \brief Copies `sub` into `dst`, wiring sub's inputs to `input_map`.
 *
 * Returns the dst signal ids corresponding to sub's outputs.
 */
inline std::vector<signal_id> append_network( network& dst, const network& sub,
                                              std::span<const signal_id> input_map )
{
  if ( input_map.size() != sub.num_inputs() )
    throw std::invalid_argument( "append_network: input map arity mismatch" );
  std::vector<signal_id> remap( sub.num_signals() );
  std::copy( input_map.begin(), input_map.end(), remap.begin() );
  for ( std::size_t i = 0; i < sub.num_cas(); ++i )
  {
    const auto [mn, mx] = dst.add_cas( remap[sub.ops()[i].in_a], remap[sub.ops()[i].in_b] );
    remap[sub.min_signal( i )] = mn;
    remap[sub.max_signal( i )] = mx;
  }
  std::vector<signal_id> outs;
  outs.reserve( sub.outputs().size() );
  for ( auto s : sub.outputs() )
    outs.push_back( remap[s] );
  return outs;
}

namespace detail
{

inline void oddeven_merge( unsigned lo, unsigned len, unsigned r,
                           std::vector<std::pair<unsigned, unsigned>>& cs )
{
  const unsigned step = r * 2;
  if ( step < len )
  {
    oddeven_merge( lo, len, step, cs );
    oddeven_merge( lo + r, len, step, cs );
    for ( unsigned i = lo + r; i + r < lo + len; i += step )
      cs.emplace_back( i, i + r );
  }
  else
  {
    cs.emplace_back( lo, lo + r );
  }
}

inline void oddeven_sort( unsigned lo, unsigned len,
                          std::vector<std::pair<unsigned, unsigned>>& cs )
{
  if ( len <= 1 )
    return;
  const unsigned mid = len / 2;
  oddeven_sort( lo, mid, cs );
  oddeven_sort( lo + mid, mid, cs );
  oddeven_merge( lo, len, 1, cs );
}

} // namespace detail

/*! \brief Batcher odd-even mergesort network; outputs are sorted ascending.
 *
 * The power-of-two construction is generated and comparators touching a
 * padded index are dropped.  Padding wires would carry plus infinity and
 * always sit on the max side, so dropping those comparators is exact.
 */
inline network gen_batcher_sorter( unsigned n )
{
  if ( n == 0 )
    throw std::invalid_argument( "gen_batcher_sorter: n must be positive" );
  network net( n );
  std::vector<signal_id> wire( n );
  std::iota( wire.begin(), wire.end(), 0u );
  if ( n > 1 )
  {
    std::vector<std::pair<unsigned, unsigned>> cs;
    detail::oddeven_sort( 0, std::bit_ceil( n ), cs );
    for ( auto [i, j] : cs )
    {
      if ( j >= n )
        continue;
      const auto [mn, mx] = net.add_cas( wire[i], wire[j] );
      wire[i] = mn;
      wire[j] = mx;
    }
  }
  net.set_outputs( { wire.begin(), wire.end() } );
  return net;
}

/*! \brief Exact n-input median network obtained by pruning a Batcher sorter
 *         to the cone of its middle output.  Correct but not size-minimal.
 */
inline network gen_exact_median( unsigned n )
{
  if ( n % 2 == 0 )
    throw std::invalid_argument( "gen_exact_median: n must be odd" );
  auto sorter = gen_batcher_sorter( n );
  const unsigned m = ( n + 1 ) / 2;
  sorter.set_outputs( { sorter.outputs()[m - 1] } );
  return prune( sorter );
}

} // namespace medianet
