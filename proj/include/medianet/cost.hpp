/*!
  \file cost.hpp
  \brief Pipelined hardware cost estimation for comparison networks.

  A CAS maps to one magnitude comparator plus one multiplexer per consumed
  output.  The network is scheduled ASAP with one CAS level per pipeline
  stage, and a register is charged for every stage boundary a live signal
  crosses.  Estimated area:

      C = A_mx * (2*n_A + n_P) + A_cmp * (n_A + n_P) + A_reg * n_R

  where n_A counts active CAS with both outputs consumed and n_P those
  with exactly one.  Primary inputs and the final output are not
  registered; n_R covers internal pipeline balance only.
*/

#pragma once

#include "network.hpp"

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace medianet
{

/*! \brief Cell areas of the target technology, in arbitrary area units.
 *
 * The defaults are placeholders for an 8-bit datapath; real cell areas
 * are technology-specific and should be loaded from a config file.
 */
struct tech_config
{
  double a_mux = 18.0;
  double a_cmp = 40.0;
  double a_reg = 22.0;
  unsigned width = 8;
};

/*! \brief Parses `key=value` lines: a_mx, a_cmp, a_reg, width. */
inline tech_config parse_tech_config( std::string_view text )
{
  tech_config tech;
  unsigned line_no = 0;
  std::size_t pos = 0;
  while ( pos <= text.size() )
  {
    const auto eol = text.find( '\n', pos );
    auto line = text.substr( pos, eol == std::string_view::npos ? text.size() - pos : eol - pos );
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if ( const auto hash = line.find( '#' ); hash != std::string_view::npos )
      line = line.substr( 0, hash );
    while ( !line.empty() && ( line.back() == ' ' || line.back() == '\t' || line.back() == '\r' ) )
      line.remove_suffix( 1 );
    while ( !line.empty() && ( line.front() == ' ' || line.front() == '\t' ) )
      line.remove_prefix( 1 );
    if ( line.empty() )
      continue;

    const auto eq = line.find( '=' );
    if ( eq == std::string_view::npos )
      throw parse_error( line_no, "expected key=value" );
    const auto key = line.substr( 0, eq );
    const std::string value( line.substr( eq + 1 ) );
    try
    {
      if ( key == "a_mx" )
        tech.a_mux = std::stod( value );
      else if ( key == "a_cmp" )
        tech.a_cmp = std::stod( value );
      else if ( key == "a_reg" )
        tech.a_reg = std::stod( value );
      else if ( key == "width" )
        tech.width = static_cast<unsigned>( std::stoul( value ) );
      else
        throw parse_error( line_no, "unknown key `" + std::string( key ) + "`" );
    }
    catch ( const parse_error& )
    {
      throw;
    }
    catch ( const std::exception& )
    {
      throw parse_error( line_no, "malformed value `" + value + "`" );
    }
  }
  if ( tech.a_mux <= 0 || tech.a_cmp <= 0 || tech.a_reg <= 0 || tech.width < 1 )
    throw std::invalid_argument( "tech_config: areas must be positive and width >= 1" );
  return tech;
}

struct cost_report
{
  std::size_t n_both = 0;       //!< n_A: active CAS with both outputs consumed
  std::size_t n_single = 0;     //!< n_P: active CAS with exactly one output consumed
  std::size_t n_registers = 0;  //!< n_R: pipeline registers
  unsigned depth = 0;           //!< pipeline stages
  double area = 0.0;            //!< estimated area C
};

struct node_classes
{
  std::size_t n_both = 0;
  std::size_t n_single = 0;
  std::vector<std::size_t> inactive;   //!< indices of CAS outside the active cone
};

/*! \brief Marks active CAS by backward reachability from the outputs and
 *         splits them by how many outputs are consumed.  An output feeding
 *         only inactive CAS counts as unconsumed.
 */
inline node_classes classify_nodes( const network& net )
{
  const auto k = net.num_cas();
  std::vector<bool> consumed( net.num_signals(), false );
  for ( auto s : net.outputs() )
    consumed[s] = true;

  std::vector<bool> active( k, false );
  for ( std::size_t i = k; i-- > 0; )
  {
    if ( consumed[net.min_signal( i )] || consumed[net.max_signal( i )] )
    {
      active[i] = true;
      consumed[net.ops()[i].in_a] = true;
      consumed[net.ops()[i].in_b] = true;
    }
  }

  node_classes cls;
  for ( std::size_t i = 0; i < k; ++i )
  {
    if ( !active[i] )
    {
      cls.inactive.push_back( i );
      continue;
    }
    const bool min_used = consumed[net.min_signal( i )];
    const bool max_used = consumed[net.max_signal( i )];
    if ( min_used && max_used )
      ++cls.n_both;
    else
      ++cls.n_single;
  }
  return cls;
}

/*! \brief ASAP stage per CAS (inputs are stage 0, each CAS one level later).
 *         Expects an active-only (pruned) network.
 */
inline std::vector<unsigned> asap_schedule( const network& net )
{
  std::vector<unsigned> sig_stage( net.num_signals(), 0 );
  std::vector<unsigned> stage( net.num_cas() );
  for ( std::size_t i = 0; i < net.num_cas(); ++i )
  {
    const auto& op = net.ops()[i];
    stage[i] = 1 + std::max( sig_stage[op.in_a], sig_stage[op.in_b] );
    sig_stage[net.min_signal( i )] = stage[i];
    sig_stage[net.max_signal( i )] = stage[i];
  }
  return stage;
}

inline unsigned schedule_depth( const std::vector<unsigned>& stage )
{
  unsigned depth = 0;
  for ( auto s : stage )
    depth = std::max( depth, s );
  return depth;
}

/*! \brief Registers needed to balance the pipeline: for each boundary
 *         b = 1..depth-1, one register per signal produced at stage <= b
 *         and consumed by some CAS at a stage beyond b.  The primary
 *         output is not a consumer.
 */
inline std::size_t register_count( const network& net, const std::vector<unsigned>& stage )
{
  if ( stage.size() != net.num_cas() )
    throw std::invalid_argument( "register_count: schedule size mismatch" );

  std::vector<unsigned> produced( net.num_signals(), 0 );
  std::vector<unsigned> last_consumer( net.num_signals(), 0 );   // 0 = never consumed
  for ( std::size_t i = 0; i < net.num_cas(); ++i )
  {
    produced[net.min_signal( i )] = stage[i];
    produced[net.max_signal( i )] = stage[i];
    const auto& op = net.ops()[i];
    last_consumer[op.in_a] = std::max( last_consumer[op.in_a], stage[i] );
    last_consumer[op.in_b] = std::max( last_consumer[op.in_b], stage[i] );
  }

  std::size_t regs = 0;
  for ( signal_id s = 0; s < net.num_signals(); ++s )
  {
    if ( last_consumer[s] == 0 )
      continue;
    const unsigned first_boundary = std::max( produced[s], 1u );
    if ( last_consumer[s] > first_boundary )
      regs += last_consumer[s] - first_boundary;
  }
  return regs;
}

/*! \brief Full cost pipeline: prune, classify, schedule, count registers,
 *         evaluate the area formula.
 */
inline cost_report cost( const network& net, const tech_config& tech )
{
  if ( !net.single_output() )
    throw std::invalid_argument( "cost: network must have a single output" );
  const auto pruned = prune( net );
  const auto cls = classify_nodes( pruned );
  const auto stage = asap_schedule( pruned );

  cost_report report;
  report.n_both = cls.n_both;
  report.n_single = cls.n_single;
  report.depth = schedule_depth( stage );
  report.n_registers = register_count( pruned, stage );
  report.area = tech.a_mux * static_cast<double>( 2 * cls.n_both + cls.n_single ) +
                tech.a_cmp * static_cast<double>( cls.n_both + cls.n_single ) +
                tech.a_reg * static_cast<double>( report.n_registers );
  return report;
}

} // namespace medianet
