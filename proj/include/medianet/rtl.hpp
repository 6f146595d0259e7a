/*!
  \file rtl.hpp
  \brief Structural Verilog emitter for pipelined comparison networks.

  One magnitude comparator per CAS, a min/max multiplexer per consumed
  output, and a register for every stage boundary a live signal crosses,
  exactly mirroring the cost model.  Inputs and the final output are
  combinational at the module boundary.
*/

#pragma once

#include "cost.hpp"
#include "network.hpp"

#include <string>
#include <vector>

namespace medianet
{

/*! \brief Emits a synthesizable structural description of a scheduled,
 *         pruned single-output network.  Deterministic for a given input.
 */
inline std::string emit_rtl( const network& net, const tech_config& tech,
                             const std::vector<unsigned>& stage,
                             std::string_view module_name = "median_net" )
{
  if ( !net.single_output() )
    throw std::invalid_argument( "emit_rtl: network must have a single output" );
  if ( stage.size() != net.num_cas() )
    throw std::invalid_argument( "emit_rtl: schedule size mismatch" );

  const unsigned n = net.num_inputs();
  const unsigned depth = schedule_depth( stage );

  std::vector<unsigned> produced( net.num_signals(), 0 );
  std::vector<unsigned> last_consumer( net.num_signals(), 0 );
  std::vector<bool> consumed( net.num_signals(), false );
  for ( std::size_t i = 0; i < net.num_cas(); ++i )
  {
    produced[net.min_signal( i )] = stage[i];
    produced[net.max_signal( i )] = stage[i];
    const auto& op = net.ops()[i];
    consumed[op.in_a] = consumed[op.in_b] = true;
    last_consumer[op.in_a] = std::max( last_consumer[op.in_a], stage[i] );
    last_consumer[op.in_b] = std::max( last_consumer[op.in_b], stage[i] );
  }
  consumed[net.outputs()[0]] = true;

  auto base_name = [&]( signal_id s ) -> std::string {
    if ( s < n )
      return "in" + std::to_string( s );
    const auto k = net.producer( s );
    return "s" + std::to_string( k ) + ( s == net.min_signal( k ) ? "_mn" : "_mx" );
  };
  // value of signal s as read by a consumer in stage c: the version that
  // crossed boundary c-1, or the raw wire when no boundary separates them
  auto value_at = [&]( signal_id s, unsigned c ) -> std::string {
    const unsigned first_boundary = std::max( produced[s], 1u );
    if ( c == 0 || c - 1 < first_boundary )
      return base_name( s );
    return base_name( s ) + "_r" + std::to_string( c - 1 );
  };

  std::string text;
  text += "// " + std::string( module_name ) + ": pipelined selection network, " +
          std::to_string( n ) + " inputs, " + std::to_string( net.num_cas() ) +
          " compare-and-swap elements, " + std::to_string( depth ) + " stages\n";
  text += "module " + std::string( module_name ) + " #(\n  parameter WIDTH = " +
          std::to_string( tech.width ) + "\n) (\n  input  wire clk,\n";
  for ( unsigned i = 0; i < n; ++i )
    text += "  input  wire [WIDTH-1:0] in" + std::to_string( i ) + ",\n";
  text += "  output wire [WIDTH-1:0] out\n);\n\n";

  std::string regs_decl, regs_body;
  for ( signal_id s = 0; s < net.num_signals(); ++s )
  {
    if ( last_consumer[s] == 0 )
      continue;
    const unsigned first_boundary = std::max( produced[s], 1u );
    for ( unsigned b = first_boundary; b < last_consumer[s]; ++b )
    {
      const auto reg = base_name( s ) + "_r" + std::to_string( b );
      const auto prev = b == first_boundary ? base_name( s ) : base_name( s ) + "_r" + std::to_string( b - 1 );
      regs_decl += "  reg [WIDTH-1:0] " + reg + ";\n";
      regs_body += "    " + reg + " <= " + prev + ";\n";
    }
  }
  if ( !regs_decl.empty() )
    text += regs_decl + "\n";

  for ( std::size_t k = 0; k < net.num_cas(); ++k )
  {
    const auto& op = net.ops()[k];
    const auto a = value_at( op.in_a, stage[k] );
    const auto b = value_at( op.in_b, stage[k] );
    const auto lt = "lt" + std::to_string( k );
    text += "  // stage " + std::to_string( stage[k] ) + "\n";
    text += "  wire " + lt + " = " + a + " < " + b + ";\n";
    if ( consumed[net.min_signal( k )] )
      text += "  wire [WIDTH-1:0] " + base_name( net.min_signal( k ) ) + " = " + lt + " ? " + a +
              " : " + b + ";\n";
    if ( consumed[net.max_signal( k )] )
      text += "  wire [WIDTH-1:0] " + base_name( net.max_signal( k ) ) + " = " + lt + " ? " + b +
              " : " + a + ";\n";
  }

  if ( !regs_body.empty() )
    text += "\n  always @(posedge clk) begin\n" + regs_body + "  end\n";

  text += "\n  assign out = " + base_name( net.outputs()[0] ) + ";\n";
  text += "endmodule\n";
  return text;
}

} // namespace medianet
