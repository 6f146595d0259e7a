/*!
  \file json_io.hpp
  \brief JSON and table-style text renderings of analysis and cost results.

  Exact rationals are emitted as {num, den, value} objects so downstream
  tooling can keep full precision; the float field is for convenience.
*/

#pragma once

#include "analysis.hpp"
#include "cost.hpp"

#include <json.hpp>

#include <cstdio>
#include <string>

namespace medianet
{

inline nlohmann::json rational_json( const big_rat& r )
{
  return { { "num", boost::multiprecision::numerator( r ).str() },
           { "den", boost::multiprecision::denominator( r ).str() },
           { "value", to_double( r ) } };
}

inline nlohmann::json profile_json( const error_profile& p )
{
  nlohmann::json j;
  j["n"] = p.n;
  j["m"] = p.m;
  j["k"] = p.k;
  nlohmann::json a_left = nlohmann::json::array(), a_right = nlohmann::json::array();
  for ( const auto& a : p.a_left )
    a_left.push_back( a.str() );
  for ( const auto& a : p.a_right )
    a_right.push_back( a.str() );
  j["aL"] = std::move( a_left );
  j["aR"] = std::move( a_right );
  nlohmann::json hist = nlohmann::json::array();
  for ( const auto& h : p.hist )
    hist.push_back( rational_json( h ) );
  j["H"] = std::move( hist );
  j["dL"] = p.d_left;
  j["dR"] = p.d_right;
  j["h0"] = rational_json( p.h0 );
  j["Q"] = rational_json( p.q );
  j["exact"] = p.exact();
  return j;
}

/*! \brief Two-decimal table rendering of the quality indicators. */
inline std::string profile_text( const error_profile& p )
{
  char buf[64];
  auto fixed2 = []( char* out, std::size_t size, double v ) {
    std::snprintf( out, size, "%.2f", v );
  };
  std::string text;
  text += "n     " + std::to_string( p.n ) + "\n";
  text += "m     " + std::to_string( p.m ) + "\n";
  text += "k     " + std::to_string( p.k ) + "\n";
  fixed2( buf, sizeof buf, to_double( p.q ) );
  text += "Q     " + std::string( buf ) + "\n";
  text += "d_L   " + std::to_string( p.d_left ) + "\n";
  text += "d_R   " + std::to_string( p.d_right ) + "\n";
  fixed2( buf, sizeof buf, to_double( p.h0 ) );
  text += "h_0   " + std::string( buf ) + "\n";
  text += "H    ";
  for ( const auto& h : p.hist )
  {
    fixed2( buf, sizeof buf, to_double( h ) );
    text += " " + std::string( buf );
  }
  text += "\n";
  text += std::string( "exact " ) + ( p.exact() ? "yes" : "no" ) + "\n";
  return text;
}

inline nlohmann::json cost_json( const cost_report& r )
{
  nlohmann::json j;
  j["n_A"] = r.n_both;
  j["n_P"] = r.n_single;
  j["n_R"] = r.n_registers;
  j["depth"] = r.depth;
  j["C"] = r.area;
  j["k"] = r.n_both + r.n_single;
  return j;
}

inline std::string cost_text( const cost_report& r )
{
  char buf[64];
  std::snprintf( buf, sizeof buf, "%.2f", r.area );
  std::string text;
  text += "k      " + std::to_string( r.n_both + r.n_single ) + "\n";
  text += "n_A    " + std::to_string( r.n_both ) + "\n";
  text += "n_P    " + std::to_string( r.n_single ) + "\n";
  text += "n_R    " + std::to_string( r.n_registers ) + "\n";
  text += "depth  " + std::to_string( r.depth ) + "\n";
  text += "C      " + std::string( buf ) + "\n";
  return text;
}

} // namespace medianet
