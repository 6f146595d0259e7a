/*!
  \file bdd.hpp
  \brief Reduced ordered binary decision diagrams with exact model counting.

  Nodes are canonical: no node has equal children and the unique table
  never holds two nodes with the same (var, lo, hi) triple, so two
  references denote the same function exactly when they are equal.  The
  variable order is the fixed natural order x1 < x2 < ... < xn; there are
  no complement edges and no dynamic reordering.
*/

#pragma once

#include "numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace medianet
{

/*! \brief Opaque handle to a node; valid only within its manager. */
using bdd_ref = std::uint32_t;

class bdd_manager
{
public:
  static constexpr bdd_ref false_ref = 0;
  static constexpr bdd_ref true_ref = 1;

  explicit bdd_manager( unsigned num_vars, std::size_t node_budget = 1u << 26 )
      : num_vars_( num_vars ), node_budget_( node_budget )
  {
    // terminals live at indices 0 and 1; their level is num_vars + 1 so
    // that path counting sees them below every variable
    nodes_.push_back( { num_vars_ + 1, 0, 0 } );
    nodes_.push_back( { num_vars_ + 1, 1, 1 } );
  }

  bdd_manager( const bdd_manager& ) = delete;
  bdd_manager& operator=( const bdd_manager& ) = delete;
  bdd_manager( bdd_manager&& ) = default;
  bdd_manager& operator=( bdd_manager&& ) = default;

  unsigned var_count() const { return num_vars_; }
  std::size_t node_count() const { return nodes_.size(); }

  /*! \brief Projection function x_i, 1-based. */
  bdd_ref var( unsigned i )
  {
    if ( i < 1 || i > num_vars_ )
      throw std::out_of_range( "bdd_manager::var: index out of range" );
    return mk( i, false_ref, true_ref );
  }

  bdd_ref apply_and( bdd_ref a, bdd_ref b )
  {
    check_ref( a );
    check_ref( b );
    return and_rec( a, b );
  }

  bdd_ref apply_or( bdd_ref a, bdd_ref b )
  {
    check_ref( a );
    check_ref( b );
    return or_rec( a, b );
  }

  bdd_ref apply_not( bdd_ref a )
  {
    check_ref( a );
    return not_rec( a );
  }

  /*! \brief Threshold function: at least k of the n variables are 1. */
  bdd_ref threshold( unsigned k )
  {
    std::unordered_map<std::uint64_t, bdd_ref> memo;
    return threshold_rec( 1, k, memo );
  }

  /*! \brief Exact number of satisfying assignments over all n variables. */
  big_int satcount( bdd_ref f )
  {
    check_ref( f );
    std::unordered_map<bdd_ref, big_int> memo;
    // weighted path count relative to the levels below f, then scale by
    // the variables skipped above f
    const big_int below = count_rec( f, memo );
    return below << ( level( f ) - 1 );
  }

  /*! \brief Number of distinct nodes reachable from f (terminals included). */
  std::size_t node_count( bdd_ref f ) const
  {
    std::unordered_set<bdd_ref> seen;
    std::vector<bdd_ref> stack{ f };
    while ( !stack.empty() )
    {
      const auto u = stack.back();
      stack.pop_back();
      if ( !seen.insert( u ).second || u <= true_ref )
        continue;
      stack.push_back( nodes_[u].lo );
      stack.push_back( nodes_[u].hi );
    }
    return seen.size();
  }

  void clear_cache()
  {
    cache_.clear();
  }

  /*! \brief DOT-format dump for debugging. */
  std::string to_dot( bdd_ref f ) const
  {
    std::string dot = "digraph bdd {\n  node0 [label=\"0\", shape=box];\n  node1 [label=\"1\", shape=box];\n";
    std::unordered_set<bdd_ref> seen{ false_ref, true_ref };
    std::vector<bdd_ref> stack{ f };
    while ( !stack.empty() )
    {
      const auto u = stack.back();
      stack.pop_back();
      if ( !seen.insert( u ).second )
        continue;
      dot += "  node" + std::to_string( u ) + " [label=\"x" + std::to_string( nodes_[u].var ) + "\"];\n";
      dot += "  node" + std::to_string( u ) + " -> node" + std::to_string( nodes_[u].lo ) + " [style=dashed];\n";
      dot += "  node" + std::to_string( u ) + " -> node" + std::to_string( nodes_[u].hi ) + ";\n";
      stack.push_back( nodes_[u].lo );
      stack.push_back( nodes_[u].hi );
    }
    dot += "}\n";
    return dot;
  }

  /*! \brief Scans the node store for canonicity violations (test hook). */
  bool check_canonical() const
  {
    std::unordered_set<std::uint64_t> triples;
    for ( std::size_t i = 2; i < nodes_.size(); ++i )
    {
      const auto& nd = nodes_[i];
      if ( nd.lo == nd.hi )
        return false;
      if ( nd.var < 1 || nd.var > num_vars_ )
        return false;
      if ( level( nd.lo ) <= nd.var || level( nd.hi ) <= nd.var )
        return false;
      if ( !triples.insert( triple_key( nd.var, nd.lo, nd.hi ) ).second )
        return false;
    }
    return true;
  }

private:
  struct node
  {
    unsigned var;
    bdd_ref lo;
    bdd_ref hi;
  };

  enum class op : std::uint64_t
  {
    op_and = 0,
    op_or = 1,
    op_not = 2
  };

  unsigned level( bdd_ref f ) const { return nodes_[f].var; }

  void check_ref( bdd_ref f ) const
  {
    if ( f >= nodes_.size() )
      throw std::out_of_range( "bdd_manager: foreign or stale reference" );
  }

  static std::uint64_t triple_key( unsigned var, bdd_ref lo, bdd_ref hi )
  {
    // var < 2^7 in practice, refs < 2^28 under the default budget
    return ( static_cast<std::uint64_t>( var ) << 56 ) ^ ( static_cast<std::uint64_t>( lo ) << 28 ) ^ hi;
  }

  static std::uint64_t cache_key( op o, bdd_ref a, bdd_ref b )
  {
    return ( static_cast<std::uint64_t>( o ) << 60 ) ^ ( static_cast<std::uint64_t>( a ) << 30 ) ^ b;
  }

  bdd_ref mk( unsigned var, bdd_ref lo, bdd_ref hi )
  {
    if ( lo == hi )
      return lo;
    const auto key = triple_key( var, lo, hi );
    if ( const auto it = unique_.find( key ); it != unique_.end() )
      return it->second;
    if ( nodes_.size() >= node_budget_ )
      throw std::runtime_error( "bdd_manager: node budget exceeded" );
    const auto ref = static_cast<bdd_ref>( nodes_.size() );
    nodes_.push_back( { var, lo, hi } );
    unique_.emplace( key, ref );
    return ref;
  }

  bdd_ref and_rec( bdd_ref a, bdd_ref b )
  {
    if ( a == b || b == true_ref )
      return a;
    if ( a == true_ref )
      return b;
    if ( a == false_ref || b == false_ref )
      return false_ref;
    if ( a > b )
      std::swap( a, b );
    const auto key = cache_key( op::op_and, a, b );
    if ( const auto it = cache_.find( key ); it != cache_.end() )
      return it->second;
    const auto [va, vb] = std::pair( level( a ), level( b ) );
    const auto v = std::min( va, vb );
    const auto r = mk( v,
                       and_rec( va == v ? nodes_[a].lo : a, vb == v ? nodes_[b].lo : b ),
                       and_rec( va == v ? nodes_[a].hi : a, vb == v ? nodes_[b].hi : b ) );
    cache_.emplace( key, r );
    return r;
  }

  bdd_ref or_rec( bdd_ref a, bdd_ref b )
  {
    if ( a == b || b == false_ref )
      return a;
    if ( a == false_ref )
      return b;
    if ( a == true_ref || b == true_ref )
      return true_ref;
    if ( a > b )
      std::swap( a, b );
    const auto key = cache_key( op::op_or, a, b );
    if ( const auto it = cache_.find( key ); it != cache_.end() )
      return it->second;
    const auto [va, vb] = std::pair( level( a ), level( b ) );
    const auto v = std::min( va, vb );
    const auto r = mk( v,
                       or_rec( va == v ? nodes_[a].lo : a, vb == v ? nodes_[b].lo : b ),
                       or_rec( va == v ? nodes_[a].hi : a, vb == v ? nodes_[b].hi : b ) );
    cache_.emplace( key, r );
    return r;
  }

  bdd_ref not_rec( bdd_ref a )
  {
    if ( a == false_ref )
      return true_ref;
    if ( a == true_ref )
      return false_ref;
    const auto key = cache_key( op::op_not, a, 0 );
    if ( const auto it = cache_.find( key ); it != cache_.end() )
      return it->second;
    const auto r = mk( level( a ), not_rec( nodes_[a].lo ), not_rec( nodes_[a].hi ) );
    cache_.emplace( key, r );
    return r;
  }

  bdd_ref threshold_rec( unsigned v, unsigned need, std::unordered_map<std::uint64_t, bdd_ref>& memo )
  {
    if ( need == 0 )
      return true_ref;
    if ( need > num_vars_ - v + 1 )
      return false_ref;
    const auto key = ( static_cast<std::uint64_t>( v ) << 32 ) | need;
    if ( const auto it = memo.find( key ); it != memo.end() )
      return it->second;
    const auto r = mk( v, threshold_rec( v + 1, need, memo ), threshold_rec( v + 1, need - 1, memo ) );
    memo.emplace( key, r );
    return r;
  }

  big_int count_rec( bdd_ref f, std::unordered_map<bdd_ref, big_int>& memo )
  {
    if ( f == false_ref )
      return 0;
    if ( f == true_ref )
      return 1;
    if ( const auto it = memo.find( f ); it != memo.end() )
      return it->second;
    const auto& nd = nodes_[f];
    big_int total = count_rec( nd.lo, memo ) << ( level( nd.lo ) - nd.var - 1 );
    total += count_rec( nd.hi, memo ) << ( level( nd.hi ) - nd.var - 1 );
    memo.emplace( f, total );
    return total;
  }

  unsigned num_vars_;
  std::size_t node_budget_;
  std::vector<node> nodes_;
  std::unordered_map<std::uint64_t, bdd_ref> unique_;
  std::unordered_map<std::uint64_t, bdd_ref> cache_;
};

} // namespace medianet
