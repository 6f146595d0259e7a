/*!
  \file search.hpp
  \brief Two-stage evolutionary approximation of median networks.

  A candidate is an integer netlist: a row of two-input nodes where gene
  func=0 means compare-and-swap and func=1 means pass-through wiring (a
  free way to drop a comparator without rewiring its fanout).  A (1+lambda)
  strategy with point mutation first drives the estimated area into the
  target band [t-eps, t+eps] (stage 1, lexicographic cost-then-quality),
  then minimizes the exact quality metric inside the band (stage 2), where
  candidates outside the band score infinity.  Every evaluated candidate
  with finite fitness is offered to a Pareto archive over (area, quality).
*/

#pragma once

#include "analysis.hpp"
#include "cost.hpp"
#include "network.hpp"
#include "numeric.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace medianet
{

struct cgp_gene
{
  signal_id in_a = 0;
  signal_id in_b = 0;
  std::uint8_t func = 0;   //!< 0 = compare-and-swap, 1 = pass-through

  auto operator<=>( const cgp_gene& ) const = default;
};

/*! \brief Integer netlist: node j owns signals n+2j (first output) and
 *         n+2j+1 (second); inputs may reference only earlier signals.
 */
struct genome
{
  unsigned num_inputs = 0;
  std::vector<cgp_gene> nodes;
  signal_id out = 0;

  std::size_t num_signals() const { return num_inputs + 2 * nodes.size(); }

  bool feed_forward_valid() const
  {
    for ( std::size_t j = 0; j < nodes.size(); ++j )
    {
      const signal_id limit = static_cast<signal_id>( num_inputs + 2 * j );
      if ( nodes[j].in_a >= limit || nodes[j].in_b >= limit || nodes[j].func > 1 )
        return false;
    }
    return out < num_signals();
  }

  auto operator<=>( const genome& ) const = default;
};

/*! \brief Embeds a single-output network into a genome of `node_capacity`
 *         nodes; filler nodes get random (seeded) feed-forward genes and
 *         stay inactive.
 */
inline genome encode( const network& net, unsigned node_capacity, rng_engine& rng )
{
  if ( !net.single_output() )
    throw std::invalid_argument( "encode: network must have a single output" );
  if ( net.num_cas() > node_capacity )
    throw std::invalid_argument( "encode: node capacity exceeded" );

  genome g;
  g.num_inputs = net.num_inputs();
  g.nodes.reserve( node_capacity );
  for ( const auto& op : net.ops() )
    g.nodes.push_back( { op.in_a, op.in_b, 0 } );
  for ( std::size_t j = net.num_cas(); j < node_capacity; ++j )
  {
    std::uniform_int_distribution<signal_id> pick( 0, static_cast<signal_id>( g.num_inputs + 2 * j - 1 ) );
    std::uniform_int_distribution<int> coin( 0, 1 );
    g.nodes.push_back( { pick( rng ), pick( rng ), static_cast<std::uint8_t>( coin( rng ) ) } );
  }
  g.out = net.outputs()[0];
  return g;
}

/*! \brief Extracts the active single-output network; pass-through nodes
 *         contribute wiring only, and nodes outside the consumed cone are
 *         dropped, so the result is already pruned.
 */
inline network decode( const genome& g )
{
  if ( !g.feed_forward_valid() )
    throw std::invalid_argument( "decode: genome violates feed-forward constraints" );

  const unsigned n = g.num_inputs;
  const auto total = g.num_signals();

  // per-signal need propagation: a CAS reads both inputs as soon as either
  // of its outputs is needed; a pass-through forwards need per wire
  std::vector<bool> needed( total, false );
  std::vector<bool> node_hit( g.nodes.size(), false );
  std::vector<signal_id> stack{ g.out };
  needed[g.out] = true;
  while ( !stack.empty() )
  {
    const auto s = stack.back();
    stack.pop_back();
    if ( s < n )
      continue;
    const auto j = ( s - n ) / 2;
    const auto& gene = g.nodes[j];
    if ( gene.func == 0 )
    {
      if ( node_hit[j] )
        continue;
      node_hit[j] = true;
      for ( auto in : { gene.in_a, gene.in_b } )
      {
        if ( !needed[in] )
        {
          needed[in] = true;
          stack.push_back( in );
        }
      }
    }
    else
    {
      const auto in = ( s - n ) % 2 == 0 ? gene.in_a : gene.in_b;
      if ( !needed[in] )
      {
        needed[in] = true;
        stack.push_back( in );
      }
    }
  }

  network net( n );
  constexpr signal_id unset = ~signal_id( 0 );
  std::vector<signal_id> remap( total, unset );
  for ( unsigned i = 0; i < n; ++i )
    remap[i] = i;
  for ( std::size_t j = 0; j < g.nodes.size(); ++j )
  {
    const auto& gene = g.nodes[j];
    const auto first = static_cast<signal_id>( n + 2 * j );
    if ( gene.func == 1 )
    {
      if ( needed[first] )
        remap[first] = remap[gene.in_a];
      if ( needed[first + 1] )
        remap[first + 1] = remap[gene.in_b];
    }
    else if ( node_hit[j] )
    {
      const auto [mn, mx] = net.add_cas( remap[gene.in_a], remap[gene.in_b] );
      remap[first] = mn;
      remap[first + 1] = mx;
    }
  }
  net.set_outputs( { remap[g.out] } );
  return net;
}

namespace detail
{

/*! \brief Uniform redraw over [0, domain) excluding the current value. */
inline void redraw( signal_id& value, signal_id domain, rng_engine& rng )
{
  if ( domain <= 1 )
    return;
  std::uniform_int_distribution<signal_id> pick( 0, domain - 2 );
  const auto drawn = pick( rng );
  value = drawn >= value ? drawn + 1 : drawn;
}

} // namespace detail

/*! \brief Point mutation: picks `count` distinct gene positions and
 *         redraws each uniformly from its legal domain excluding the
 *         current value (degenerate one-value domains stay untouched).
 */
inline genome mutate( const genome& g, unsigned count, rng_engine& rng )
{
  if ( count < 1 )
    throw std::invalid_argument( "mutate: need at least one mutated gene" );

  genome child = g;
  const std::size_t positions = 3 * g.nodes.size() + 1;

  // partial Fisher-Yates over position indices
  std::vector<std::size_t> order( positions );
  std::iota( order.begin(), order.end(), 0 );
  const auto picks = std::min<std::size_t>( count, positions );
  for ( std::size_t i = 0; i < picks; ++i )
  {
    std::uniform_int_distribution<std::size_t> pick( i, positions - 1 );
    std::swap( order[i], order[pick( rng )] );
    const auto p = order[i];

    if ( p == 3 * g.nodes.size() )
    {
      detail::redraw( child.out, static_cast<signal_id>( child.num_signals() ), rng );
      continue;
    }
    const auto j = p / 3;
    auto& gene = child.nodes[j];
    const auto domain = static_cast<signal_id>( child.num_inputs + 2 * j );
    switch ( p % 3 )
    {
    case 0:
      detail::redraw( gene.in_a, domain, rng );
      break;
    case 1:
      detail::redraw( gene.in_b, domain, rng );
      break;
    default:
      gene.func ^= 1;
      break;
    }
  }
  return child;
}

struct search_config
{
  network initial;                   //!< seed network (single output)
  double target_cost = 0.0;          //!< t, in cost units
  double eps = -1.0;                 //!< band half-width; negative = a_cmp / 2
  unsigned lambda = 4;               //!< offspring per generation
  unsigned mutated_genes = 2;        //!< h, genes redrawn per offspring
  unsigned node_capacity = 0;        //!< n_c; 0 = twice the seed CAS count
  std::uint64_t max_evaluations = 0; //!< offspring evaluation budget
  double max_seconds = 0.0;          //!< wall-clock budget; <= 0 = none
  std::uint64_t seed = 1;            //!< RNG seed
  tech_config tech;

  search_config( network seed_net )
      : initial( std::move( seed_net ) )
  {
  }
};

/*! \brief Converts a target CAS count into cost units by linear scaling of
 *         the seed network's estimated area.
 */
inline double target_cost_for_cas( const network& seed, unsigned cas_count, const tech_config& tech )
{
  const auto seed_cost = cost( seed, tech );
  const auto seed_k = prune( seed ).num_cas();
  if ( seed_k == 0 )
    throw std::invalid_argument( "target_cost_for_cas: seed has no comparators" );
  return seed_cost.area * static_cast<double>( cas_count ) / static_cast<double>( seed_k );
}

struct evaluated_candidate
{
  genome g;
  network net;
  cost_report cost;
  error_profile profile;
};

/*! \brief Stage-aware fitness; smaller is better in both stages. */
struct fitness_value
{
  bool infinite = false;
  double cost_excess = 0.0;   //!< stage 1 primary objective
  big_rat quality;            //!< tie-break (stage 1) / objective (stage 2)
};

inline bool fitness_less_equal( const fitness_value& a, const fitness_value& b )
{
  if ( a.infinite || b.infinite )
    return !a.infinite || b.infinite;
  if ( a.cost_excess != b.cost_excess )
    return a.cost_excess < b.cost_excess;
  return a.quality <= b.quality;
}

inline bool fitness_less( const fitness_value& a, const fitness_value& b )
{
  return fitness_less_equal( a, b ) && !fitness_less_equal( b, a );
}

namespace detail
{

inline bool in_band( double c, const search_config& cfg, double eps )
{
  return cfg.target_cost - eps <= c && c <= cfg.target_cost + eps;
}

inline fitness_value fitness_of( const cost_report& cost, const error_profile& profile,
                                 const search_config& cfg, double eps, int stage )
{
  fitness_value f;
  if ( stage >= 2 )
  {
    if ( !in_band( cost.area, cfg, eps ) )
    {
      f.infinite = true;
      return f;
    }
    f.quality = profile.q;
    return f;
  }
  f.cost_excess = std::max( cost.area - ( cfg.target_cost + eps ), 0.0 );
  f.quality = profile.q;
  return f;
}

} // namespace detail

/*! \brief Evaluates a genome under the two-stage fitness (1 = reach the
 *         cost band, 2 = minimize quality inside it).
 */
inline fitness_value fitness( const genome& g, const search_config& cfg, int stage )
{
  const auto net = decode( g );
  const auto c = cost( net, cfg.tech );
  const auto p = analyze( net );
  const double eps = cfg.eps >= 0 ? cfg.eps : cfg.tech.a_cmp / 2;
  return detail::fitness_of( c, p, cfg, eps, stage );
}

/*! \brief Nondominated set over (area, quality); duplicates excluded. */
class pareto_archive
{
public:
  struct entry
  {
    genome g;
    network net;
    cost_report cost;
    error_profile profile;

    entry( genome gg, network nn, cost_report cc, error_profile pp )
        : g( std::move( gg ) ), net( std::move( nn ) ), cost( cc ), profile( std::move( pp ) )
    {
    }
  };

  /*! \brief Inserts unless dominated (or duplicated); drops members the
   *         new point dominates.  Returns true when inserted.
   */
  bool offer( entry e )
  {
    for ( const auto& cur : entries_ )
    {
      if ( dominates_or_equal( cur, e ) )
        return false;
    }
    std::erase_if( entries_, [&]( const entry& cur ) { return dominates( e, cur ); } );
    const auto pos = std::find_if( entries_.begin(), entries_.end(), [&]( const entry& cur ) {
      return e.cost.area < cur.cost.area ||
             ( e.cost.area == cur.cost.area && e.profile.q < cur.profile.q );
    } );
    entries_.insert( pos, std::move( e ) );
    return true;
  }

  const std::vector<entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

private:
  static bool dominates( const entry& a, const entry& b )
  {
    return a.cost.area <= b.cost.area && a.profile.q <= b.profile.q &&
           ( a.cost.area < b.cost.area || a.profile.q < b.profile.q );
  }

  static bool dominates_or_equal( const entry& a, const entry& b )
  {
    return a.cost.area <= b.cost.area && a.profile.q <= b.profile.q;
  }

  std::vector<entry> entries_;   // kept sorted by (area asc, quality asc)
};

struct generation_log
{
  std::uint64_t generation = 0;
  int stage = 1;
  double parent_cost = 0.0;
  big_rat parent_quality;
};

struct search_result
{
  pareto_archive archive;
  genome best;                        //!< best in-band candidate seen, else final parent
  cost_report best_cost;
  error_profile best_profile;
  std::vector<generation_log> trace;  //!< one row per generation, seed first
  std::uint64_t evaluations = 0;
  bool reached_stage2 = false;
};

/*! \brief (1+lambda) evolution from the seed network.  The run is fully
 *         reproducible from the seed when only the evaluation budget is
 *         used (a binding wall-clock budget cuts at a machine-dependent
 *         point).  Neutral moves (equal fitness) replace the parent.
 */
inline search_result evolve( const search_config& cfg )
{
  if ( cfg.lambda < 1 )
    throw std::invalid_argument( "evolve: lambda must be at least 1" );
  if ( cfg.mutated_genes < 1 )
    throw std::invalid_argument( "evolve: mutated_genes must be at least 1" );
  // an exhausted budget (even zero evaluations) still scores the seed

  const double eps = cfg.eps >= 0 ? cfg.eps : cfg.tech.a_cmp / 2;
  const auto seed_pruned = prune( cfg.initial );
  const unsigned capacity = cfg.node_capacity > 0
                                ? cfg.node_capacity
                                : static_cast<unsigned>( 2 * std::max<std::size_t>( seed_pruned.num_cas(), 1 ) );

  rng_engine rng( cfg.seed );
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>( std::chrono::steady_clock::now() - started ).count();
  };

  auto evaluate = [&]( genome g ) -> evaluated_candidate {
    auto net = decode( g );
    auto c = cost( net, cfg.tech );
    auto p = analyze( net );
    return { std::move( g ), std::move( net ), c, std::move( p ) };
  };

  search_result result;
  auto parent = evaluate( encode( seed_pruned, capacity, rng ) );
  int stage = detail::in_band( parent.cost.area, cfg, eps ) ? 2 : 1;
  result.reached_stage2 = stage == 2;
  result.archive.offer( { parent.g, parent.net, parent.cost, parent.profile } );
  result.trace.push_back( { 0, stage, parent.cost.area, parent.profile.q } );

  std::optional<evaluated_candidate> best_in_band;
  auto consider_best = [&]( const evaluated_candidate& cand ) {
    if ( !detail::in_band( cand.cost.area, cfg, eps ) )
      return;
    if ( !best_in_band || cand.profile.q < best_in_band->profile.q ||
         ( cand.profile.q == best_in_band->profile.q && cand.cost.area < best_in_band->cost.area ) )
      best_in_band = cand;
  };
  consider_best( parent );

  auto budget_left = [&]() {
    if ( cfg.max_evaluations > 0 && result.evaluations >= cfg.max_evaluations )
      return false;
    if ( cfg.max_seconds > 0 && elapsed() >= cfg.max_seconds )
      return false;
    return cfg.max_evaluations > 0 || cfg.max_seconds > 0;
  };

  std::uint64_t generation = 0;
  while ( budget_left() )
  {
    ++generation;
    std::optional<evaluated_candidate> best_child;
    fitness_value best_child_fitness;
    for ( unsigned i = 0; i < cfg.lambda; ++i )
    {
      auto child = evaluate( mutate( parent.g, cfg.mutated_genes, rng ) );
      ++result.evaluations;
      const auto f = detail::fitness_of( child.cost, child.profile, cfg, eps, stage );
      if ( !f.infinite )
        result.archive.offer( { child.g, child.net, child.cost, child.profile } );
      consider_best( child );
      if ( !best_child || fitness_less( f, best_child_fitness ) )
      {
        best_child = std::move( child );
        best_child_fitness = f;
      }
      if ( cfg.max_evaluations > 0 && result.evaluations >= cfg.max_evaluations )
        break;
    }
    const auto parent_fitness = detail::fitness_of( parent.cost, parent.profile, cfg, eps, stage );
    if ( best_child && fitness_less_equal( best_child_fitness, parent_fitness ) )
      parent = std::move( *best_child );
    if ( stage == 1 && detail::in_band( parent.cost.area, cfg, eps ) )
    {
      stage = 2;
      result.reached_stage2 = true;
    }
    result.trace.push_back( { generation, stage, parent.cost.area, parent.profile.q } );
  }

  const auto& final_best = best_in_band ? *best_in_band : parent;
  result.best = final_best.g;
  result.best_cost = final_best.cost;
  result.best_profile = final_best.profile;
  return result;
}

} // namespace medianet
