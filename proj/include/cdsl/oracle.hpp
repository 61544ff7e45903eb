#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fault.hpp"
#include "logic5.hpp"
#include "netlist.hpp"

namespace cdsl
{

/// Per-line three-valued values of the good machine, or of the faulty one
/// when a fault is given (the site is overridden before its fanout sees it).
inline std::vector<Tri> simulate_lines( const Circuit& c, const Pattern& pattern, std::optional<Fault> fault = std::nullopt )
{
  if ( pattern.values.size() != c.primary_inputs().size() )
    throw std::invalid_argument( "pattern length " + std::to_string( pattern.values.size() ) + " does not match " +
                                 std::to_string( c.primary_inputs().size() ) + " primary inputs" );
  std::vector<Tri> v( c.size(), Tri::X );
  std::vector<Tri> in;
  for ( auto g : c.topo_order() )
  {
    const auto& gate = c.gate( g );
    if ( gate.kind == GateKind::Input )
      v[g] = pattern.values[c.pi_index( g )];
    else
    {
      in.clear();
      for ( auto f : gate.fanin )
        in.push_back( v[f] );
      v[g] = eval_tri( gate.kind, in );
    }
    if ( fault && fault->site == g )
      v[g] = tri_from_bool( fault->stuck_value() );
  }
  return v;
}

/// Values at the primary outputs, in output order.
inline std::vector<Tri> simulate( const Circuit& c, const Pattern& pattern, std::optional<Fault> fault = std::nullopt )
{
  auto v = simulate_lines( c, pattern, fault );
  std::vector<Tri> out;
  for ( auto po : c.primary_outputs() )
    out.push_back( v[po] );
  return out;
}

/// Some output is concrete in both machines and differs. X never counts.
inline bool detects( const Circuit& c, const Pattern& pattern, const Fault& fault )
{
  auto good = simulate( c, pattern );
  auto bad = simulate( c, pattern, fault );
  for ( std::size_t i = 0; i < good.size(); ++i )
    if ( good[i] != Tri::X && bad[i] != Tri::X && good[i] != bad[i] )
      return true;
  return false;
}

class TooLarge : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t exhaustive_pi_limit = 20;

struct Classification
{
  Status status{ Status::Untestable }; // TESTABLE or UNTESTABLE
  std::uint64_t detecting = 0;         // number of detecting cone-PI assignments
  std::vector<Pattern> patterns;       // first detecting patterns, capped
};

namespace detail
{

/// 64 lanes of a three-valued line: bit set in `one` or `zero`, neither = X.
struct Lanes
{
  std::uint64_t one = 0, zero = 0;
};

inline Lanes lanes_eval( GateKind kind, std::span<const Lanes> in )
{
  Lanes r;
  switch ( kind )
  {
  case GateKind::Input: return r;
  case GateKind::Output:
  case GateKind::Buf: return in[0];
  case GateKind::Not: return { in[0].zero, in[0].one };
  case GateKind::And:
  case GateKind::Nand:
    r = { ~0ull, 0 };
    for ( auto x : in )
      r = { r.one & x.one, r.zero | x.zero };
    return kind == GateKind::Nand ? Lanes{ r.zero, r.one } : r;
  case GateKind::Or:
  case GateKind::Nor:
    r = { 0, ~0ull };
    for ( auto x : in )
      r = { r.one | x.one, r.zero & x.zero };
    return kind == GateKind::Nor ? Lanes{ r.zero, r.one } : r;
  case GateKind::Xor:
  case GateKind::Xnor:
    r = { 0, ~0ull };
    for ( auto x : in )
      r = { ( r.one & x.zero ) | ( r.zero & x.one ), ( r.one & x.one ) | ( r.zero & x.zero ) };
    return kind == GateKind::Xnor ? Lanes{ r.zero, r.one } : r;
  }
  return r;
}

} // namespace detail

/// Enumerates every assignment of the free cone PIs (other PIs stay X,
/// `fixed` PIs keep their constraint) and calls `visit(pattern)` for each
/// detecting one. Simulation runs 64 assignments at a time.
template<class Visit>
std::uint64_t for_each_detecting( const Circuit& c, const Fault& fault, std::span<const PiConstraint> fixed, Visit&& visit )
{
  Cone cone;
  try
  {
    cone = extract_cone( c, fault.site );
  }
  catch ( const UnreachableFaultError& )
  {
    return 0;
  }

  std::vector<std::optional<bool>> pinned( c.size() );
  for ( const auto& pc : fixed )
    pinned[pc.pi] = pc.value;
  std::vector<GateId> free;
  for ( auto pi : cone.cone_pis )
    if ( !pinned[pi] )
      free.push_back( pi );
  if ( free.size() > exhaustive_pi_limit )
    throw TooLarge( "cone of " + fault_name( c, fault ) + " has " + std::to_string( free.size() ) + " free inputs" );

  std::vector<GateId> order;
  for ( auto g : c.topo_order() )
    if ( cone.contains( g ) )
      order.push_back( g );

  static constexpr std::uint64_t lane_pattern[6] = { 0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
                                                     0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull };
  const std::size_t n = free.size();
  const std::size_t lane_bits = std::min<std::size_t>( n, 6 );
  const std::uint64_t valid = lane_bits == 6 ? ~0ull : ( ( 1ull << ( 1u << lane_bits ) ) - 1 );
  const std::uint64_t blocks = n > 6 ? ( 1ull << ( n - 6 ) ) : 1;

  std::vector<int> free_index( c.size(), -1 );
  for ( std::size_t i = 0; i < n; ++i )
    free_index[free[i]] = static_cast<int>( i );

  std::vector<detail::Lanes> good( c.size() ), bad( c.size() );
  std::vector<detail::Lanes> in;
  std::uint64_t count = 0;
  const detail::Lanes stuck = fault.stuck_value() ? detail::Lanes{ ~0ull, 0 } : detail::Lanes{ 0, ~0ull };

  for ( std::uint64_t block = 0; block < blocks; ++block )
  {
    for ( auto g : order )
    {
      const auto& gate = c.gate( g );
      detail::Lanes v;
      if ( gate.kind == GateKind::Input )
      {
        if ( pinned[g] )
          v = *pinned[g] ? detail::Lanes{ ~0ull, 0 } : detail::Lanes{ 0, ~0ull };
        else
        {
          auto i = static_cast<std::size_t>( free_index[g] );
          std::uint64_t bits = i < 6 ? lane_pattern[i] : ( ( block >> ( i - 6 ) ) & 1 ? ~0ull : 0 );
          v = { bits, ~bits };
        }
        good[g] = v;
      }
      else
      {
        in.clear();
        for ( auto f : gate.fanin )
          in.push_back( good[f] );
        good[g] = detail::lanes_eval( gate.kind, in );
      }
      if ( g == fault.site )
        bad[g] = stuck;
      else if ( cone.in_fanout_region( g ) )
      {
        in.clear();
        for ( auto f : gate.fanin )
          in.push_back( bad[f] );
        bad[g] = detail::lanes_eval( gate.kind, in );
      }
      else
        bad[g] = good[g];
    }
    std::uint64_t hit = 0;
    for ( auto po : cone.cone_pos )
      hit |= ( good[po].one & bad[po].zero ) | ( good[po].zero & bad[po].one );
    hit &= valid;
    while ( hit )
    {
      const unsigned lane = static_cast<unsigned>( __builtin_ctzll( hit ) );
      hit &= hit - 1;
      ++count;
      Pattern p;
      p.values.assign( c.primary_inputs().size(), Tri::X );
      for ( const auto& pc : fixed )
        p.values[c.pi_index( pc.pi )] = tri_from_bool( pc.value );
      const std::uint64_t index = ( block << 6 ) | lane;
      for ( std::size_t i = 0; i < n; ++i )
        p.values[c.pi_index( free[i] )] = tri_from_bool( ( index >> i ) & 1 );
      visit( p );
    }
  }
  return count;
}

/// Ground-truth classification by enumeration over the cone's PIs.
inline Classification exhaustive_classify( const Circuit& c, const Fault& fault, std::span<const PiConstraint> fixed = {},
                                           std::size_t keep_patterns = 64 )
{
  Classification r;
  r.detecting = for_each_detecting( c, fault, fixed, [&]( const Pattern& p ) {
    if ( r.patterns.size() < keep_patterns )
      r.patterns.push_back( p );
  } );
  r.status = r.detecting ? Status::Testable : Status::Untestable;
  return r;
}

} // namespace cdsl
