#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "implication_graph.hpp"
#include "logic5.hpp"
#include "netlist.hpp"

namespace cdsl
{

/// One remembered assignment inside a learnt constraint.
struct Literal
{
  GateId gate{};
  Value5 value{ Value5::X };
  unsigned level = 0; // decision level when the constraint was learnt

  bool operator==( const Literal& ) const = default;
};

enum class ConstraintKind : std::uint8_t
{
  DecisionBased,
  UipBased,
  Root // explanation of a level-0 conflict; kept for diagnosis only
};

inline std::string_view constraint_kind_name( ConstraintKind k )
{
  switch ( k )
  {
  case ConstraintKind::DecisionBased: return "DECISION";
  case ConstraintKind::UipBased: return "UIP";
  case ConstraintKind::Root: return "ROOT";
  }
  return "?";
}

/// "Not all of these assignments may hold together."
struct LearntConstraint
{
  std::vector<Literal> literals;
  ConstraintKind kind{ ConstraintKind::UipBased };
  std::uint64_t last_used = 0;
  std::optional<GateId> uip;

  bool contains( GateId g ) const
  {
    return std::any_of( literals.begin(), literals.end(), [g]( const Literal& l ) { return l.gate == g; } );
  }
};

class EmptyTrail : public std::runtime_error
{
public:
  EmptyTrail() : std::runtime_error( "conflict without any decision on the trail" ) {}
};

class ConstraintViolated : public std::runtime_error
{
public:
  explicit ConstraintViolated( std::size_t index )
      : std::runtime_error( "learnt constraint " + std::to_string( index ) + " fully matched" ), index_( index ) {}
  std::size_t index() const { return index_; }

private:
  std::size_t index_;
};

namespace detail
{

inline Literal literal_of( const ImplicationGraph& g, NodeId n )
{
  const auto& a = g.node( n );
  return { a.gate, a.value, a.level };
}

inline unsigned conflict_level( const ImplicationGraph& g, const Conflict& c )
{
  unsigned level = 0;
  for ( auto n : c.antecedents )
    level = std::max( level, g.node( n ).level );
  return level;
}

} // namespace detail

struct NoExpansion
{
  bool operator()( const Assignment& ) const { return false; }
};

/// Every decision currently on the trail.
inline LearntConstraint analyze_decision_based( const ImplicationGraph& g )
{
  LearntConstraint c;
  c.kind = ConstraintKind::DecisionBased;
  for ( auto n : g.decisions() )
    c.literals.push_back( detail::literal_of( g, n ) );
  if ( c.literals.empty() )
    throw EmptyTrail();
  return c;
}

/// First-UIP constraint. Starting from the conflict's direct reasons, the
/// latest literal at the conflict level is replaced by its antecedents until
/// a single conflict-level literal remains. Nodes for which `expand` holds
/// are always replaced, whatever their level.
template<class Expand = NoExpansion>
LearntConstraint analyze_uip( const ImplicationGraph& g, const Conflict& conflict, Expand expand = {} )
{
  const unsigned level = detail::conflict_level( g, conflict );
  if ( level == 0 )
    throw std::logic_error( "UIP analysis needs a conflict above level 0" );

  std::set<NodeId> lits( conflict.antecedents.begin(), conflict.antecedents.end() );
  std::size_t at_level = std::count_if( lits.begin(), lits.end(), [&]( NodeId n ) { return g.node( n ).level == level; } );

  while ( true )
  {
    NodeId pick = no_node;
    for ( auto it = lits.rbegin(); it != lits.rend(); ++it )
    {
      const auto& a = g.node( *it );
      if ( a.antecedents.empty() )
        continue;
      if ( ( a.level == level && at_level > 1 ) || expand( a ) )
      {
        pick = *it;
        break;
      }
    }
    if ( pick == no_node )
      break;
    lits.erase( pick );
    if ( g.node( pick ).level == level )
      --at_level;
    for ( auto p : g.node( pick ).antecedents )
      if ( lits.insert( p ).second && g.node( p ).level == level )
        ++at_level;
  }
  if ( at_level != 1 )
    throw std::logic_error( "UIP analysis ended with " + std::to_string( at_level ) + " conflict-level literals" );

  LearntConstraint c;
  c.kind = ConstraintKind::UipBased;
  for ( auto n : lits )
  {
    c.literals.push_back( detail::literal_of( g, n ) );
    if ( g.node( n ).level == level )
      c.uip = g.node( n ).gate;
  }
  return c;
}

/// Explanation of a conflict that happened with no decision made.
template<class Expand = NoExpansion>
LearntConstraint analyze_root( const ImplicationGraph& g, const Conflict& conflict, Expand expand = {} )
{
  std::set<NodeId> lits( conflict.antecedents.begin(), conflict.antecedents.end() );
  bool changed = true;
  while ( changed )
  {
    changed = false;
    for ( auto it = lits.rbegin(); it != lits.rend(); ++it )
    {
      const auto& a = g.node( *it );
      if ( !a.antecedents.empty() && expand( a ) )
      {
        auto n = *it;
        lits.erase( n );
        lits.insert( g.node( n ).antecedents.begin(), g.node( n ).antecedents.end() );
        changed = true;
        break;
      }
    }
  }
  LearntConstraint c;
  c.kind = ConstraintKind::Root;
  for ( auto n : lits )
    c.literals.push_back( detail::literal_of( g, n ) );
  return c;
}

/// Highest level among the non-UIP literals; 0 when the UIP stands alone.
inline unsigned backjump_level( const LearntConstraint& c )
{
  if ( c.kind != ConstraintKind::UipBased || !c.uip )
    throw std::logic_error( "backjump level is defined for UIP constraints" );
  unsigned level = 0;
  for ( const auto& l : c.literals )
    if ( l.gate != *c.uip )
      level = std::max( level, l.level );
  return level;
}

enum class ClauseState : std::uint8_t
{
  Open,
  Unit,
  Violated,
  Satisfied
};

struct ClauseCheck
{
  ClauseState state{ ClauseState::Open };
  std::size_t unit_literal = 0; // valid when state == Unit
};

/// Classifies a constraint against the current values. A literal matches
/// when its gate holds exactly the remembered value.
inline ClauseCheck check_constraint( const LearntConstraint& c, std::span<const Value5> values )
{
  std::size_t unassigned = 0, free_index = 0;
  for ( std::size_t i = 0; i < c.literals.size(); ++i )
  {
    auto v = values[c.literals[i].gate];
    if ( v == Value5::X )
    {
      ++unassigned;
      free_index = i;
    }
    else if ( v != c.literals[i].value )
      return { ClauseState::Satisfied, 0 };
  }
  if ( unassigned == 0 )
    return { ClauseState::Violated, 0 };
  if ( unassigned == 1 )
    return { ClauseState::Unit, free_index };
  return { ClauseState::Open, 0 };
}

struct ForcedAssignment
{
  GateId gate{};
  Value5 value{ Value5::X };
  std::size_t constraint = 0;
};

/// Learnt-constraint store with the usage-window forget rule.
class ClauseDb
{
public:
  static constexpr std::uint64_t keep_forever = std::numeric_limits<std::uint64_t>::max();

  explicit ClauseDb( std::uint64_t forget_n = 1000 ) : forget_n_( forget_n ) {}

  std::size_t size() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }
  const LearntConstraint& operator[]( std::size_t i ) const { return constraints_[i]; }
  std::span<const LearntConstraint> constraints() const { return constraints_; }
  std::uint64_t loop_counter() const { return loop_counter_; }
  std::uint64_t forget_n() const { return forget_n_; }

  std::size_t add( LearntConstraint c )
  {
    c.last_used = loop_counter_;
    constraints_.push_back( std::move( c ) );
    return constraints_.size() - 1;
  }

  void touch( std::size_t i ) { constraints_[i].last_used = loop_counter_; }

  /// One conflict-analysis round.
  void advance_loop() { ++loop_counter_; }

  /// Drops constraints unused for more than forget_n rounds; returns the
  /// number removed.
  std::size_t forget_pass()
  {
    if ( forget_n_ == keep_forever )
      return 0;
    auto before = constraints_.size();
    std::erase_if( constraints_, [this]( const LearntConstraint& c ) { return loop_counter_ - c.last_used > forget_n_; } );
    return before - constraints_.size();
  }

  /// Full scan for unit constraints. Only binary literals can be flipped, so
  /// a unit literal holding D or D' is left alone. Throws ConstraintViolated
  /// when every literal of some constraint matches.
  std::vector<ForcedAssignment> unit_imply( std::span<const Value5> values )
  {
    std::vector<ForcedAssignment> forced;
    for ( std::size_t i = 0; i < constraints_.size(); ++i )
    {
      auto chk = check_constraint( constraints_[i], values );
      if ( chk.state == ClauseState::Violated )
      {
        touch( i );
        throw ConstraintViolated( i );
      }
      if ( chk.state != ClauseState::Unit )
        continue;
      const auto& lit = constraints_[i].literals[chk.unit_literal];
      if ( !is_binary( lit.value ) )
        continue;
      touch( i );
      forced.push_back( { lit.gate, complement( lit.value ), i } );
    }
    return forced;
  }

private:
  std::vector<LearntConstraint> constraints_;
  std::uint64_t loop_counter_ = 0;
  std::uint64_t forget_n_;
};

/// Conflict-driven activity scores.
class VsidsState
{
public:
  VsidsState( std::size_t num_gates, double decay, double pick_probability, std::uint64_t seed, double bump = 1.0 )
      : score_( num_gates, 0.0 ), decay_( decay ), bump_( bump ), pick_probability_( pick_probability ), rng_( seed )
  {
    if ( decay < 0.0 || decay > 1.0 )
      throw std::invalid_argument( "VSIDS decay must lie in [0,1]" );
    if ( pick_probability < 0.0 || pick_probability > 1.0 )
      throw std::invalid_argument( "VSIDS pick probability must lie in [0,1]" );
  }

  double score( GateId g ) const { return score_[g]; }
  std::span<const double> scores() const { return score_; }
  double decay() const { return decay_; }
  double pick_probability() const { return pick_probability_; }

  /// Bump every gate of the constraint, then decay all scores.
  void bump_and_decay( const LearntConstraint& c )
  {
    for ( const auto& l : c.literals )
      score_[l.gate] += bump_;
    for ( auto& s : score_ )
      s *= decay_;
  }

  /// With probability pick_probability the best-scoring candidate (lowest id
  /// on ties), otherwise the structural choice. Draws exactly one number.
  GateId pick( GateId structural_choice, std::span<const GateId> candidates )
  {
    const double u = static_cast<double>( rng_() >> 11 ) * 0x1.0p-53;
    if ( candidates.empty() || !( u < pick_probability_ ) )
      return structural_choice;
    GateId best = candidates.front();
    for ( auto g : candidates )
      if ( score_[g] > score_[best] || ( score_[g] == score_[best] && g < best ) )
        best = g;
    return best;
  }

private:
  std::vector<double> score_;
  double decay_;
  double bump_;
  double pick_probability_;
  std::mt19937_64 rng_;
};

/// `KIND uip literal...` with each literal written as name=value@level.
inline std::string format_constraint( const Circuit& c, const LearntConstraint& lc )
{
  std::ostringstream os;
  os << constraint_kind_name( lc.kind ) << ' ' << ( lc.uip ? c.name( *lc.uip ) : std::string( "-" ) );
  for ( const auto& l : lc.literals )
    os << ' ' << c.name( l.gate ) << '=' << value_name( l.value ) << '@' << l.level;
  return os.str();
}

} // namespace cdsl
