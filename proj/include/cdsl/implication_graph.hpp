#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "logic5.hpp"
#include "netlist.hpp"

namespace cdsl
{

using NodeId = std::uint32_t;
inline constexpr NodeId no_node = std::numeric_limits<NodeId>::max();

enum class Reason : std::uint8_t
{
  Decision,
  Implied,
  FaultActivation,
  Constraint // external PI constraint, level 0
};

struct Assignment
{
  GateId gate{};
  Value5 value{ Value5::X };
  unsigned level = 0;
  Reason reason{ Reason::Decision };
  std::vector<NodeId> antecedents;
};

/// The trail of assignments. Edges run from each antecedent to the node it
/// implied; decision and root nodes have none.
class ImplicationGraph
{
public:
  ImplicationGraph() = default;
  explicit ImplicationGraph( std::size_t num_gates ) : node_of_( num_gates, no_node ) {}

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const Assignment& node( NodeId id ) const { return nodes_[id]; }
  std::span<const Assignment> nodes() const { return nodes_; }

  unsigned decision_level() const { return static_cast<unsigned>( level_start_.size() ); }

  /// Trail position of the decision that opened `level` (level >= 1).
  NodeId level_start( unsigned level ) const { return level_start_.at( level - 1 ); }

  NodeId node_of( GateId g ) const { return g < node_of_.size() ? node_of_[g] : no_node; }

  /// Assignments that hold regardless of decisions (fault activation,
  /// external constraints).
  NodeId push_root( GateId gate, Value5 value, Reason reason )
  {
    if ( reason == Reason::Decision || reason == Reason::Implied )
      throw std::logic_error( "root node needs an activation or constraint reason" );
    if ( decision_level() != 0 )
      throw std::logic_error( "root nodes live at level 0" );
    return append( { gate, value, 0, reason, {} } );
  }

  NodeId push_decision( GateId gate, Value5 value )
  {
    level_start_.push_back( static_cast<NodeId>( nodes_.size() ) );
    return append( { gate, value, decision_level(), Reason::Decision, {} } );
  }

  /// The level is the highest antecedent level.
  NodeId push_implied( GateId gate, Value5 value, std::vector<NodeId> antecedents )
  {
    if ( antecedents.empty() )
      throw std::logic_error( "implied assignment without antecedents" );
    unsigned level = 0;
    for ( auto a : antecedents )
    {
      if ( a >= nodes_.size() )
        throw std::logic_error( "antecedent does not precede its consequent" );
      level = std::max( level, nodes_[a].level );
    }
    std::sort( antecedents.begin(), antecedents.end() );
    antecedents.erase( std::unique( antecedents.begin(), antecedents.end() ), antecedents.end() );
    return append( { gate, value, level, Reason::Implied, std::move( antecedents ) } );
  }

  /// Drops every node above `level`; returns the dropped gates, newest first.
  std::vector<GateId> pop_to_level( unsigned level )
  {
    std::vector<GateId> dropped;
    if ( level >= decision_level() )
      return dropped;
    auto cut = level_start_[level];
    for ( auto i = nodes_.size(); i > cut; --i )
    {
      auto g = nodes_[i - 1].gate;
      if ( g < node_of_.size() )
        node_of_[g] = no_node;
      dropped.push_back( g );
    }
    nodes_.resize( cut );
    level_start_.resize( level );
    return dropped;
  }

  std::vector<NodeId> decisions() const
  {
    std::vector<NodeId> out;
    for ( NodeId i = 0; i < nodes_.size(); ++i )
      if ( nodes_[i].reason == Reason::Decision )
        out.push_back( i );
    return out;
  }

private:
  NodeId append( Assignment a )
  {
    auto id = static_cast<NodeId>( nodes_.size() );
    if ( a.gate >= node_of_.size() )
      node_of_.resize( a.gate + 1, no_node );
    if ( node_of_[a.gate] != no_node )
      throw std::logic_error( "gate assigned twice on the trail" );
    node_of_[a.gate] = id;
    nodes_.push_back( std::move( a ) );
    return id;
  }

  std::vector<Assignment> nodes_;
  std::vector<NodeId> level_start_;
  std::vector<NodeId> node_of_;
};

/// A contradiction together with the assignments that caused it.
struct Conflict
{
  GateId gate{};
  std::vector<NodeId> antecedents;
};

} // namespace cdsl
