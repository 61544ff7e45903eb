#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fault.hpp"
#include "implication_graph.hpp"
#include "learning.hpp"
#include "logic5.hpp"
#include "netlist.hpp"

namespace cdsl
{

struct VsidsConfig
{
  double decay = 0.95;
  double bump = 1.0;
  double pick_probability = 0.5;
};

enum class LearntKinds : std::uint8_t
{
  UipOnly,
  Both // UIP plus decision-based constraint on every conflict
};

struct EngineConfig
{
  std::uint64_t backtrack_limit = 100;
  bool learning_enabled = true;
  VsidsConfig vsids;
  std::uint64_t forget_n = 1000;
  std::uint64_t rng_seed = 1;
  std::uint64_t stage1_limit = 20;
  std::uint64_t stage2_limit = 100;
  LearntKinds learnt_kinds = LearntKinds::UipOnly;
  bool keep_history = false; // retain every constraint ever learnt

  void validate() const
  {
    if ( !( vsids.decay >= 0.0 && vsids.decay <= 1.0 ) )
      throw std::invalid_argument( "vsids decay must lie in [0,1]" );
    if ( !( vsids.pick_probability >= 0.0 && vsids.pick_probability <= 1.0 ) )
      throw std::invalid_argument( "vsids pick probability must lie in [0,1]" );
  }
};

/// Chosen decision point: an unassigned line and the value to try first.
struct DecisionPoint
{
  GateId gate{};
  Value5 value{ Value5::X };
};

enum class Outcome : std::uint8_t
{
  Continue,
  Untestable,
  Aborted
};

/// Search state for one fault: value map, frontiers, implication graph and
/// (when learning is on) the constraint database and activity scores.
///
/// Decisions are only taken on lines outside the fault's fanout region;
/// those carry plain binary values, so every decision has exactly one
/// alternative. Lines inside the region are set by forward implication.
class SearchState
{
public:
  SearchState( const Circuit& circuit, const Cone& cone, const Fault& fault, const EngineConfig& config,
               std::span<const PiConstraint> constraints = {} )
      : c_( circuit ), cone_( cone ), fault_( fault ), cfg_( config ), constraints_( constraints.begin(), constraints.end() ),
        values_( circuit.size(), Value5::X ), trail_( circuit.size() ), in_d_( circuit.size(), 0 ), in_j_( circuit.size(), 0 ),
        db_( config.forget_n ), occurs_( circuit.size() ),
        vsids_( circuit.size(), config.vsids.decay, config.vsids.pick_probability, config.rng_seed, config.vsids.bump )
  {
    cfg_.validate();
    if ( cone.fault_site != fault.site )
      throw std::invalid_argument( "cone was extracted for a different fault site" );
  }

  /* observers */

  Value5 value( GateId g ) const { return values_[g]; }
  std::span<const Value5> values() const { return values_; }
  const ImplicationGraph& trail() const { return trail_; }
  const std::set<GateId>& d_frontier() const { return d_frontier_; }
  const std::set<GateId>& j_frontier() const { return j_frontier_; }
  const ClauseDb& clause_db() const { return db_; }
  const VsidsState& vsids() const { return vsids_; }
  const SearchStats& stats() const { return stats_; }
  const std::vector<LearntConstraint>& history() const { return history_; }
  const Cone& cone() const { return cone_; }
  const Fault& fault() const { return fault_; }
  NodeId activation_node() const { return activation_; }

  /// True when some cone output carries D or D'.
  bool detected() const
  {
    return std::any_of( cone_.cone_pos.begin(), cone_.cone_pos.end(), [&]( GateId po ) { return is_fault_effect( values_[po] ); } );
  }

  /* operations */

  /// Puts the fault effect on the site at level 0 and applies the PI
  /// constraints. The activation requirement is queued on the J-frontier.
  void activate_fault()
  {
    if ( activated_ )
      throw std::logic_error( "fault already activated" );
    activated_ = true;
    activation_ = trail_.push_root( fault_.site, fault_.effect(), Reason::FaultActivation );
    values_[fault_.site] = fault_.effect();
    refresh_around( fault_.site );
    for ( const auto& pc : constraints_ )
    {
      if ( !cone_.contains( pc.pi ) )
        continue;
      if ( pc.pi == fault_.site )
      {
        if ( pc.value != fault_.effect_good() )
          pending_ = Conflict{ pc.pi, { activation_ } };
        continue;
      }
      if ( values_[pc.pi] != Value5::X )
        continue;
      trail_.push_root( pc.pi, from_bool( pc.value ), Reason::Constraint );
      values_[pc.pi] = from_bool( pc.value );
      refresh_around( pc.pi );
    }
  }

  /// Runs forward, backward and constraint-driven implications to a
  /// fixpoint. Returns the conflict when one is found.
  std::optional<Conflict> propagate()
  {
    if ( pending_ )
    {
      auto k = std::move( *pending_ );
      pending_.reset();
      return k;
    }
    while ( qhead_ < trail_.size() )
    {
      const auto g = trail_.node( static_cast<NodeId>( qhead_++ ) ).gate;
      if ( auto k = process( g ) )
        return k;
    }
    return std::nullopt;
  }

  /// When no fault effect can reach a cone output any more, the conflict
  /// made of the 0/1 lines that cut every path from the site.
  std::optional<Conflict> blocked_conflict() const
  {
    std::vector<char> seen( c_.size(), 0 );
    std::vector<GateId> stack{ fault_.site };
    std::vector<NodeId> cut;
    seen[fault_.site] = 1;
    while ( !stack.empty() )
    {
      auto g = stack.back();
      stack.pop_back();
      if ( c_.is_po( g ) )
        return std::nullopt;
      for ( auto h : c_.gate( g ).fanout )
      {
        if ( !cone_.contains( h ) || seen[h] )
          continue;
        seen[h] = 1;
        if ( is_binary( values_[h] ) )
          cut.push_back( trail_.node_of( h ) );
        else
          stack.push_back( h );
      }
    }
    if ( cut.empty() )
      cut.push_back( activation_ );
    return Conflict{ fault_.site, std::move( cut ) };
  }

  /// Decision points for the current objective; the first is the
  /// structural choice. With an open J-frontier the objective is its
  /// lowest-id gate and every X fanin is an alternative way to justify it.
  /// Otherwise the objective is the first D-frontier gate that still has an
  /// X-path to a cone output, and its backtraced line is the only candidate.
  std::vector<DecisionPoint> candidate_decisions() const
  {
    std::vector<DecisionPoint> out;
    if ( !j_frontier_.empty() )
    {
      for ( auto g : j_frontier_ )
      {
        auto first = justify_choice( g );
        if ( !first )
          continue;
        out.push_back( *first );
        for ( auto f : c_.gate( g ).fanin )
          if ( values_[f] == Value5::X && f != first->gate )
            out.push_back( { f, first->value } );
        return out;
      }
      return out;
    }
    auto viable = xpath_marks();
    for ( auto h : d_frontier_ )
      if ( viable[h] )
        if ( auto dp = propagate_choice( h ) )
        {
          out.push_back( *dp );
          return out;
        }
    return out;
  }

  /// Picks the next decision and pushes it at a new level. Returns nullopt
  /// when neither frontier offers an objective.
  std::optional<DecisionPoint> decide()
  {
    auto cands = candidate_decisions();
    if ( cands.empty() )
      return std::nullopt;
    DecisionPoint dp = cands.front();
    if ( cfg_.learning_enabled )
    {
      std::vector<GateId> gates;
      for ( const auto& c : cands )
        gates.push_back( c.gate );
      auto chosen = vsids_.pick( dp.gate, gates );
      dp = *std::find_if( cands.begin(), cands.end(), [&]( const DecisionPoint& c ) { return c.gate == chosen; } );
    }
    push_decision( dp.gate, dp.value );
    return dp;
  }

  /// Pushes a decision at a new level (also used to replay fixed
  /// decision sequences).
  void push_decision( GateId g, Value5 v )
  {
    if ( values_[g] != Value5::X )
      throw std::logic_error( "decision on an assigned line" );
    trail_.push_decision( g, v );
    values_[g] = v;
    refresh_around( g );
    ++stats_.decisions;
  }

  /// Plain D-algorithm backtrack: flip the latest decision. The flipped
  /// value is recorded as implied by the earlier decisions.
  Outcome backtrack_chrono()
  {
    const auto level = trail_.decision_level();
    if ( level == 0 )
      return Outcome::Untestable;
    if ( stats_.backtracks >= cfg_.backtrack_limit )
      return Outcome::Aborted;
    ++stats_.backtracks;
    const auto& d = trail_.node( trail_.level_start( level ) );
    const GateId gate = d.gate;
    const Value5 flipped = complement( d.value );
    std::vector<NodeId> ante{ activation_ };
    for ( unsigned l = 1; l < level; ++l )
      ante.push_back( trail_.level_start( l ) );
    pop_to( level - 1 );
    if ( auto k = assign( gate, flipped, std::move( ante ) ) )
      throw std::logic_error( "flip of a freshly unassigned line conflicted" );
    return Outcome::Continue;
  }

  /// Learns from the conflict and backjumps (learning mode) or falls back to
  /// chronological backtracking.
  Outcome resolve_conflict( const Conflict& k )
  {
    ++stats_.conflicts;
    if ( !cfg_.learning_enabled )
      return backtrack_chrono();

    const auto level = detail::conflict_level( trail_, k );
    auto expand = [this]( const Assignment& a ) { return a.reason == Reason::Implied && cone_.in_fanout_region( a.gate ); };
    if ( level == 0 )
    {
      record( analyze_root( trail_, k, expand ) );
      return Outcome::Untestable;
    }

    auto learnt = analyze_uip( trail_, k, expand );
    std::optional<LearntConstraint> by_decisions;
    if ( cfg_.learnt_kinds == LearntKinds::Both && trail_.decision_level() > 0 )
      by_decisions = analyze_decision_based( trail_ );

    db_.advance_loop();
    vsids_.bump_and_decay( learnt );
    const auto uip_index = record( learnt );
    std::optional<std::size_t> dec_index;
    if ( by_decisions )
      dec_index = record( std::move( *by_decisions ) );

    if ( stats_.backtracks >= cfg_.backtrack_limit )
      return Outcome::Aborted;
    ++stats_.backtracks;

    pop_to( backjump_level( learnt ) );
    const auto survivor = db_.size();
    db_.forget_pass();
    rebuild_occurrences();
    // The fresh constraints were used this round and survive the pass.
    const std::size_t shift = survivor - db_.size();
    const auto uip_pos = uip_index - shift;

    auto chk = check_constraint( db_[uip_pos], values_ );
    if ( chk.state != ClauseState::Unit || db_[uip_pos].literals[chk.unit_literal].gate != *learnt.uip )
      throw std::logic_error( "learnt constraint is not asserting after backjump" );
    ++stats_.asserting_checks;
    if ( auto conflict = fire( uip_pos, chk.unit_literal ) )
      throw std::logic_error( "asserting implication conflicted" );
    if ( dec_index )
    {
      const auto pos = *dec_index - shift;
      auto dchk = check_constraint( db_[pos], values_ );
      if ( dchk.state == ClauseState::Unit )
        if ( auto conflict = fire( pos, dchk.unit_literal ) )
          pending_ = std::move( conflict );
    }
    return Outcome::Continue;
  }

  /// Runs the whole search for this fault.
  AtpgResult run()
  {
    const auto t0 = std::chrono::steady_clock::now();
    AtpgResult r;
    r.fault = fault_;
    r.status = search();
    if ( r.status == Status::Testable )
      r.pattern = extract_pattern();
    stats_.learnt_count = learnt_total_;
    stats_.elapsed = std::chrono::duration_cast<std::chrono::microseconds>( std::chrono::steady_clock::now() - t0 );
    r.stats = stats_;
    return r;
  }

  /// Frontier sets rebuilt from scratch; must equal the incremental ones.
  std::pair<std::set<GateId>, std::set<GateId>> recompute_frontiers() const
  {
    std::set<GateId> d, j;
    for ( auto g : cone_.members )
    {
      if ( d_member( g ) )
        d.insert( g );
      if ( j_member( g ) )
        j.insert( g );
    }
    return { d, j };
  }

  /// PI assignment read off the current values; constrained PIs carry their
  /// constraint, unassigned ones X.
  Pattern extract_pattern() const
  {
    Pattern p;
    p.values.assign( c_.primary_inputs().size(), Tri::X );
    for ( auto pi : c_.primary_inputs() )
    {
      auto& slot = p.values[c_.pi_index( pi )];
      auto v = values_[pi];
      if ( cone_.contains( pi ) && v != Value5::X )
        slot = to_pair( v ).good;
    }
    for ( const auto& pc : constraints_ )
      if ( p.values[c_.pi_index( pc.pi )] == Tri::X )
        p.values[c_.pi_index( pc.pi )] = tri_from_bool( pc.value );
    return p;
  }

private:
  Status search()
  {
    activate_fault();
    while ( true )
    {
      auto k = propagate();
      if ( !k )
      {
        if ( j_frontier_.empty() && detected() )
          return Status::Testable;
        k = blocked_conflict();
        if ( !k )
        {
          if ( !decide() )
            throw std::logic_error( "no decision available on an open search branch" );
          continue;
        }
      }
      switch ( resolve_conflict( *k ) )
      {
      case Outcome::Continue: break;
      case Outcome::Untestable: return Status::Untestable;
      case Outcome::Aborted: return Status::Aborted;
      }
    }
  }

  std::size_t record( LearntConstraint c )
  {
    ++learnt_total_;
    if ( cfg_.keep_history )
      history_.push_back( c );
    auto i = db_.add( std::move( c ) );
    rebuild_occurrences();
    return i;
  }

  void rebuild_occurrences()
  {
    for ( auto& o : occurs_ )
      o.clear();
    for ( std::size_t i = 0; i < db_.size(); ++i )
    {
      if ( db_[i].kind == ConstraintKind::Root )
        continue;
      for ( const auto& l : db_[i].literals )
        occurs_[l.gate].push_back( static_cast<std::uint32_t>( i ) );
    }
  }

  bool good_requirement() const { return fault_.effect_good(); }

  /// Gates whose value must be justified by their fanins: assigned lines
  /// outside the fanout region, and the fault site (good value only).
  bool needs_justification( GateId g ) const
  {
    if ( c_.is_pi( g ) || !cone_.contains( g ) )
      return false;
    if ( g == fault_.site )
      return true;
    return !cone_.in_fanout_region( g ) && values_[g] != Value5::X;
  }

  bool required_value( GateId g ) const
  {
    return g == fault_.site ? good_requirement() : values_[g] == Value5::One;
  }

  Value5 eval_inputs( GateId g ) const
  {
    const auto& gate = c_.gate( g );
    scratch_.clear();
    for ( auto f : gate.fanin )
      scratch_.push_back( values_[f] );
    return eval_gate( gate.kind, scratch_ );
  }

  bool j_member( GateId g ) const
  {
    if ( !needs_justification( g ) )
      return false;
    return eval_inputs( g ) != from_bool( required_value( g ) );
  }

  bool d_member( GateId g ) const
  {
    if ( !cone_.contains( g ) || !cone_.in_fanout_region( g ) || g == fault_.site || values_[g] != Value5::X )
      return false;
    const auto& fanin = c_.gate( g ).fanin;
    return std::any_of( fanin.begin(), fanin.end(), [&]( GateId f ) { return is_fault_effect( values_[f] ); } );
  }

  void refresh( GateId g )
  {
    auto sync = [g]( std::set<GateId>& set, std::vector<char>& flag, bool member ) {
      if ( member == static_cast<bool>( flag[g] ) )
        return;
      flag[g] = member;
      if ( member )
        set.insert( g );
      else
        set.erase( g );
    };
    sync( d_frontier_, in_d_, d_member( g ) );
    sync( j_frontier_, in_j_, j_member( g ) );
  }

  void refresh_around( GateId g )
  {
    refresh( g );
    for ( auto h : c_.gate( g ).fanout )
      if ( cone_.contains( h ) )
        refresh( h );
  }

  void pop_to( unsigned level )
  {
    auto dropped = trail_.pop_to_level( level );
    for ( auto g : dropped )
      values_[g] = Value5::X;
    for ( auto g : dropped )
      refresh_around( g );
    qhead_ = std::min( qhead_, trail_.size() );
  }

  std::vector<NodeId> reason_of( GateId g ) const
  {
    const auto n = trail_.node_of( g );
    const auto& a = trail_.node( n );
    if ( a.antecedents.empty() )
      return { n };
    return a.antecedents;
  }

  std::optional<Conflict> assign( GateId g, Value5 v, std::vector<NodeId> ante )
  {
    const auto cur = values_[g];
    if ( cur == v )
      return std::nullopt;
    if ( cur != Value5::X )
    {
      auto extra = reason_of( g );
      ante.insert( ante.end(), extra.begin(), extra.end() );
      std::sort( ante.begin(), ante.end() );
      ante.erase( std::unique( ante.begin(), ante.end() ), ante.end() );
      return Conflict{ g, std::move( ante ) };
    }
    const auto id = trail_.push_implied( g, v, std::move( ante ) );
    if ( trail_.node( id ).level != trail_.decision_level() )
      throw std::logic_error( "implication below the current decision level" );
    values_[g] = v;
    refresh_around( g );
    return std::nullopt;
  }

  /// Smallest set of assigned fanins that fixes the gate's current output:
  /// one controlling input when available, else every assigned input.
  std::vector<NodeId> forward_reason( GateId g ) const
  {
    const auto& gate = c_.gate( g );
    if ( auto c = controlling_value( gate.kind ) )
    {
      NodeId best = no_node;
      for ( auto f : gate.fanin )
        if ( values_[f] == from_bool( *c ) )
          best = std::min( best, trail_.node_of( f ) );
      if ( best != no_node )
        return { best };
    }
    std::vector<NodeId> out;
    for ( auto f : gate.fanin )
      if ( values_[f] != Value5::X )
        out.push_back( trail_.node_of( f ) );
    return out;
  }

  std::optional<Conflict> process( GateId g )
  {
    const auto& gate = c_.gate( g );
    for ( auto h : gate.fanout )
    {
      if ( !cone_.contains( h ) )
        continue;
      if ( h == fault_.site )
      {
        auto good = eval_inputs( h );
        if ( good != Value5::X && good != from_bool( good_requirement() ) )
        {
          auto ante = forward_reason( h );
          ante.push_back( activation_ );
          return Conflict{ h, std::move( ante ) };
        }
        continue;
      }
      auto v = eval_inputs( h );
      if ( v == Value5::X || v == values_[h] )
        continue;
      if ( auto k = assign( h, v, forward_reason( h ) ) )
        return k;
    }

    if ( needs_justification( g ) )
      if ( auto k = backward( g ) )
        return k;
    for ( auto h : gate.fanout )
      if ( needs_justification( h ) && values_[h] != Value5::X )
        if ( auto k = backward( h ) )
          return k;

    if ( cfg_.learning_enabled )
    {
      // Copy: firing may not touch occurs_, but keep iteration stable.
      auto list = occurs_[g];
      for ( auto ci : list )
      {
        auto chk = check_constraint( db_[ci], values_ );
        if ( chk.state == ClauseState::Violated )
        {
          db_.touch( ci );
          Conflict k{ g, {} };
          for ( const auto& l : db_[ci].literals )
            k.antecedents.push_back( trail_.node_of( l.gate ) );
          return k;
        }
        if ( chk.state == ClauseState::Unit )
          if ( auto k = fire( ci, chk.unit_literal ) )
            return k;
      }
    }
    return std::nullopt;
  }

  /// Assigns the complement of the single open literal of a unit constraint.
  std::optional<Conflict> fire( std::size_t ci, std::size_t open )
  {
    const auto& lc = db_[ci];
    const auto& lit = lc.literals[open];
    if ( !is_binary( lit.value ) )
      return std::nullopt;
    std::vector<NodeId> ante;
    for ( std::size_t i = 0; i < lc.literals.size(); ++i )
      if ( i != open )
        ante.push_back( trail_.node_of( lc.literals[i].gate ) );
    if ( ante.empty() )
      ante.push_back( activation_ );
    db_.touch( ci );
    return assign( lit.gate, complement( lit.value ), std::move( ante ) );
  }

  /// Backward implication for a line whose value (or, at the site, good
  /// value) is not yet justified by its fanins.
  std::optional<Conflict> backward( GateId g )
  {
    const auto& gate = c_.gate( g );
    const bool req = required_value( g );
    const NodeId self = trail_.node_of( g );
    std::size_t unknown = 0;
    GateId open = 0;
    for ( auto f : gate.fanin )
      if ( values_[f] == Value5::X )
      {
        ++unknown;
        open = f;
      }
    if ( unknown == 0 )
      return std::nullopt;

    auto others = [&]( GateId skip ) {
      std::vector<NodeId> ante{ self };
      for ( auto f : gate.fanin )
        if ( f != skip )
          ante.push_back( trail_.node_of( f ) );
      return ante;
    };

    switch ( gate.kind )
    {
    case GateKind::Buf:
    case GateKind::Output:
      return assign( open, from_bool( req ), { self } );
    case GateKind::Not:
      return assign( open, from_bool( !req ), { self } );
    case GateKind::Xor:
    case GateKind::Xnor:
    {
      if ( unknown != 1 )
        return std::nullopt;
      bool parity = req ^ ( gate.kind == GateKind::Xnor );
      for ( auto f : gate.fanin )
        if ( f != open )
          parity ^= values_[f] == Value5::One;
      return assign( open, from_bool( parity ), others( open ) );
    }
    default:
      break;
    }

    const bool c = *controlling_value( gate.kind );
    const bool controlled_out = c ^ is_inverting( gate.kind );
    if ( req == controlled_out )
    {
      for ( auto f : gate.fanin )
        if ( values_[f] == from_bool( c ) )
          return std::nullopt;
      if ( unknown != 1 )
        return std::nullopt;
      return assign( open, from_bool( c ), others( open ) );
    }
    for ( auto f : gate.fanin )
      if ( values_[f] == Value5::X )
        if ( auto k = assign( f, from_bool( !c ), { self } ) )
          return k;
    return std::nullopt;
  }

  /// Lines of the fanout region (not 0/1) from which a cone output is
  /// reachable through lines that are not 0/1.
  std::vector<char> xpath_marks() const
  {
    std::vector<char> mark( c_.size(), 0 );
    std::vector<GateId> stack;
    for ( auto po : cone_.cone_pos )
      if ( !is_binary( values_[po] ) )
      {
        mark[po] = 1;
        stack.push_back( po );
      }
    while ( !stack.empty() )
    {
      auto g = stack.back();
      stack.pop_back();
      for ( auto f : c_.gate( g ).fanin )
        if ( !mark[f] && cone_.in_fanout_region( f ) && !is_binary( values_[f] ) )
        {
          mark[f] = 1;
          stack.push_back( f );
        }
    }
    return mark;
  }

  /// Justification objective: first X fanin, controlling value first.
  std::optional<DecisionPoint> justify_choice( GateId g ) const
  {
    const auto& gate = c_.gate( g );
    const bool req = required_value( g );
    for ( auto f : gate.fanin )
    {
      if ( values_[f] != Value5::X )
        continue;
      bool want = false;
      switch ( gate.kind )
      {
      case GateKind::Buf:
      case GateKind::Output: want = req; break;
      case GateKind::Not: want = !req; break;
      case GateKind::Xor:
      case GateKind::Xnor: want = false; break;
      default:
      {
        const bool c = *controlling_value( gate.kind );
        want = ( req == ( c ^ is_inverting( gate.kind ) ) ) ? c : !c;
      }
      }
      return DecisionPoint{ f, from_bool( want ) };
    }
    return std::nullopt;
  }

  /// Propagation objective: first X side input set non-controlling, traced
  /// back through the fanout region to an unassigned outside line.
  std::optional<DecisionPoint> propagate_choice( GateId h ) const
  {
    const auto& gate = c_.gate( h );
    for ( auto s : gate.fanin )
    {
      if ( values_[s] != Value5::X )
        continue;
      bool want = false;
      if ( auto c = controlling_value( gate.kind ) )
        want = !*c;
      return backtrace( s, want );
    }
    return std::nullopt;
  }

  std::optional<DecisionPoint> backtrace( GateId s, bool want ) const
  {
    while ( cone_.in_fanout_region( s ) )
    {
      const auto& gate = c_.gate( s );
      GateId next = s;
      bool found = false;
      for ( auto f : gate.fanin )
        if ( values_[f] == Value5::X )
        {
          next = f;
          found = true;
          break;
        }
      if ( !found )
        return std::nullopt;
      switch ( gate.kind )
      {
      case GateKind::Buf:
      case GateKind::Output: break;
      case GateKind::Not: want = !want; break;
      case GateKind::Xor:
      case GateKind::Xnor:
      {
        bool parity = want ^ ( gate.kind == GateKind::Xnor );
        for ( auto f : gate.fanin )
          if ( f != next )
            parity ^= to_pair( values_[f] ).good == Tri::One;
        want = parity;
        break;
      }
      default:
      {
        const bool c = *controlling_value( gate.kind );
        const bool pre = want ^ is_inverting( gate.kind );
        want = pre == c ? c : !c;
      }
      }
      s = next;
    }
    return DecisionPoint{ s, from_bool( want ) };
  }

  const Circuit& c_;
  const Cone& cone_;
  Fault fault_;
  EngineConfig cfg_;
  std::vector<PiConstraint> constraints_;

  std::vector<Value5> values_;
  ImplicationGraph trail_;
  std::size_t qhead_ = 0;
  NodeId activation_ = no_node;
  bool activated_ = false;
  std::optional<Conflict> pending_;

  std::set<GateId> d_frontier_, j_frontier_;
  std::vector<char> in_d_, in_j_;

  ClauseDb db_;
  std::vector<std::vector<std::uint32_t>> occurs_;
  VsidsState vsids_;
  std::vector<LearntConstraint> history_;
  std::uint64_t learnt_total_ = 0;

  SearchStats stats_;
  mutable std::vector<Value5> scratch_;
};

/// Everything a finished search leaves behind.
struct FaultRun
{
  AtpgResult result;
  std::vector<LearntConstraint> constraints; // database at the end
  std::vector<LearntConstraint> history;     // every constraint learnt (keep_history)
  std::vector<Value5> final_values;
};

inline FaultRun search_fault( const Circuit& circuit, const Cone& cone, const Fault& fault, const EngineConfig& config,
                              std::span<const PiConstraint> constraints = {} )
{
  SearchState state( circuit, cone, fault, config, constraints );
  FaultRun run;
  run.result = state.run();
  auto db = state.clause_db().constraints();
  run.constraints.assign( db.begin(), db.end() );
  run.history = state.history();
  run.final_values.assign( state.values().begin(), state.values().end() );
  return run;
}

inline AtpgResult run_fault( const Circuit& circuit, const Cone& cone, const Fault& fault, const EngineConfig& config,
                             std::span<const PiConstraint> constraints = {} )
{
  return search_fault( circuit, cone, fault, config, constraints ).result;
}

/// Extracts the cone first; a site that reaches no output is reported
/// untestable without searching.
inline AtpgResult run_fault( const Circuit& circuit, const Fault& fault, const EngineConfig& config,
                             std::span<const PiConstraint> constraints = {} )
{
  try
  {
    auto cone = extract_cone( circuit, fault.site );
    return run_fault( circuit, cone, fault, config, constraints );
  }
  catch ( const UnreachableFaultError& )
  {
    AtpgResult r;
    r.fault = fault;
    r.status = Status::Untestable;
    return r;
  }
}

/// Runs every fault, optionally over `jobs` worker threads. Results follow
/// the input order.
inline std::vector<AtpgResult> run_faults( const Circuit& circuit, std::span<const Fault> faults, const EngineConfig& config,
                                           std::span<const PiConstraint> constraints = {}, unsigned jobs = 1 )
{
  config.validate();
  std::vector<AtpgResult> results( faults.size() );
  if ( jobs <= 1 || faults.size() < 2 )
  {
    for ( std::size_t i = 0; i < faults.size(); ++i )
      results[i] = run_fault( circuit, faults[i], config, constraints );
    return results;
  }
  std::atomic<std::size_t> next{ 0 };
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{ false };
  for ( unsigned t = 0; t < std::min<std::size_t>( jobs, faults.size() ); ++t )
    pool.emplace_back( [&] {
      try
      {
        for ( auto i = next++; i < faults.size() && !failed; i = next++ )
          results[i] = run_fault( circuit, faults[i], config, constraints );
      }
      catch ( ... )
      {
        if ( !failed.exchange( true ) )
          error = std::current_exception();
      }
    } );
  for ( auto& t : pool )
    t.join();
  if ( error )
    std::rethrow_exception( error );
  return results;
}

/// Stage 1 without learning at the small limit; stage 2 retries only the
/// aborted faults with learning at the larger limit.
inline std::vector<AtpgResult> run_two_stage( const Circuit& circuit, std::span<const Fault> faults, const EngineConfig& config,
                                              std::span<const PiConstraint> constraints = {}, unsigned jobs = 1 )
{
  if ( config.stage1_limit >= config.stage2_limit )
    throw std::invalid_argument( "stage-1 limit must be below the stage-2 limit" );
  auto first = config;
  first.learning_enabled = false;
  first.backtrack_limit = config.stage1_limit;
  auto results = run_faults( circuit, faults, first, constraints, jobs );

  std::vector<Fault> retry;
  std::vector<std::size_t> where;
  for ( std::size_t i = 0; i < results.size(); ++i )
    if ( results[i].status == Status::Aborted )
    {
      retry.push_back( faults[i] );
      where.push_back( i );
    }
  auto second = config;
  second.learning_enabled = true;
  second.backtrack_limit = config.stage2_limit;
  auto again = run_faults( circuit, retry, second, constraints, jobs );
  for ( std::size_t k = 0; k < again.size(); ++k )
    results[where[k]] = again[k];
  return results;
}

} // namespace cdsl
