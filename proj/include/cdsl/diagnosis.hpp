#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "engine.hpp"
#include "fault.hpp"
#include "learning.hpp"
#include "netlist.hpp"

namespace cdsl
{

enum class Suggestion : std::uint8_t
{
  Relax,
  AddOpposite
};

inline std::string_view suggestion_name( Suggestion s )
{
  return s == Suggestion::Relax ? "RELAX" : "ADD_OPPOSITE";
}

struct GateScore
{
  GateId gate{};
  std::size_t frequency = 0;

  bool operator==( const GateScore& ) const = default;
};

struct ImplicatedPi
{
  GateId pi{};
  Tri alpha{ Tri::X }; // value in the failed search's final assignment
  Suggestion suggestion{ Suggestion::Relax };
  bool applicable = true; // ADD_OPPOSITE needs a concrete alpha
};

class EmptyDb : public std::runtime_error
{
public:
  EmptyDb() : std::runtime_error( "no learnt constraints to diagnose" ) {}
};

/// Number of constraints mentioning each gate, most frequent first, ties by
/// lowest id.
inline std::vector<GateScore> score_gates( std::span<const LearntConstraint> db )
{
  if ( db.empty() )
    throw EmptyDb();
  std::map<GateId, std::size_t> freq;
  for ( const auto& lc : db )
  {
    std::vector<GateId> seen;
    for ( const auto& l : lc.literals )
      if ( std::find( seen.begin(), seen.end(), l.gate ) == seen.end() )
      {
        seen.push_back( l.gate );
        ++freq[l.gate];
      }
  }
  std::vector<GateScore> out;
  for ( auto [g, n] : freq )
    out.push_back( { g, n } );
  std::stable_sort( out.begin(), out.end(), []( const GateScore& a, const GateScore& b ) { return a.frequency > b.frequency; } );
  return out;
}

/// PIs in the transitive fanin of the top gates, ascending id. Constrained
/// ones are to be relaxed; the others get a constraint opposite to alpha.
inline std::vector<ImplicatedPi> trace_to_constraints( const Circuit& c, std::span<const PiConstraint> constraints,
                                                       std::span<const GateId> top_gates, std::span<const Value5> final_values = {} )
{
  if ( top_gates.empty() )
    throw std::invalid_argument( "trace needs at least one gate" );
  std::vector<char> seen( c.size(), 0 );
  std::vector<GateId> stack( top_gates.begin(), top_gates.end() );
  for ( auto g : stack )
    seen[g] = 1;
  std::vector<GateId> pis;
  while ( !stack.empty() )
  {
    auto g = stack.back();
    stack.pop_back();
    if ( c.is_pi( g ) )
      pis.push_back( g );
    for ( auto f : c.gate( g ).fanin )
      if ( !seen[f] )
      {
        seen[f] = 1;
        stack.push_back( f );
      }
  }
  std::sort( pis.begin(), pis.end() );

  std::vector<ImplicatedPi> out;
  for ( auto pi : pis )
  {
    ImplicatedPi ip{ pi };
    if ( pi < final_values.size() && final_values[pi] != Value5::X )
      ip.alpha = to_pair( final_values[pi] ).good;
    auto it = std::find_if( constraints.begin(), constraints.end(), [pi]( const PiConstraint& pc ) { return pc.pi == pi; } );
    if ( it != constraints.end() )
    {
      if ( ip.alpha == Tri::X )
        ip.alpha = tri_from_bool( it->value );
      ip.suggestion = Suggestion::Relax;
    }
    else
    {
      ip.suggestion = Suggestion::AddOpposite;
      ip.applicable = ip.alpha != Tri::X;
    }
    out.push_back( ip );
  }
  return out;
}

/// New constraint set: relaxed PIs removed, opposite-value constraints added
/// for applicable ADD_OPPOSITE entries.
inline std::vector<PiConstraint> apply_suggestions( std::span<const PiConstraint> constraints, std::span<const ImplicatedPi> implicated )
{
  std::vector<PiConstraint> out;
  for ( const auto& pc : constraints )
  {
    bool relaxed = std::any_of( implicated.begin(), implicated.end(),
                                [&]( const ImplicatedPi& ip ) { return ip.pi == pc.pi && ip.suggestion == Suggestion::Relax; } );
    if ( !relaxed )
      out.push_back( pc );
  }
  for ( const auto& ip : implicated )
    if ( ip.suggestion == Suggestion::AddOpposite && ip.applicable )
      out.push_back( { ip.pi, ip.alpha == Tri::Zero } );
  return out;
}

struct DiagnosisReport
{
  Fault fault;
  Status before{ Status::Aborted };
  std::vector<GateScore> gate_scores;
  std::size_t top_k = 5;
  std::vector<ImplicatedPi> implicated_pis;
  std::vector<PiConstraint> suggested_constraints;
  std::optional<AtpgResult> rerun;
};

/// The learning search used for diagnosis: stage-2 limit, learning on.
inline EngineConfig diagnosis_config( const EngineConfig& config )
{
  auto cfg = config;
  cfg.learning_enabled = true;
  cfg.backtrack_limit = config.stage2_limit;
  cfg.keep_history = true;
  return cfg;
}

/// Runs the failing search, ranks the gates of every constraint it learnt,
/// traces the top-k to PIs and (when `rerun`) retries under the suggested
/// constraints. The caller's constraint list is never modified.
inline DiagnosisReport diagnose( const Circuit& c, const Fault& fault, const EngineConfig& config, std::span<const PiConstraint> constraints,
                                 std::size_t top_k = 5, bool rerun = true )
{
  DiagnosisReport rep;
  rep.fault = fault;
  rep.top_k = top_k;
  const auto cfg = diagnosis_config( config );

  Cone cone;
  try
  {
    cone = extract_cone( c, fault.site );
  }
  catch ( const UnreachableFaultError& )
  {
    rep.before = Status::Untestable;
    rep.suggested_constraints.assign( constraints.begin(), constraints.end() );
    if ( rerun )
      rep.rerun = AtpgResult{ fault, Status::Untestable, std::nullopt, {} };
    return rep;
  }
  auto run = search_fault( c, cone, fault, cfg, constraints );
  rep.before = run.result.status;
  if ( rep.before == Status::Testable )
    return rep;
  if ( run.history.empty() )
  {
    // Nothing learnt, so nothing to trace: the rerun repeats the search.
    rep.suggested_constraints.assign( constraints.begin(), constraints.end() );
    if ( rerun )
      rep.rerun = run.result;
    return rep;
  }

  rep.gate_scores = score_gates( run.history );
  std::vector<GateId> top;
  for ( std::size_t i = 0; i < std::min( top_k, rep.gate_scores.size() ); ++i )
    top.push_back( rep.gate_scores[i].gate );
  rep.implicated_pis = trace_to_constraints( c, constraints, top, run.final_values );
  rep.suggested_constraints = apply_suggestions( constraints, rep.implicated_pis );
  if ( rerun )
    rep.rerun = run_fault( c, cone, fault, cfg, rep.suggested_constraints );
  return rep;
}

inline DiagnosisReport diagnose_and_rerun( const Circuit& c, const Fault& fault, const EngineConfig& config,
                                           std::span<const PiConstraint> constraints, std::size_t top_k = 5 )
{
  return diagnose( c, fault, config, constraints, top_k, true );
}

inline nlohmann::json to_json( const Circuit& c, const DiagnosisReport& r )
{
  nlohmann::json j;
  j["fault"] = fault_name( c, r.fault );
  j["status"] = status_name( r.before );
  j["top_k"] = r.top_k;
  j["gates"] = nlohmann::json::array();
  for ( const auto& gs : r.gate_scores )
    j["gates"].push_back( { { "gate", c.name( gs.gate ) }, { "frequency", gs.frequency } } );
  j["implicated_pis"] = nlohmann::json::array();
  for ( const auto& ip : r.implicated_pis )
    j["implicated_pis"].push_back( { { "pi", c.name( ip.pi ) },
                                     { "alpha", std::string( 1, tri_char( ip.alpha ) ) },
                                     { "suggestion", suggestion_name( ip.suggestion ) },
                                     { "applicable", ip.applicable } } );
  j["suggested_constraints"] = nlohmann::json::array();
  for ( const auto& pc : r.suggested_constraints )
    j["suggested_constraints"].push_back( c.name( pc.pi ) + ( pc.value ? "=1" : "=0" ) );
  if ( r.rerun )
  {
    j["rerun"] = { { "status", status_name( r.rerun->status ) },
                   { "pattern", r.rerun->pattern ? r.rerun->pattern->str() : std::string() },
                   { "backtracks", r.rerun->stats.backtracks } };
  }
  else
    j["rerun"] = nullptr;
  return j;
}

} // namespace cdsl
