#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace cdsl;
using cdsl::test::id;

namespace
{

LearntConstraint over( std::initializer_list<GateId> gates )
{
  LearntConstraint lc;
  for ( auto g : gates )
    lc.literals.push_back( { g, Value5::One, 1 } );
  return lc;
}

} // namespace

TEST( ScoreGates, CountsConstraintsNotLiterals )
{
  std::vector<LearntConstraint> db{ over( { 7, 1 } ), over( { 7, 2 } ), over( { 3 } ), over( { 7, 3 } ), over( { 4 } ) };
  auto s = score_gates( db );
  std::vector<GateScore> want{ { 7, 3 }, { 3, 2 }, { 1, 1 }, { 2, 1 }, { 4, 1 } };
  EXPECT_EQ( s, want );
}

TEST( ScoreGates, DuplicateLiteralCountsOnce )
{
  LearntConstraint lc = over( { 5, 5 } );
  std::vector<LearntConstraint> db{ lc };
  EXPECT_EQ( score_gates( db ), ( std::vector<GateScore>{ { 5, 1 } } ) );
}

TEST( ScoreGates, EmptyDbThrows )
{
  EXPECT_THROW( score_gates( {} ), EmptyDb );
}

TEST( Trace, SuggestionKinds )
{
  auto c = test::load_data( "masking.bench" );
  std::vector<PiConstraint> cons{ { id( c, "p" ), false } };
  std::vector<Value5> finals( c.size(), Value5::X );
  finals[id( c, "d" )] = Value5::One;

  std::vector<GateId> k{ id( c, "k" ) };
  auto ips = trace_to_constraints( c, cons, k, finals );
  ASSERT_EQ( ips.size(), 2u );
  for ( const auto& ip : ips )
  {
    if ( ip.pi == id( c, "p" ) )
    {
      EXPECT_EQ( ip.suggestion, Suggestion::Relax );
      EXPECT_EQ( ip.alpha, Tri::Zero );
    }
    else
    {
      EXPECT_EQ( ip.pi, id( c, "d" ) );
      EXPECT_EQ( ip.suggestion, Suggestion::AddOpposite );
      EXPECT_EQ( ip.alpha, Tri::One );
      EXPECT_TRUE( ip.applicable );
    }
  }
  auto next = apply_suggestions( cons, ips );
  EXPECT_EQ( next, ( std::vector<PiConstraint>{ { id( c, "d" ), false } } ) );

  // Unconstrained PIs with an X alpha are listed but not applied.
  std::vector<GateId> g{ id( c, "g" ) };
  auto ga = trace_to_constraints( c, cons, g, finals );
  ASSERT_EQ( ga.size(), 3u );
  for ( const auto& ip : ga )
  {
    EXPECT_EQ( ip.suggestion, Suggestion::AddOpposite );
    EXPECT_FALSE( ip.applicable );
  }
  EXPECT_EQ( apply_suggestions( cons, ga ), cons );
}

TEST( Trace, PiImplicatesItself )
{
  auto c = test::load_data( "masking.bench" );
  std::vector<GateId> top{ id( c, "e" ) };
  auto ips = trace_to_constraints( c, {}, top );
  ASSERT_EQ( ips.size(), 1u );
  EXPECT_EQ( ips[0].pi, id( c, "e" ) );
  EXPECT_THROW( trace_to_constraints( c, {}, {} ), std::invalid_argument );
}

TEST( Diagnose, MaskingFixtureEverySeed )
{
  auto c = test::load_data( "masking.bench" );
  auto cons = parse_constraints( c, read_file( test::data( "masking.constraints" ) ) );
  auto f = parse_fault_list( c, read_file( test::data( "masking.faults" ) ) ).at( 0 );
  EXPECT_EQ( exhaustive_classify( c, f, cons ).status, Status::Untestable );
  EXPECT_EQ( exhaustive_classify( c, f ).status, Status::Testable );
  for ( std::uint64_t seed = 1; seed <= 25; ++seed )
  {
    EngineConfig cfg;
    cfg.rng_seed = seed;
    auto rep = diagnose_and_rerun( c, f, cfg, cons );
    EXPECT_EQ( rep.before, Status::Untestable );
    auto it = std::find_if( rep.implicated_pis.begin(), rep.implicated_pis.end(), [&]( const ImplicatedPi& ip ) { return ip.pi == id( c, "p" ); } );
    ASSERT_NE( it, rep.implicated_pis.end() ) << "seed " << seed;
    EXPECT_EQ( it->suggestion, Suggestion::Relax );
    ASSERT_TRUE( rep.rerun );
    EXPECT_EQ( rep.rerun->status, Status::Testable );
    ASSERT_TRUE( rep.rerun->pattern );
    EXPECT_TRUE( detects( c, *rep.rerun->pattern, f ) );
    for ( std::size_t i = 1; i < rep.gate_scores.size(); ++i )
      EXPECT_GE( rep.gate_scores[i - 1].frequency, rep.gate_scores[i].frequency );
    for ( const auto& ip : rep.implicated_pis )
      EXPECT_TRUE( c.is_pi( ip.pi ) );
  }
}

TEST( Diagnose, RedundantStaysUntestable )
{
  auto c = test::load_data( "redundant.bench" );
  auto f = parse_fault( c, "t3/0" );
  auto rep = diagnose_and_rerun( c, f, EngineConfig{}, {} );
  EXPECT_EQ( rep.before, Status::Untestable );
  ASSERT_TRUE( rep.rerun );
  EXPECT_EQ( rep.rerun->status, Status::Untestable );
}

TEST( Diagnose, TopKClamp )
{
  auto c = test::load_data( "masking.bench" );
  auto cons = parse_constraints( c, "p=0" );
  auto f = parse_fault( c, "g/0" );
  auto all = diagnose( c, f, EngineConfig{}, cons, 1000, false );
  EXPECT_FALSE( all.rerun );
  ASSERT_FALSE( all.gate_scores.empty() );
  std::vector<GateId> every;
  for ( const auto& gs : all.gate_scores )
    every.push_back( gs.gate );
  auto ips = trace_to_constraints( c, cons, every );
  ASSERT_EQ( all.implicated_pis.size(), ips.size() );
  for ( std::size_t i = 0; i < ips.size(); ++i )
    EXPECT_EQ( all.implicated_pis[i].pi, ips[i].pi );
}

TEST( Diagnose, CallerConstraintsUntouchedAndReplayable )
{
  auto c = test::load_data( "masking.bench" );
  const auto cons = parse_constraints( c, "p=0" );
  auto copy = cons;
  auto f = parse_fault( c, "g/0" );
  EngineConfig cfg;
  auto before = run_fault( c, f, cfg, cons );
  diagnose_and_rerun( c, f, cfg, copy );
  EXPECT_EQ( copy, cons );
  auto after = run_fault( c, f, cfg, cons );
  EXPECT_EQ( before.status, after.status );
  EXPECT_EQ( before.stats.decisions, after.stats.decisions );
  EXPECT_EQ( before.stats.backtracks, after.stats.backtracks );
  EXPECT_EQ( before.stats.learnt_count, after.stats.learnt_count );
}

TEST( Diagnose, TestableFaultHasNothingToDiagnose )
{
  auto c = test::load_data( "masking.bench" );
  auto rep = diagnose_and_rerun( c, parse_fault( c, "g/0" ), EngineConfig{}, {} );
  EXPECT_EQ( rep.before, Status::Testable );
  EXPECT_TRUE( rep.gate_scores.empty() );
  EXPECT_FALSE( rep.rerun );
}

TEST( Diagnose, JsonShape )
{
  auto c = test::load_data( "masking.bench" );
  auto cons = parse_constraints( c, "p=0" );
  auto j = to_json( c, diagnose_and_rerun( c, parse_fault( c, "g/0" ), EngineConfig{}, cons ) );
  EXPECT_EQ( j["fault"], "g/0" );
  EXPECT_EQ( j["status"], "UNTESTABLE" );
  EXPECT_EQ( j["top_k"], 5 );
  EXPECT_TRUE( j["gates"].is_array() );
  EXPECT_EQ( j["rerun"]["status"], "TESTABLE" );
  bool relax = false;
  for ( const auto& ip : j["implicated_pis"] )
    relax = relax || ( ip["pi"] == "p" && ip["suggestion"] == "RELAX" );
  EXPECT_TRUE( relax );
}
