// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. Thresholds are fixed here.

#include "reference.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace cdsl;
using namespace cdsl::ref;
using Clock = std::chrono::steady_clock;

namespace
{

constexpr double algebra_budget_s = 1.0;
constexpr std::size_t uip_graphs = 1000;
constexpr std::size_t soundness_min_faults = 100;
constexpr std::size_t soundness_pi_limit = 16;
constexpr double trend_min_reduction = 0.10;
constexpr double trend_budget_s = 300.0;
constexpr std::uint64_t matched_limit = 100;
constexpr std::uint64_t seeds = 25;
constexpr unsigned timing_repeats = 5;

const std::vector<std::string> suite{ "c17", "prio27", "sec32", "sec32n", "secded16", "alu8", "mult8", "mult16", "rr_a", "rr_b", "rr_c" };

double seconds_since( Clock::time_point t0 ) { return std::chrono::duration<double>( Clock::now() - t0 ).count(); }

struct Verdict
{
  bool pass = false;
  std::string detail;
};

int failures = 0;
double suite_seconds = 0.0; // both modes over the whole suite

void report( const std::string& name, const std::function<Verdict()>& check )
{
  const auto t0 = Clock::now();
  Verdict v;
  try
  {
    v = check();
  }
  catch ( const std::exception& e )
  {
    v = { false, std::string( "exception: " ) + e.what() };
  }
  failures += !v.pass;
  std::cout << ( v.pass ? "PASS " : "FAIL " ) << name << ": " << v.detail << " [" << std::fixed << std::setprecision( 2 )
            << seconds_since( t0 ) << "s]" << std::endl;
}

struct Bench
{
  std::string name;
  Circuit circuit;
  std::vector<Fault> faults;
  std::vector<AtpgResult> plain, cdsl;
};

std::vector<Bench>& benches()
{
  static std::vector<Bench> all = [] {
    std::vector<Bench> out;
    for ( const auto& n : suite )
    {
      Bench b{ n, test::load_bench( n ), {}, {}, {} };
      b.faults = enumerate_faults( b.circuit );
      EngineConfig plain;
      plain.learning_enabled = false;
      plain.backtrack_limit = matched_limit;
      EngineConfig cdsl;
      cdsl.backtrack_limit = matched_limit;
      b.plain = run_faults( b.circuit, b.faults, plain );
      b.cdsl = run_faults( b.circuit, b.faults, cdsl );
      out.push_back( std::move( b ) );
    }
    return out;
  }();
  return all;
}

std::optional<Cone> cone_of( const Circuit& c, const Fault& f )
{
  try
  {
    return extract_cone( c, f.site );
  }
  catch ( const UnreachableFaultError& )
  {
    return std::nullopt;
  }
}

Verdict worked_example()
{
  WorkedGraph f;
  auto lc = analyze_uip( f.g, f.conflict );
  std::set<std::pair<GateId, unsigned>> want{ { id( f.c, "x0" ), 1 }, { id( f.c, "x2" ), 3 }, { id( f.c, "z1" ), 3 },
                                              { id( f.c, "x3" ), 4 }, { id( f.c, "x5" ), 4 }, { id( f.c, "x4" ), 5 } };
  const unsigned x3_level = f.g.node( f.g.node_of( id( f.c, "x3" ) ) ).level;
  bool ok = lit_set( lc ) == want && lc.uip && *lc.uip == id( f.c, "x4" ) && backjump_level( lc ) == x3_level;
  return { ok, format_constraint( f.c, lc ) + ", backjump to level " + std::to_string( backjump_level( lc ) ) };
}

Verdict algebra()
{
  const auto t0 = Clock::now();
  std::size_t checked = 0, bad = 0;
  for ( auto k : kinds )
    for ( std::size_t n = 1; n <= 4; ++n )
    {
      if ( !arity_ok( k, n ) )
        continue;
      for ( const auto& t : tuples( n ) )
      {
        ++checked;
        bad += eval_gate( k, t ) != ref_eval( k, t );
      }
    }
  const double s = seconds_since( t0 );
  std::ostringstream os;
  os << checked << " tuples, " << bad << " mismatches, " << std::setprecision( 3 ) << s << "s (budget " << algebra_budget_s << "s)";
  return { bad == 0 && s < algebra_budget_s, os.str() };
}

Verdict pattern_validity()
{
  std::size_t checked = 0, bad = 0;
  for ( const auto& b : benches() )
    for ( const auto* rs : { &b.plain, &b.cdsl } )
      for ( const auto& r : *rs )
        if ( r.status == Status::Testable )
        {
          ++checked;
          bad += !r.pattern || !detects( b.circuit, *r.pattern, r.fault );
        }
  return { bad == 0 && checked > 0, std::to_string( checked ) + " patterns over " + std::to_string( suite.size() ) + " circuits, " +
                                        std::to_string( bad ) + " rejected" };
}

Verdict untestability()
{
  std::size_t compared = 0, disagree = 0, aborted = 0, skipped = 0, untestable = 0;
  for ( const auto& b : benches() )
    for ( std::size_t i = 0; i < b.faults.size(); ++i )
    {
      const auto& f = b.faults[i];
      auto cone = cone_of( b.circuit, f );
      if ( cone && cone->cone_pis.size() > exhaustive_pi_limit )
      {
        ++skipped;
        continue;
      }
      const auto truth = exhaustive_classify( b.circuit, f, {}, 0 ).status;
      untestable += truth == Status::Untestable;
      for ( const auto* rs : { &b.plain, &b.cdsl } )
      {
        const auto st = ( *rs )[i].status;
        if ( st == Status::Aborted )
        {
          ++aborted;
          continue;
        }
        ++compared;
        disagree += st != truth;
      }
    }
  return { disagree == 0 && compared > 0,
           std::to_string( compared ) + " verdicts compared (" + std::to_string( untestable ) + " faults untestable), " +
               std::to_string( disagree ) + " disagreements, " + std::to_string( aborted ) + " aborted, " + std::to_string( skipped ) +
               " faults over the bound" };
}

Verdict learnt_soundness()
{
  std::size_t faults = 0, constraints = 0, violations = 0, patterns = 0;
  EngineConfig cfg;
  cfg.backtrack_limit = matched_limit;
  cfg.keep_history = true;
  for ( const auto& b : benches() )
    for ( std::size_t i = 0; i < b.faults.size(); ++i )
    {
      if ( b.cdsl[i].stats.conflicts == 0 )
        continue;
      const auto& f = b.faults[i];
      auto cone = cone_of( b.circuit, f );
      if ( !cone || cone->cone_pis.size() > soundness_pi_limit )
        continue;
      auto run = search_fault( b.circuit, *cone, f, cfg );
      if ( run.history.empty() )
        continue;
      ++faults;
      constraints += run.history.size();
      for_each_detecting( b.circuit, f, {}, [&]( const Pattern& p ) {
        ++patterns;
        auto v = test::line_values( b.circuit, p, f );
        for ( const auto& lc : run.history )
          violations += test::all_literals_hold( lc, v );
      } );
    }
  return { violations == 0 && faults >= soundness_min_faults,
           std::to_string( faults ) + " conflict faults (need " + std::to_string( soundness_min_faults ) + "), " +
               std::to_string( constraints ) + " constraints, " + std::to_string( patterns ) + " detecting assignments, " +
               std::to_string( violations ) + " violations" };
}

Verdict uip_oracle()
{
  std::mt19937_64 rng( 20240611 );
  std::size_t bad = 0;
  for ( std::size_t t = 0; t < uip_graphs; ++t )
  {
    Conflict k;
    auto g = random_graph( rng, k );
    NodeId u1 = no_node, u2 = no_node;
    auto by_resolution = resolution_uip( g, k, u1 );
    auto by_dominator = dominator_uip( g, k, u2 );
    auto lc = analyze_uip( g, k );
    std::set<NodeId> got;
    for ( const auto& l : lc.literals )
      got.insert( g.node_of( l.gate ) );
    bad += !( got == by_resolution && got == by_dominator && u1 == u2 && lc.uip && *lc.uip == g.node( u1 ).gate );
  }
  return { bad == 0, std::to_string( uip_graphs ) + " random graphs, " + std::to_string( bad ) + " mismatches" };
}

Verdict asserting()
{
  // The engine throws when a learnt constraint is not unit after the
  // backjump; here every learning backtrack must have passed that check.
  std::uint64_t backtracks = 0, checks = 0;
  std::size_t off = 0;
  for ( const auto& b : benches() )
    for ( const auto& r : b.cdsl )
    {
      backtracks += r.stats.backtracks;
      checks += r.stats.asserting_checks;
      off += r.stats.backtracks != r.stats.asserting_checks;
    }
  return { off == 0 && checks > 0,
           std::to_string( checks ) + " asserting checks for " + std::to_string( backtracks ) + " backjumps, " + std::to_string( off ) +
               " faults out of step" };
}

Verdict cdsl_trend()
{
  std::size_t hard = 0, ab_plain = 0, ab_cdsl = 0;
  std::uint64_t bt_plain = 0, bt_cdsl = 0;
  for ( const auto& b : benches() )
  {
    if ( b.name != "mult16" && b.name != "mult8" && b.name.rfind( "rr_", 0 ) != 0 )
      continue;
    for ( std::size_t i = 0; i < b.faults.size(); ++i )
    {
      if ( b.plain[i].stats.backtracks == 0 )
        continue;
      ++hard;
      ab_plain += b.plain[i].status == Status::Aborted;
      ab_cdsl += b.cdsl[i].status == Status::Aborted;
      bt_plain += b.plain[i].stats.backtracks;
      bt_cdsl += b.cdsl[i].stats.backtracks;
    }
  }
  const double reduction = bt_plain ? 1.0 - static_cast<double>( bt_cdsl ) / static_cast<double>( bt_plain ) : 0.0;
  std::ostringstream os;
  os << hard << " hard faults; aborted plain " << ab_plain << " vs cdsl " << ab_cdsl << "; backtracks plain " << bt_plain << " vs cdsl "
     << bt_cdsl << " (" << std::setprecision( 1 ) << std::fixed << 100.0 * reduction << "% fewer, need "
     << 100.0 * trend_min_reduction << "%); suite " << suite_seconds << "s";
  return { hard > 0 && ab_cdsl <= ab_plain && reduction >= trend_min_reduction && suite_seconds < trend_budget_s, os.str() };
}

Verdict two_stage()
{
  EngineConfig cfg;
  cfg.stage1_limit = 20;
  cfg.stage2_limit = 100;
  EngineConfig one;
  one.learning_enabled = false;
  one.backtrack_limit = cfg.stage1_limit;
  bool ok = true;
  std::size_t strict = 0, total_one = 0, total_two = 0;
  std::ostringstream os;
  for ( const auto& b : benches() )
  {
    auto a1 = coverage( run_faults( b.circuit, b.faults, one ) ).n_aborted;
    auto a2 = coverage( run_two_stage( b.circuit, b.faults, cfg ) ).n_aborted;
    ok = ok && a2 <= a1;
    strict += a2 < a1;
    total_one += a1;
    total_two += a2;
    if ( a1 || a2 )
      os << b.name << ' ' << a1 << "->" << a2 << ' ';
  }
  os << "(total " << total_one << "->" << total_two << ", " << strict << " strict improvements)";
  return { ok && strict > 0, os.str() };
}

Verdict diagnosis_fixture()
{
  auto c = test::load_data( "masking.bench" );
  auto cons = parse_constraints( c, read_file( test::data( "masking.constraints" ) ) );
  auto f = parse_fault_list( c, read_file( test::data( "masking.faults" ) ) ).at( 0 );
  const GateId masking = id( c, "p" );
  std::size_t good = 0;
  for ( std::uint64_t seed = 1; seed <= seeds; ++seed )
  {
    EngineConfig cfg;
    cfg.rng_seed = seed;
    auto rep = diagnose_and_rerun( c, f, cfg, cons, 5 );
    bool implicated = std::any_of( rep.implicated_pis.begin(), rep.implicated_pis.end(),
                                   [&]( const ImplicatedPi& ip ) { return ip.pi == masking && ip.suggestion == Suggestion::Relax; } );
    good += rep.before != Status::Testable && implicated && rep.rerun && rep.rerun->status == Status::Testable;
  }
  return { good == seeds, std::to_string( good ) + "/" + std::to_string( seeds ) + " seeds implicate p within top-5 and flip " +
                              fault_name( c, f ) + " to TESTABLE after RELAX" };
}

Verdict gen_vs_solve()
{
  // Timing on easy faults: testable without any backtrack.
  std::vector<double> gen, solve;
  for ( const auto& b : benches() )
  {
    if ( b.name != "c17" && b.name != "prio27" && b.name != "alu8" )
      continue;
    std::vector<Fault> easy;
    for ( const auto& r : b.cdsl )
      if ( r.status == Status::Testable && r.stats.backtracks == 0 )
        easy.push_back( r.fault );
    for ( const auto& row : timed_compare( b.circuit, easy, EngineConfig{}, timing_repeats ) )
    {
      gen.push_back( row.t_generate_us );
      solve.push_back( row.t_solve_us );
    }
  }
  auto median = []( std::vector<double> v ) {
    std::sort( v.begin(), v.end() );
    return v.empty() ? 0.0 : v[v.size() / 2];
  };
  const double mg = median( gen ), ms = median( solve );

  // Classification agreement on every non-aborted fault of the suite.
  std::size_t compared = 0, disagree = 0, unknown = 0;
  for ( const auto& b : benches() )
    for ( const auto& r : b.cdsl )
    {
      if ( r.status == Status::Aborted )
        continue;
      auto cone = cone_of( b.circuit, r.fault );
      if ( !cone )
        continue;
      MiniSolver s( encode( b.circuit, *cone, r.fault ) );
      auto sat = s.solve( 100000 );
      if ( sat == SatResult::Unknown )
      {
        ++unknown;
        continue;
      }
      ++compared;
      disagree += ( sat == SatResult::Sat ) != ( r.status == Status::Testable );
    }
  std::ostringstream os;
  os << gen.size() << " easy faults, median t_generate " << std::fixed << std::setprecision( 1 ) << mg << "us vs t_solve " << ms
     << "us; SAT/engine agree on " << ( compared - disagree ) << "/" << compared << " (" << unknown << " solver give-ups)";
  return { mg >= ms && disagree == 0 && compared > 0, os.str() };
}

Verdict determinism()
{
  std::size_t differing = 0, files = 0;
  EngineConfig cfg;
  cfg.rng_seed = 7;
  for ( auto name : { "rr_c", "mult8", "alu8" } )
  {
    auto c = test::load_bench( name );
    auto faults = enumerate_faults( c );
    auto a = run_faults( c, faults, cfg );
    auto b = run_faults( c, faults, cfg );
    auto j = run_faults( c, faults, cfg, {}, 2 );
    for ( const auto* other : { &b, &j } )
    {
      files += 2;
      differing += write_stats_csv( c, a, false ) != write_stats_csv( c, *other, false );
      differing += write_patterns( c, a ) != write_patterns( c, *other );
    }
  }
  return { differing == 0, std::to_string( files ) + " report pairs compared, " + std::to_string( differing ) + " differ" };
}

} // namespace

int main()
{
  report( "worked UIP example: constraint and backjump", worked_example );
  report( "five-valued algebra exhaustive", algebra );
  const auto t0 = Clock::now();
  benches();
  suite_seconds = seconds_since( t0 );
  std::cout << "(suite: " << suite.size() << " circuits run in plain and cdsl mode at limit " << matched_limit << " in " << std::fixed
            << std::setprecision( 2 ) << suite_seconds << "s)" << std::endl;
  report( "pattern validity", pattern_validity );
  report( "untestability ground truth", untestability );
  report( "learnt-constraint soundness", learnt_soundness );
  report( "first-UIP oracle equivalence", uip_oracle );
  report( "asserting constraint after every backjump", asserting );
  report( "cdsl benefit trend on hard faults", cdsl_trend );
  report( "two-stage trend", two_stage );
  report( "diagnosis masking fixture", diagnosis_fixture );
  report( "generation vs solve trend on easy faults", gen_vs_solve );
  report( "determinism", determinism );
  std::cout << ( failures ? "FAILED " : "ALL PASSED " ) << failures << " failing criteria" << std::endl;
  return failures ? 1 : 0;
}
