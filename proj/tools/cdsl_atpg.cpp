// Command-line driver: ATPG runs, oracle verification, conflict diagnosis,
// CNF export and generation-vs-solve timing.

#include <cdsl/cdsl.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cdsl;

namespace
{

struct Options
{
  std::string circuit;
  std::string mode = "cdsl";
  std::string faults_path;
  std::string constraints_path;
  std::string out = ".";
  std::string learnt = "uip";
  std::uint64_t abort_limit = 100;
  std::uint64_t stage1_limit = 20;
  std::uint64_t stage2_limit = 100;
  double vsids_decay = 0.95;
  double vsids_prob = 0.5;
  std::uint64_t forget_n = 1000;
  std::uint64_t seed = 1;
  std::size_t top_k = 5;
  unsigned jobs = 1;
  unsigned repeats = 5;
  bool apply = false;
  bool no_timing = false;
};

/// Input problem that maps to exit code 1; the message names the file.
struct InputError
{
  std::string message;
};

std::string load( const std::string& path )
{
  try
  {
    return read_file( path );
  }
  catch ( const IoError& e )
  {
    throw InputError{ e.what() };
  }
}

template<class F>
auto parse_in( const std::string& path, F&& f )
{
  try
  {
    return f( load( path ) );
  }
  catch ( const InputError& )
  {
    throw;
  }
  catch ( const std::exception& e )
  {
    throw InputError{ path + ": " + e.what() };
  }
}

Circuit load_circuit( const Options& o )
{
  return parse_in( o.circuit, []( const std::string& text ) { return parse_bench( text ); } );
}

std::vector<Fault> load_faults( const Options& o, const Circuit& c )
{
  if ( o.faults_path.empty() )
    return enumerate_faults( c );
  return parse_in( o.faults_path, [&]( const std::string& text ) { return parse_fault_list( c, text ); } );
}

std::vector<PiConstraint> load_constraints( const Options& o, const Circuit& c )
{
  if ( o.constraints_path.empty() )
    return {};
  return parse_in( o.constraints_path, [&]( const std::string& text ) { return parse_constraints( c, text ); } );
}

EngineConfig engine_config( const Options& o )
{
  EngineConfig cfg;
  cfg.backtrack_limit = o.abort_limit;
  cfg.learning_enabled = o.mode != "plain";
  cfg.vsids.decay = o.vsids_decay;
  cfg.vsids.pick_probability = o.vsids_prob;
  cfg.forget_n = o.forget_n;
  cfg.rng_seed = o.seed;
  cfg.stage1_limit = o.stage1_limit;
  cfg.stage2_limit = o.stage2_limit;
  cfg.learnt_kinds = o.learnt == "both" ? LearntKinds::Both : LearntKinds::UipOnly;
  cfg.validate();
  return cfg;
}

void emit( const fs::path& path, std::string_view text )
{
  try
  {
    write_file( path.string(), text );
  }
  catch ( const IoError& e )
  {
    throw InputError{ e.what() };
  }
}

std::string file_safe( std::string name )
{
  for ( auto& ch : name )
    if ( ch == '/' )
      ch = '_';
  return name;
}

int cmd_run( const Options& o )
{
  auto c = load_circuit( o );
  auto faults = load_faults( o, c );
  auto constraints = load_constraints( o, c );
  auto cfg = engine_config( o );
  fs::create_directories( o.out );

  if ( o.mode == "sat-export" )
  {
    auto dir = fs::path( o.out ) / "cnf";
    fs::create_directories( dir );
    std::size_t written = 0;
    for ( const auto& f : faults )
    {
      try
      {
        auto cone = extract_cone( c, f.site );
        emit( dir / ( file_safe( fault_name( c, f ) ) + ".cnf" ), write_dimacs( encode( c, cone, f, constraints ) ) );
        ++written;
      }
      catch ( const UnreachableFaultError& )
      {
        std::cout << "skip " << fault_name( c, f ) << " (reaches no output)\n";
      }
    }
    std::cout << "wrote " << written << " CNF files to " << dir.string() << '\n';
    return 0;
  }
  if ( o.mode == "compare" )
  {
    auto rows = timed_compare( c, faults, cfg, o.repeats, constraints );
    emit( fs::path( o.out ) / "timing.csv", timing_csv( c, rows ) );
    std::size_t agree = 0, decided = 0;
    for ( const auto& r : rows )
    {
      if ( r.engine == Status::Aborted || r.sat == SatResult::Unknown )
        continue;
      ++decided;
      agree += ( r.sat == SatResult::Sat ) == ( r.engine == Status::Testable );
    }
    std::cout << "faults " << rows.size() << "\nagreement " << agree << '/' << decided << '\n';
    return 0;
  }

  std::vector<AtpgResult> results;
  if ( o.mode == "two-stage" )
    results = run_two_stage( c, faults, cfg, constraints, o.jobs );
  else
    results = run_faults( c, faults, cfg, constraints, o.jobs );

  emit( fs::path( o.out ) / "patterns.txt", write_patterns( c, results ) );
  emit( fs::path( o.out ) / "stats.csv", write_stats_csv( c, results, !o.no_timing ) );
  auto summary = write_summary( coverage( results ), cfg, o.mode, o.circuit );
  emit( fs::path( o.out ) / "summary.txt", summary );
  std::cout << summary;
  return 0;
}

int cmd_verify( const Options& o )
{
  auto c = load_circuit( o );
  auto constraints = load_constraints( o, c );
  auto stats_path = ( fs::path( o.out ) / "stats.csv" ).string();
  auto pat_path = ( fs::path( o.out ) / "patterns.txt" ).string();
  auto rows = parse_in( stats_path, [&]( const std::string& t ) { return parse_stats_csv( c, t ); } );
  auto pats = parse_in( pat_path, [&]( const std::string& t ) { return parse_patterns( c, t ); } );

  std::vector<std::string> mismatches;
  std::size_t checked_t = 0, checked_u = 0, skipped = 0;
  for ( const auto& [f, p] : pats )
  {
    ++checked_t;
    bool ok = detects( c, p, f );
    for ( const auto& pc : constraints )
      ok = ok && p.values[c.pi_index( pc.pi )] == tri_from_bool( pc.value );
    if ( !ok )
      mismatches.push_back( fault_name( c, f ) + ": pattern " + p.str() + " does not detect the fault" );
  }
  for ( const auto& r : rows )
  {
    if ( r.status == Status::Testable )
    {
      bool has = std::any_of( pats.begin(), pats.end(), [&]( const auto& fp ) { return fp.first == r.fault; } );
      if ( !has )
        mismatches.push_back( fault_name( c, r.fault ) + ": TESTABLE without a pattern" );
    }
    else if ( r.status == Status::Untestable )
    {
      try
      {
        auto cl = exhaustive_classify( c, r.fault, constraints, 1 );
        ++checked_u;
        if ( cl.status == Status::Testable )
          mismatches.push_back( fault_name( c, r.fault ) + ": UNTESTABLE but detected by " + cl.patterns.front().str() );
      }
      catch ( const TooLarge& )
      {
        ++skipped;
        std::cout << fault_name( c, r.fault ) << ": skipped (too large)\n";
      }
    }
  }
  for ( const auto& m : mismatches )
    std::cout << "MISMATCH " << m << '\n';
  std::cout << "patterns checked " << checked_t << "\nuntestable checked " << checked_u << "\nskipped " << skipped
            << "\nmismatches " << mismatches.size() << '\n';
  return mismatches.empty() ? 0 : 2;
}

int cmd_diagnose( const Options& o )
{
  auto c = load_circuit( o );
  auto constraints = load_constraints( o, c );
  auto cfg = engine_config( o );
  auto stats_path = ( fs::path( o.out ) / "stats.csv" ).string();
  auto rows = parse_in( stats_path, [&]( const std::string& t ) { return parse_stats_csv( c, t ); } );

  auto reports = nlohmann::json::array();
  for ( const auto& r : rows )
  {
    if ( r.status == Status::Testable )
      continue;
    auto rep = diagnose( c, r.fault, cfg, constraints, o.top_k, o.apply );
    reports.push_back( to_json( c, rep ) );
  }
  emit( fs::path( o.out ) / "diagnosis.json", reports.dump( 2 ) + "\n" );
  std::cout << reports.dump( 2 ) << '\n';
  return 0;
}

void engine_flags( CLI::App* app, Options& o )
{
  app->add_option( "--abort-limit", o.abort_limit, "backtrack limit per fault" )->capture_default_str();
  app->add_option( "--stage1-limit", o.stage1_limit, "two-stage: limit of the plain first stage" )->capture_default_str();
  app->add_option( "--stage2-limit", o.stage2_limit, "two-stage/diagnosis: limit of the learning stage" )->capture_default_str();
  app->add_option( "--vsids-decay", o.vsids_decay, "activity decay factor" )->capture_default_str()->check( CLI::Range( 0.0, 1.0 ) );
  app->add_option( "--vsids-prob", o.vsids_prob, "probability of the activity-based pick" )->capture_default_str()->check( CLI::Range( 0.0, 1.0 ) );
  app->add_option( "--forget-n", o.forget_n, "drop constraints unused for this many conflicts" )->capture_default_str();
  app->add_option( "--seed", o.seed, "RNG seed" )->capture_default_str();
  app->add_option( "--learnt", o.learnt, "learnt constraints per conflict" )->capture_default_str()->check( CLI::IsMember( { "uip", "both" } ) );
  app->add_option( "--faults", o.faults_path, "fault list (name/0|1 per line); default all faults" );
  app->add_option( "--constraints", o.constraints_path, "PI constraints (name=0|1 per line)" );
  app->add_option( "--jobs", o.jobs, "worker threads" )->capture_default_str()->check( CLI::PositiveNumber );
  app->add_option( "--out", o.out, "output directory" )->capture_default_str();
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Conflict-driven structural ATPG" };
  app.require_subcommand( 1 );
  Options o;

  auto* run = app.add_subcommand( "run", "generate tests for a .bench circuit" );
  run->add_option( "circuit", o.circuit, "ISCAS .bench netlist" )->required();
  run->add_option( "--mode", o.mode, "plain | cdsl | two-stage | sat-export | compare" )
      ->capture_default_str()
      ->check( CLI::IsMember( { "plain", "cdsl", "two-stage", "sat-export", "compare" } ) );
  run->add_option( "--repeats", o.repeats, "compare: timing repetitions (median)" )->capture_default_str()->check( CLI::PositiveNumber );
  run->add_flag( "--no-timing", o.no_timing, "write 0 in the micros column" );
  engine_flags( run, o );

  auto* verify = app.add_subcommand( "verify", "check a run's outputs against the oracles" );
  verify->add_option( "circuit", o.circuit, "ISCAS .bench netlist" )->required();
  verify->add_option( "--constraints", o.constraints_path, "PI constraints used by the run" );
  verify->add_option( "--out", o.out, "directory holding patterns.txt and stats.csv" )->capture_default_str();

  auto* diag = app.add_subcommand( "diagnose", "conflict diagnosis for aborted/untestable faults of a prior run" );
  diag->add_option( "circuit", o.circuit, "ISCAS .bench netlist" )->required();
  diag->add_option( "--top-k", o.top_k, "number of conflict-hot gates to trace" )->capture_default_str()->check( CLI::PositiveNumber );
  diag->add_flag( "--apply", o.apply, "re-run each fault with the suggested constraints" );
  engine_flags( diag, o );

  CLI11_PARSE( app, argc, argv );

  try
  {
    if ( *run )
      return cmd_run( o );
    if ( *verify )
      return cmd_verify( o );
    return cmd_diagnose( o );
  }
  catch ( const InputError& e )
  {
    std::cerr << "error: " << e.message << '\n';
    return 1;
  }
  catch ( const std::invalid_argument& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  catch ( const std::filesystem::filesystem_error& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
