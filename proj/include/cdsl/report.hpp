#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "engine.hpp"
#include "fault.hpp"
#include "netlist.hpp"

namespace cdsl
{

/// Malformed line in one of the text formats below (1-based line number).
class FormatError : public std::runtime_error
{
public:
  FormatError( std::size_t line, const std::string& what )
      : std::runtime_error( "line " + std::to_string( line ) + ": " + what ), line_( line ) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file( const std::string& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw IoError( "cannot open '" + path + "'" );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file( const std::string& path, std::string_view text )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    throw IoError( "cannot write '" + path + "'" );
  out << text;
}

namespace detail
{

inline std::string_view trim_ws( std::string_view s )
{
  while ( !s.empty() && ( s.front() == ' ' || s.front() == '\t' || s.front() == '\r' ) )
    s.remove_prefix( 1 );
  while ( !s.empty() && ( s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ) )
    s.remove_suffix( 1 );
  return s;
}

/// Calls f(line_number, trimmed line) for non-empty, non-comment lines.
template<class F>
void for_each_line( std::string_view text, F&& f )
{
  std::size_t lineno = 0;
  while ( !text.empty() )
  {
    auto nl = text.find( '\n' );
    auto line = text.substr( 0, nl );
    text.remove_prefix( nl == std::string_view::npos ? text.size() : nl + 1 );
    ++lineno;
    if ( auto hash = line.find( '#' ); hash != std::string_view::npos )
      line = line.substr( 0, hash );
    line = trim_ws( line );
    if ( !line.empty() )
      f( lineno, line );
  }
}

} // namespace detail

/* fault lists: one `name/0` or `name/1` per line */

inline std::vector<Fault> parse_fault_list( const Circuit& c, std::string_view text )
{
  std::vector<Fault> out;
  detail::for_each_line( text, [&]( std::size_t n, std::string_view line ) {
    try
    {
      out.push_back( parse_fault( c, line ) );
    }
    catch ( const std::exception& e )
    {
      throw FormatError( n, e.what() );
    }
  } );
  return out;
}

inline std::string write_fault_list( const Circuit& c, std::span<const Fault> faults )
{
  std::string s;
  for ( const auto& f : faults )
    s += fault_name( c, f ) + '\n';
  return s;
}

/* PI constraints: one `name=0` or `name=1` per line */

inline std::vector<PiConstraint> parse_constraints( const Circuit& c, std::string_view text )
{
  std::vector<PiConstraint> out;
  detail::for_each_line( text, [&]( std::size_t n, std::string_view line ) {
    auto eq = line.find( '=' );
    if ( eq == std::string_view::npos )
      throw FormatError( n, "expected name=0|1" );
    auto name = detail::trim_ws( line.substr( 0, eq ) );
    auto val = detail::trim_ws( line.substr( eq + 1 ) );
    if ( val != "0" && val != "1" )
      throw FormatError( n, "constraint value must be 0 or 1" );
    auto g = c.find( name );
    if ( !g )
      throw FormatError( n, "unknown net '" + std::string( name ) + "'" );
    if ( !c.is_pi( *g ) )
      throw FormatError( n, "'" + std::string( name ) + "' is not a primary input" );
    for ( const auto& pc : out )
      if ( pc.pi == *g )
        throw FormatError( n, "second constraint on '" + std::string( name ) + "'" );
    out.push_back( { *g, val == "1" } );
  } );
  return out;
}

inline std::string write_constraints( const Circuit& c, std::span<const PiConstraint> cs )
{
  std::string s;
  for ( const auto& pc : cs )
    s += c.name( pc.pi ) + ( pc.value ? "=1\n" : "=0\n" );
  return s;
}

/* patterns: `name/pol : vector` for every TESTABLE fault */

inline std::string write_patterns( const Circuit& c, std::span<const AtpgResult> results )
{
  std::string s;
  for ( const auto& r : results )
    if ( r.status == Status::Testable && r.pattern )
      s += fault_name( c, r.fault ) + " : " + r.pattern->str() + '\n';
  return s;
}

inline std::vector<std::pair<Fault, Pattern>> parse_patterns( const Circuit& c, std::string_view text )
{
  std::vector<std::pair<Fault, Pattern>> out;
  detail::for_each_line( text, [&]( std::size_t n, std::string_view line ) {
    auto colon = line.find( ':' );
    if ( colon == std::string_view::npos )
      throw FormatError( n, "expected 'fault : vector'" );
    Fault f;
    try
    {
      f = parse_fault( c, detail::trim_ws( line.substr( 0, colon ) ) );
    }
    catch ( const std::exception& e )
    {
      throw FormatError( n, e.what() );
    }
    auto vec = detail::trim_ws( line.substr( colon + 1 ) );
    if ( vec.size() != c.primary_inputs().size() )
      throw FormatError( n, "vector has " + std::to_string( vec.size() ) + " values, circuit has " +
                                std::to_string( c.primary_inputs().size() ) + " inputs" );
    Pattern p;
    for ( char ch : vec )
    {
      if ( ch == '0' )
        p.values.push_back( Tri::Zero );
      else if ( ch == '1' )
        p.values.push_back( Tri::One );
      else if ( ch == 'X' || ch == 'x' )
        p.values.push_back( Tri::X );
      else
        throw FormatError( n, std::string( "bad pattern character '" ) + ch + "'" );
    }
    out.emplace_back( f, std::move( p ) );
  } );
  return out;
}

/* stats CSV */

inline constexpr std::string_view stats_header = "fault,status,decisions,backtracks,conflicts,learnt_count,micros";

/// With `timing` off the micros column is written as 0 so that repeated runs
/// produce identical bytes.
inline std::string write_stats_csv( const Circuit& c, std::span<const AtpgResult> results, bool timing = true )
{
  std::ostringstream os;
  os << stats_header << '\n';
  for ( const auto& r : results )
    os << fault_name( c, r.fault ) << ',' << status_name( r.status ) << ',' << r.stats.decisions << ',' << r.stats.backtracks << ','
       << r.stats.conflicts << ',' << r.stats.learnt_count << ',' << ( timing ? r.stats.elapsed.count() : 0 ) << '\n';
  return os.str();
}

struct StatsRow
{
  Fault fault;
  Status status{ Status::Aborted };
  std::uint64_t backtracks = 0;
};

inline std::vector<StatsRow> parse_stats_csv( const Circuit& c, std::string_view text )
{
  std::vector<StatsRow> out;
  bool header = true;
  detail::for_each_line( text, [&]( std::size_t n, std::string_view line ) {
    if ( header )
    {
      header = false;
      if ( line != stats_header )
        throw FormatError( n, "unexpected stats header" );
      return;
    }
    std::vector<std::string_view> cols;
    while ( true )
    {
      auto comma = line.find( ',' );
      cols.push_back( line.substr( 0, comma ) );
      if ( comma == std::string_view::npos )
        break;
      line.remove_prefix( comma + 1 );
    }
    if ( cols.size() != 7 )
      throw FormatError( n, "expected 7 columns" );
    StatsRow row;
    try
    {
      row.fault = parse_fault( c, cols[0] );
    }
    catch ( const std::exception& e )
    {
      throw FormatError( n, e.what() );
    }
    auto st = status_from_name( cols[1] );
    if ( !st )
      throw FormatError( n, "unknown status '" + std::string( cols[1] ) + "'" );
    row.status = *st;
    row.backtracks = std::stoull( std::string( cols[3] ) );
    out.push_back( row );
  } );
  return out;
}

/* coverage summary */

inline std::string write_summary( const CoverageReport& r, const EngineConfig& cfg, std::string_view mode, std::string_view circuit )
{
  std::ostringstream os;
  os << "circuit " << circuit << '\n'
     << "mode " << mode << '\n'
     << "abort_limit " << cfg.backtrack_limit << '\n'
     << "stage1_limit " << cfg.stage1_limit << '\n'
     << "stage2_limit " << cfg.stage2_limit << '\n'
     << "vsids_decay " << cfg.vsids.decay << '\n'
     << "vsids_prob " << cfg.vsids.pick_probability << '\n'
     << "forget_n " << cfg.forget_n << '\n'
     << "seed " << cfg.rng_seed << '\n'
     << "n_total " << r.n_total << '\n'
     << "n_testable " << r.n_testable << '\n'
     << "n_untestable " << r.n_untestable << '\n'
     << "n_aborted " << r.n_aborted << '\n'
     << std::fixed << std::setprecision( 6 ) << "fault_coverage " << r.fault_coverage << '\n'
     << "test_coverage " << r.test_coverage() << '\n';
  return os.str();
}

} // namespace cdsl
