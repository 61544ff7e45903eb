#pragma once

#include <cdsl/cdsl.hpp>

#include <span>
#include <string>
#include <vector>

namespace cdsl::test
{

inline std::string data( const std::string& name ) { return std::string( CDSL_DATA_DIR ) + "/" + name; }
inline std::string bench( const std::string& name ) { return std::string( CDSL_BENCH_DIR ) + "/" + name + ".bench"; }

inline Circuit load_data( const std::string& name ) { return parse_bench( read_file( data( name ) ) ); }
inline Circuit load_bench( const std::string& name ) { return parse_bench( read_file( bench( name ) ) ); }

inline GateId id( const Circuit& c, std::string_view name )
{
  auto g = c.find( name );
  if ( !g )
    throw std::invalid_argument( "no net " + std::string( name ) );
  return *g;
}

/// Five-valued line values under a full pattern: good and faulty machines
/// recombined per line.
inline std::vector<Value5> line_values( const Circuit& c, const Pattern& p, const Fault& f )
{
  auto good = simulate_lines( c, p );
  auto bad = simulate_lines( c, p, f );
  std::vector<Value5> v( c.size() );
  for ( std::size_t g = 0; g < c.size(); ++g )
    v[g] = from_pair( { good[g], bad[g] } );
  return v;
}

/// Every literal of the constraint holds under `values`.
inline bool all_literals_hold( const LearntConstraint& lc, std::span<const Value5> values )
{
  for ( const auto& l : lc.literals )
    if ( values[l.gate] != l.value )
      return false;
  return true;
}

} // namespace cdsl::test
