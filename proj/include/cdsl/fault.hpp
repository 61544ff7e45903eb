#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "logic5.hpp"
#include "netlist.hpp"

namespace cdsl
{

enum class Polarity : std::uint8_t
{
  Sa0,
  Sa1
};

struct Fault
{
  GateId site{};
  Polarity polarity{ Polarity::Sa0 };

  bool operator==( const Fault& ) const = default;

  bool stuck_value() const { return polarity == Polarity::Sa1; }
  /// D for stuck-at-0, D' for stuck-at-1.
  Value5 effect() const { return polarity == Polarity::Sa0 ? Value5::D : Value5::Dbar; }
  /// Good-machine value the site must take to activate the fault.
  bool effect_good() const { return !stuck_value(); }
};

/// External ATPG constraint pinning a primary input.
struct PiConstraint
{
  GateId pi{};
  bool value = false;

  bool operator==( const PiConstraint& ) const = default;
};

/// Per-PI values in primary-input order; X marks a don't-care.
struct Pattern
{
  std::vector<Tri> values;

  bool operator==( const Pattern& ) const = default;

  std::string str() const
  {
    std::string s;
    s.reserve( values.size() );
    for ( auto v : values )
      s.push_back( tri_char( v ) );
    return s;
  }
};

enum class Status : std::uint8_t
{
  Testable,
  Untestable,
  Aborted
};

inline std::string_view status_name( Status s )
{
  switch ( s )
  {
  case Status::Testable: return "TESTABLE";
  case Status::Untestable: return "UNTESTABLE";
  case Status::Aborted: return "ABORTED";
  }
  return "?";
}

inline std::optional<Status> status_from_name( std::string_view s )
{
  if ( s == "TESTABLE" ) return Status::Testable;
  if ( s == "UNTESTABLE" ) return Status::Untestable;
  if ( s == "ABORTED" ) return Status::Aborted;
  return std::nullopt;
}

struct SearchStats
{
  std::uint64_t decisions = 0;
  std::uint64_t backtracks = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t learnt_count = 0;
  std::uint64_t asserting_checks = 0;
  std::chrono::microseconds elapsed{ 0 };
};

struct AtpgResult
{
  Fault fault;
  Status status{ Status::Aborted };
  std::optional<Pattern> pattern; // set iff status == Testable
  SearchStats stats;
};

class EmptyInputError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct CoverageReport
{
  std::size_t n_total = 0;
  std::size_t n_testable = 0;
  std::size_t n_untestable = 0;
  std::size_t n_aborted = 0;
  double fault_coverage = 0.0;

  /// Auxiliary metric: testable over detectable-or-unresolved faults.
  double test_coverage() const
  {
    auto denom = n_total - n_untestable;
    return denom == 0 ? 1.0 : static_cast<double>( n_testable ) / static_cast<double>( denom );
  }
};

inline CoverageReport coverage( const std::vector<AtpgResult>& results )
{
  if ( results.empty() )
    throw EmptyInputError( "coverage of an empty result list" );
  CoverageReport r;
  r.n_total = results.size();
  for ( const auto& res : results )
  {
    switch ( res.status )
    {
    case Status::Testable: ++r.n_testable; break;
    case Status::Untestable: ++r.n_untestable; break;
    case Status::Aborted: ++r.n_aborted; break;
    }
  }
  r.fault_coverage = static_cast<double>( r.n_testable ) / static_cast<double>( r.n_total );
  return r;
}

/// Both polarities on every net, in gate-id order.
inline std::vector<Fault> enumerate_faults( const Circuit& c )
{
  std::vector<Fault> faults;
  faults.reserve( 2 * c.size() );
  for ( const auto& g : c.gates() )
  {
    if ( g.kind == GateKind::Output )
      continue;
    faults.push_back( { g.id, Polarity::Sa0 } );
    faults.push_back( { g.id, Polarity::Sa1 } );
  }
  return faults;
}

/// `name/0` or `name/1`.
inline std::string fault_name( const Circuit& c, const Fault& f )
{
  return c.name( f.site ) + ( f.polarity == Polarity::Sa0 ? "/0" : "/1" );
}

inline Fault parse_fault( const Circuit& c, std::string_view text )
{
  auto slash = text.rfind( '/' );
  if ( slash == std::string_view::npos || slash + 2 != text.size() || ( text.back() != '0' && text.back() != '1' ) )
    throw std::invalid_argument( "malformed fault '" + std::string( text ) + "'" );
  auto site = c.find( text.substr( 0, slash ) );
  if ( !site )
    throw UndefinedNetError( "unknown fault site '" + std::string( text.substr( 0, slash ) ) + "'" );
  return { *site, text.back() == '0' ? Polarity::Sa0 : Polarity::Sa1 };
}

} // namespace cdsl
