#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cdsl
{

using GateId = std::uint32_t;

enum class GateKind : std::uint8_t
{
  Input,
  Output,
  And,
  Nand,
  Or,
  Nor,
  Not,
  Buf,
  Xor,
  Xnor
};

inline std::string_view kind_name( GateKind kind )
{
  switch ( kind )
  {
  case GateKind::Input: return "INPUT";
  case GateKind::Output: return "OUTPUT";
  case GateKind::And: return "AND";
  case GateKind::Nand: return "NAND";
  case GateKind::Or: return "OR";
  case GateKind::Nor: return "NOR";
  case GateKind::Not: return "NOT";
  case GateKind::Buf: return "BUFF";
  case GateKind::Xor: return "XOR";
  case GateKind::Xnor: return "XNOR";
  }
  return "?";
}

inline std::optional<GateKind> kind_from_name( std::string_view name )
{
  std::string upper( name );
  std::transform( upper.begin(), upper.end(), upper.begin(), []( unsigned char c ) { return static_cast<char>( std::toupper( c ) ); } );
  if ( upper == "AND" ) return GateKind::And;
  if ( upper == "NAND" ) return GateKind::Nand;
  if ( upper == "OR" ) return GateKind::Or;
  if ( upper == "NOR" ) return GateKind::Nor;
  if ( upper == "NOT" || upper == "INV" ) return GateKind::Not;
  if ( upper == "BUF" || upper == "BUFF" ) return GateKind::Buf;
  if ( upper == "XOR" ) return GateKind::Xor;
  if ( upper == "XNOR" ) return GateKind::Xnor;
  return std::nullopt;
}

/// Checks the fanin count against the gate kind.
inline bool arity_ok( GateKind kind, std::size_t n )
{
  switch ( kind )
  {
  case GateKind::Input: return n == 0;
  case GateKind::Output:
  case GateKind::Not:
  case GateKind::Buf: return n == 1;
  default: return n >= 2;
  }
}

/* errors */

class NetlistError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public NetlistError
{
public:
  SyntaxError( std::size_t line, const std::string& what )
      : NetlistError( "line " + std::to_string( line ) + ": " + what ), line_( line ) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class CycleError : public NetlistError
{
public:
  using NetlistError::NetlistError;
};

class ArityError : public NetlistError
{
public:
  using NetlistError::NetlistError;
};

class UndefinedNetError : public NetlistError
{
public:
  using NetlistError::NetlistError;
};

class UnreachableFaultError : public NetlistError
{
public:
  using NetlistError::NetlistError;
};

struct Gate
{
  GateId id{};
  GateKind kind{ GateKind::Input };
  std::vector<GateId> fanin;
  std::vector<GateId> fanout;
  std::string name;
};

/// Topological depth of every gate; inputs sit at level 0. Throws CycleError
/// when the fanin relation has a loop.
inline std::vector<unsigned> levelize( std::span<const Gate> gates )
{
  std::vector<unsigned> level( gates.size(), 0 );
  std::vector<std::size_t> pending( gates.size(), 0 );
  std::vector<std::vector<GateId>> fanout( gates.size() );
  std::deque<GateId> ready;
  for ( const auto& g : gates )
  {
    pending[g.id] = g.fanin.size();
    for ( auto f : g.fanin )
      fanout[f].push_back( g.id );
    if ( g.fanin.empty() )
      ready.push_back( g.id );
  }
  std::size_t seen = 0;
  while ( !ready.empty() )
  {
    auto g = ready.front();
    ready.pop_front();
    ++seen;
    for ( auto h : fanout[g] )
    {
      level[h] = std::max( level[h], level[g] + 1 );
      if ( --pending[h] == 0 )
        ready.push_back( h );
    }
  }
  if ( seen != gates.size() )
  {
    for ( const auto& g : gates )
      if ( pending[g.id] != 0 )
        throw CycleError( "combinational loop through '" + g.name + "'" );
  }
  return level;
}

/// Immutable gate-level netlist. Gate ids are dense and follow definition
/// order in the source.
class Circuit
{
public:
  Circuit() = default;

  std::size_t size() const { return gates_.size(); }
  const Gate& gate( GateId id ) const { return gates_[id]; }
  std::span<const Gate> gates() const { return gates_; }
  std::span<const GateId> primary_inputs() const { return pis_; }
  std::span<const GateId> primary_outputs() const { return pos_; }
  unsigned level( GateId id ) const { return level_[id]; }
  std::span<const unsigned> levels() const { return level_; }
  unsigned max_level() const { return level_.empty() ? 0 : *std::max_element( level_.begin(), level_.end() ); }

  /// Gates sorted by (level, id); a valid forward evaluation order.
  std::span<const GateId> topo_order() const { return topo_; }

  bool is_pi( GateId id ) const { return gates_[id].kind == GateKind::Input; }
  bool is_po( GateId id ) const { return po_flag_[id] != 0; }
  /// Position of a PI inside primary_inputs().
  std::size_t pi_index( GateId id ) const { return pi_index_[id]; }

  std::optional<GateId> find( std::string_view name ) const
  {
    auto it = by_name_.find( std::string( name ) );
    if ( it == by_name_.end() )
      return std::nullopt;
    return it->second;
  }

  const std::string& name( GateId id ) const { return gates_[id].name; }

private:
  friend class CircuitBuilder;

  std::vector<Gate> gates_;
  std::vector<GateId> pis_;
  std::vector<GateId> pos_;
  std::vector<unsigned> level_;
  std::vector<GateId> topo_;
  std::vector<char> po_flag_;
  std::vector<std::size_t> pi_index_;
  std::unordered_map<std::string, GateId> by_name_;
};

/// Collects declarations in any order and resolves names on build().
class CircuitBuilder
{
public:
  void add_input( std::string name, std::size_t line = 0 )
  {
    define( name, GateKind::Input, {}, line );
  }

  void add_output( std::string name, std::size_t line = 0 )
  {
    outputs_.push_back( { std::move( name ), line } );
  }

  void add_gate( std::string name, GateKind kind, std::vector<std::string> fanin, std::size_t line = 0 )
  {
    define( name, kind, std::move( fanin ), line );
  }

  /// A flip-flop is cut at the scan boundary: its output becomes a pseudo
  /// input and its data pin a pseudo output.
  void add_flipflop( std::string q, std::string d, std::size_t line = 0 )
  {
    add_input( q, line );
    outputs_.push_back( { std::move( d ), line } );
  }

  Circuit build() const
  {
    Circuit c;
    c.gates_.resize( defs_.size() );
    for ( std::size_t i = 0; i < defs_.size(); ++i )
      c.by_name_.emplace( defs_[i].name, static_cast<GateId>( i ) );

    for ( std::size_t i = 0; i < defs_.size(); ++i )
    {
      const auto& d = defs_[i];
      auto& g = c.gates_[i];
      g.id = static_cast<GateId>( i );
      g.kind = d.kind;
      g.name = d.name;
      if ( !arity_ok( d.kind, d.fanin.size() ) )
        throw ArityError( where( d.line ) + std::string( kind_name( d.kind ) ) + " gate '" + d.name + "' has " +
                          std::to_string( d.fanin.size() ) + " inputs" );
      for ( const auto& f : d.fanin )
      {
        auto it = c.by_name_.find( f );
        if ( it == c.by_name_.end() )
          throw UndefinedNetError( where( d.line ) + "undefined net '" + f + "'" );
        g.fanin.push_back( it->second );
      }
    }
    for ( const auto& g : c.gates_ )
      for ( auto f : g.fanin )
        c.gates_[f].fanout.push_back( g.id );

    c.level_ = levelize( c.gates_ );

    c.pi_index_.assign( c.gates_.size(), 0 );
    for ( const auto& g : c.gates_ )
      if ( g.kind == GateKind::Input )
      {
        c.pi_index_[g.id] = c.pis_.size();
        c.pis_.push_back( g.id );
      }
    c.po_flag_.assign( c.gates_.size(), 0 );
    for ( const auto& [name, line] : outputs_ )
    {
      auto it = c.by_name_.find( name );
      if ( it == c.by_name_.end() )
        throw UndefinedNetError( where( line ) + "undefined output net '" + name + "'" );
      if ( c.po_flag_[it->second] )
        continue;
      c.po_flag_[it->second] = 1;
      c.pos_.push_back( it->second );
    }

    c.topo_.resize( c.gates_.size() );
    for ( std::size_t i = 0; i < c.gates_.size(); ++i )
      c.topo_[i] = static_cast<GateId>( i );
    std::stable_sort( c.topo_.begin(), c.topo_.end(), [&]( GateId a, GateId b ) { return c.level_[a] < c.level_[b]; } );
    return c;
  }

private:
  struct Def
  {
    std::string name;
    GateKind kind;
    std::vector<std::string> fanin;
    std::size_t line;
  };

  static std::string where( std::size_t line )
  {
    return line ? "line " + std::to_string( line ) + ": " : std::string{};
  }

  void define( const std::string& name, GateKind kind, std::vector<std::string> fanin, std::size_t line )
  {
    if ( !names_.emplace( name, defs_.size() ).second )
      throw SyntaxError( line, "net '" + name + "' defined twice" );
    defs_.push_back( { name, kind, std::move( fanin ), line } );
  }

  std::vector<Def> defs_;
  std::vector<std::pair<std::string, std::size_t>> outputs_;
  std::unordered_map<std::string, std::size_t> names_;
};

namespace detail
{

inline std::string_view trim( std::string_view s )
{
  while ( !s.empty() && std::isspace( static_cast<unsigned char>( s.front() ) ) )
    s.remove_prefix( 1 );
  while ( !s.empty() && std::isspace( static_cast<unsigned char>( s.back() ) ) )
    s.remove_suffix( 1 );
  return s;
}

inline bool valid_identifier( std::string_view s )
{
  if ( s.empty() )
    return false;
  return std::all_of( s.begin(), s.end(), []( unsigned char c ) {
    return !std::isspace( c ) && c != '(' && c != ')' && c != ',' && c != '=' && c != '#';
  } );
}

} // namespace detail

inline std::vector<unsigned> levelize( const Circuit& c )
{
  return levelize( c.gates() );
}

/// Parses the ISCAS `.bench` dialect.
inline Circuit parse_bench( std::string_view text )
{
  CircuitBuilder builder;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while ( pos <= text.size() )
  {
    auto end = text.find( '\n', pos );
    if ( end == std::string_view::npos )
      end = text.size();
    auto line = text.substr( pos, end - pos );
    pos = end + 1;
    ++line_no;

    if ( auto hash = line.find( '#' ); hash != std::string_view::npos )
      line = line.substr( 0, hash );
    line = detail::trim( line );
    if ( line.empty() )
      continue;

    auto open = line.find( '(' );
    auto close = line.rfind( ')' );
    if ( open == std::string_view::npos || close == std::string_view::npos || close < open ||
         !detail::trim( line.substr( close + 1 ) ).empty() )
      throw SyntaxError( line_no, "expected 'NAME(...)' in '" + std::string( line ) + "'" );

    auto split_args = [&]( std::string_view args ) {
      std::vector<std::string> out;
      std::size_t p = 0;
      while ( true )
      {
        auto comma = args.find( ',', p );
        auto tok = detail::trim( args.substr( p, comma == std::string_view::npos ? std::string_view::npos : comma - p ) );
        if ( !detail::valid_identifier( tok ) )
          throw SyntaxError( line_no, "bad operand list '" + std::string( args ) + "'" );
        out.emplace_back( tok );
        if ( comma == std::string_view::npos )
          break;
        p = comma + 1;
      }
      return out;
    };

    auto eq = line.find( '=' );
    if ( eq == std::string_view::npos )
    {
      auto keyword = detail::trim( line.substr( 0, open ) );
      auto arg = detail::trim( line.substr( open + 1, close - open - 1 ) );
      if ( !detail::valid_identifier( arg ) )
        throw SyntaxError( line_no, "bad net name '" + std::string( arg ) + "'" );
      if ( keyword == "INPUT" )
        builder.add_input( std::string( arg ), line_no );
      else if ( keyword == "OUTPUT" )
        builder.add_output( std::string( arg ), line_no );
      else
        throw SyntaxError( line_no, "unknown declaration '" + std::string( keyword ) + "'" );
      continue;
    }

    if ( eq > open )
      throw SyntaxError( line_no, "misplaced '='" );
    auto lhs = detail::trim( line.substr( 0, eq ) );
    auto func = detail::trim( line.substr( eq + 1, open - eq - 1 ) );
    if ( !detail::valid_identifier( lhs ) )
      throw SyntaxError( line_no, "bad net name '" + std::string( lhs ) + "'" );
    auto args = split_args( line.substr( open + 1, close - open - 1 ) );

    std::string upper( func );
    std::transform( upper.begin(), upper.end(), upper.begin(), []( unsigned char c ) { return static_cast<char>( std::toupper( c ) ); } );
    if ( upper == "DFF" )
    {
      if ( args.size() != 1 )
        throw ArityError( "line " + std::to_string( line_no ) + ": DFF '" + std::string( lhs ) + "' needs one input" );
      builder.add_flipflop( std::string( lhs ), args.front(), line_no );
      continue;
    }
    auto kind = kind_from_name( func );
    if ( !kind )
      throw SyntaxError( line_no, "unknown gate type '" + std::string( func ) + "'" );
    builder.add_gate( std::string( lhs ), *kind, std::move( args ), line_no );
  }
  return builder.build();
}

/// Writes the circuit back as `.bench` text in gate-id order.
inline std::string to_bench( const Circuit& c )
{
  std::ostringstream os;
  for ( auto pi : c.primary_inputs() )
    os << "INPUT(" << c.name( pi ) << ")\n";
  for ( auto po : c.primary_outputs() )
    os << "OUTPUT(" << c.name( po ) << ")\n";
  for ( const auto& g : c.gates() )
  {
    if ( g.kind == GateKind::Input )
      continue;
    os << g.name << " = " << kind_name( g.kind ) << "(";
    for ( std::size_t i = 0; i < g.fanin.size(); ++i )
      os << ( i ? ", " : "" ) << c.name( g.fanin[i] );
    os << ")\n";
  }
  return os.str();
}

/// Logic cone of fault activation and propagation for one fault site.
struct Cone
{
  GateId fault_site{};
  std::vector<GateId> members;  // ascending gate ids
  std::vector<GateId> cone_pis; // ascending gate ids
  std::vector<GateId> cone_pos; // primary-output order

  std::vector<char> in_cone;   // indexed by gate id
  std::vector<char> in_fanout; // members reachable from fault_site (site included)

  bool contains( GateId g ) const { return in_cone[g] != 0; }
  bool in_fanout_region( GateId g ) const { return in_fanout[g] != 0; }
};

/// Transitive fanin of the site plus transitive fanin of every PO the site
/// reaches. Throws UnreachableFaultError when no PO is reachable.
inline Cone extract_cone( const Circuit& c, GateId site )
{
  if ( site >= c.size() )
    throw std::out_of_range( "fault site out of range" );

  Cone cone;
  cone.fault_site = site;
  std::vector<char> fwd( c.size(), 0 );
  std::vector<GateId> stack{ site };
  fwd[site] = 1;
  while ( !stack.empty() )
  {
    auto g = stack.back();
    stack.pop_back();
    for ( auto h : c.gate( g ).fanout )
      if ( !fwd[h] )
      {
        fwd[h] = 1;
        stack.push_back( h );
      }
  }
  for ( auto po : c.primary_outputs() )
    if ( fwd[po] )
      cone.cone_pos.push_back( po );
  if ( cone.cone_pos.empty() )
    throw UnreachableFaultError( "fault site '" + c.name( site ) + "' reaches no primary output" );

  cone.in_cone.assign( c.size(), 0 );
  stack.assign( cone.cone_pos.begin(), cone.cone_pos.end() );
  stack.push_back( site );
  for ( auto g : stack )
    cone.in_cone[g] = 1;
  while ( !stack.empty() )
  {
    auto g = stack.back();
    stack.pop_back();
    for ( auto f : c.gate( g ).fanin )
      if ( !cone.in_cone[f] )
      {
        cone.in_cone[f] = 1;
        stack.push_back( f );
      }
  }

  cone.in_fanout.assign( c.size(), 0 );
  for ( GateId g = 0; g < c.size(); ++g )
  {
    if ( !cone.in_cone[g] )
      continue;
    cone.members.push_back( g );
    if ( fwd[g] )
      cone.in_fanout[g] = 1;
    if ( c.is_pi( g ) )
      cone.cone_pis.push_back( g );
  }
  return cone;
}

} // namespace cdsl
