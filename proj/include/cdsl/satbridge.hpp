#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <span>
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

/// CNF over DIMACS literals (variables are 1-based, negative = negated).
struct CnfInstance
{
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
  std::vector<int> good_var;   // per gate, 0 when unmapped
  std::vector<int> faulty_var; // per gate, 0 outside the fanout region
  std::vector<std::string> comments;

  int new_var() { return ++num_vars; }
  void add( std::vector<int> clause ) { clauses.push_back( std::move( clause ) ); }
};

namespace detail
{

/// Consistency clauses for out = kind(in...). AND/OR take k+1 clauses,
/// XOR chains pairwise through fresh variables.
inline void encode_gate( CnfInstance& cnf, GateKind kind, int out, std::span<const int> in )
{
  switch ( kind )
  {
  case GateKind::Input: return;
  case GateKind::Output:
  case GateKind::Buf:
    cnf.add( { -out, in[0] } );
    cnf.add( { out, -in[0] } );
    return;
  case GateKind::Not:
    cnf.add( { -out, -in[0] } );
    cnf.add( { out, in[0] } );
    return;
  case GateKind::And:
  case GateKind::Nand:
  {
    const int o = kind == GateKind::And ? out : -out;
    std::vector<int> big{ o };
    for ( auto a : in )
    {
      cnf.add( { -o, a } );
      big.push_back( -a );
    }
    cnf.add( std::move( big ) );
    return;
  }
  case GateKind::Or:
  case GateKind::Nor:
  {
    const int o = kind == GateKind::Or ? out : -out;
    std::vector<int> big{ -o };
    for ( auto a : in )
    {
      cnf.add( { o, -a } );
      big.push_back( a );
    }
    cnf.add( std::move( big ) );
    return;
  }
  case GateKind::Xor:
  case GateKind::Xnor:
  {
    const int o = kind == GateKind::Xor ? out : -out;
    if ( in.size() == 1 )
    {
      cnf.add( { -o, in[0] } );
      cnf.add( { o, -in[0] } );
      return;
    }
    int acc = in[0];
    for ( std::size_t i = 1; i < in.size(); ++i )
    {
      const int t = i + 1 == in.size() ? o : cnf.new_var();
      const int b = in[i];
      cnf.add( { -t, acc, b } );
      cnf.add( { -t, -acc, -b } );
      cnf.add( { t, -acc, b } );
      cnf.add( { t, acc, -b } );
      acc = t;
    }
    return;
  }
  }
}

inline std::uint64_t fnv1a( std::uint64_t h, std::uint64_t x )
{
  for ( int i = 0; i < 8; ++i )
  {
    h ^= ( x >> ( 8 * i ) ) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

} // namespace detail

/// FNV-1a over (gate, good var, faulty var) triples of mapped gates.
inline std::uint64_t varmap_digest( const CnfInstance& cnf )
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for ( std::size_t g = 0; g < cnf.good_var.size(); ++g )
  {
    if ( !cnf.good_var[g] )
      continue;
    h = detail::fnv1a( h, g );
    h = detail::fnv1a( h, static_cast<std::uint64_t>( cnf.good_var[g] ) );
    h = detail::fnv1a( h, static_cast<std::uint64_t>( g < cnf.faulty_var.size() ? cnf.faulty_var[g] : 0 ) );
  }
  return h;
}

/// Good machine over the cone, faulty machine over the site's fanout region
/// (sharing the good variables elsewhere), and "some cone output differs".
inline CnfInstance encode( const Circuit& c, const Cone& cone, const Fault& fault, std::span<const PiConstraint> constraints = {} )
{
  CnfInstance cnf;
  cnf.good_var.assign( c.size(), 0 );
  cnf.faulty_var.assign( c.size(), 0 );
  for ( auto g : cone.members )
    cnf.good_var[g] = cnf.new_var();
  for ( auto g : cone.members )
    if ( cone.in_fanout_region( g ) )
      cnf.faulty_var[g] = cnf.new_var();

  std::vector<int> in;
  for ( auto g : cone.members )
  {
    const auto& gate = c.gate( g );
    in.clear();
    for ( auto f : gate.fanin )
      in.push_back( cnf.good_var[f] );
    detail::encode_gate( cnf, gate.kind, cnf.good_var[g], in );
  }
  for ( auto g : cone.members )
  {
    if ( !cone.in_fanout_region( g ) || g == fault.site )
      continue;
    const auto& gate = c.gate( g );
    in.clear();
    for ( auto f : gate.fanin )
      in.push_back( cnf.faulty_var[f] ? cnf.faulty_var[f] : cnf.good_var[f] );
    detail::encode_gate( cnf, gate.kind, cnf.faulty_var[g], in );
  }
  const int site_f = cnf.faulty_var[fault.site];
  cnf.add( { fault.stuck_value() ? site_f : -site_f } );

  std::vector<int> any;
  for ( auto po : cone.cone_pos )
  {
    if ( !cnf.faulty_var[po] )
      continue;
    const int d = cnf.new_var();
    cnf.add( { -d, cnf.good_var[po], cnf.faulty_var[po] } );
    cnf.add( { -d, -cnf.good_var[po], -cnf.faulty_var[po] } );
    any.push_back( d );
  }
  cnf.add( std::move( any ) );

  for ( const auto& pc : constraints )
    if ( cnf.good_var[pc.pi] )
      cnf.add( { pc.value ? cnf.good_var[pc.pi] : -cnf.good_var[pc.pi] } );

  cnf.comments.push_back( "fault " + fault_name( c, fault ) );
  std::ostringstream dig;
  dig << "varmap " << std::hex << std::setw( 16 ) << std::setfill( '0' ) << varmap_digest( cnf );
  cnf.comments.push_back( dig.str() );
  return cnf;
}

inline std::string write_dimacs( const CnfInstance& cnf )
{
  std::ostringstream os;
  for ( const auto& line : cnf.comments )
    os << "c " << line << '\n';
  os << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for ( const auto& cl : cnf.clauses )
  {
    for ( auto l : cl )
      os << l << ' ';
    os << "0\n";
  }
  return os.str();
}

class DimacsError : public std::runtime_error
{
public:
  DimacsError( std::size_t line, const std::string& what )
      : std::runtime_error( "line " + std::to_string( line ) + ": " + what ), line_( line ) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Reads clauses and comment lines back; the variable map is not restored.
inline CnfInstance parse_dimacs( std::string_view text )
{
  CnfInstance cnf;
  std::istringstream is{ std::string( text ) };
  std::string line;
  std::size_t lineno = 0, declared = 0;
  bool header = false;
  std::vector<int> cur;
  while ( std::getline( is, line ) )
  {
    ++lineno;
    if ( line.empty() )
      continue;
    if ( line[0] == 'c' )
    {
      cnf.comments.push_back( line.size() > 2 ? line.substr( 2 ) : std::string() );
      continue;
    }
    std::istringstream ls( line );
    if ( line[0] == 'p' )
    {
      std::string p, fmt;
      long long v = -1, n = -1;
      if ( !( ls >> p >> fmt >> v >> n ) || fmt != "cnf" || v < 0 || n < 0 )
        throw DimacsError( lineno, "malformed problem line" );
      cnf.num_vars = static_cast<int>( v );
      declared = static_cast<std::size_t>( n );
      header = true;
      continue;
    }
    if ( !header )
      throw DimacsError( lineno, "clause before problem line" );
    std::string tok;
    while ( ls >> tok )
    {
      char* end = nullptr;
      long x = std::strtol( tok.c_str(), &end, 10 );
      if ( *end != '\0' || std::labs( x ) > cnf.num_vars )
        throw DimacsError( lineno, "bad literal '" + tok + "'" );
      if ( x == 0 )
      {
        cnf.clauses.push_back( std::move( cur ) );
        cur.clear();
      }
      else
        cur.push_back( static_cast<int>( x ) );
    }
  }
  if ( !cur.empty() )
    throw DimacsError( lineno, "unterminated clause" );
  if ( header && cnf.clauses.size() != declared )
    throw DimacsError( lineno, "declared " + std::to_string( declared ) + " clauses, found " + std::to_string( cnf.clauses.size() ) );
  return cnf;
}

enum class SatResult : std::uint8_t
{
  Sat,
  Unsat,
  Unknown
};

/// Small CDCL solver: two watched literals, first-UIP learning, activity
/// branching, no restarts or preprocessing.
class MiniSolver
{
public:
  explicit MiniSolver( const CnfInstance& cnf )
      : n_( cnf.num_vars ), assign_( n_, -1 ), level_( n_, 0 ), reason_( n_, -1 ), activity_( n_, 0.0 ), seen_( n_, 0 ),
        watches_( 2 * static_cast<std::size_t>( n_ ) )
  {
    polarity_.assign( n_, 1 );
    heap_.resize( n_ );
    heap_pos_.resize( n_ );
    for ( int v = 0; v < n_; ++v )
      heap_[v] = heap_pos_[v] = v; // all activities zero: index order is a heap
    std::size_t total = 0;
    for ( const auto& cl : cnf.clauses )
      total += cl.size() + 1;
    arena_.reserve( total + total / 2 );
    std::vector<int> lits;
    std::vector<std::uint8_t> mark( 2 * static_cast<std::size_t>( n_ ), 0 );
    for ( const auto& cl : cnf.clauses )
    {
      lits.clear();
      bool taut = false;
      for ( auto l : cl )
      {
        int x = lit( l );
        taut = taut || mark[x ^ 1];
        if ( !mark[x] )
        {
          mark[x] = 1;
          lits.push_back( x );
        }
      }
      for ( auto x : lits )
        mark[x] = 0;
      if ( taut )
        continue;
      if ( lits.empty() )
      {
        unsat_ = true;
        return;
      }
      if ( lits.size() == 1 )
      {
        auto v = value( lits[0] );
        if ( v == 0 )
        {
          unsat_ = true;
          return;
        }
        if ( v < 0 )
          enqueue( lits[0], -1 );
        continue;
      }
      attach( lits );
    }
  }

  SatResult solve( std::uint64_t conflict_limit = 0 )
  {
    if ( unsat_ || propagate() >= 0 )
      return SatResult::Unsat;
    while ( true )
    {
      int confl = propagate();
      if ( confl >= 0 )
      {
        ++conflicts_;
        if ( trail_lim_.empty() )
          return SatResult::Unsat;
        if ( conflict_limit && conflicts_ >= conflict_limit )
          return SatResult::Unknown;
        auto [learnt, bj] = analyze( confl );
        cancel_until( bj );
        if ( learnt.size() == 1 )
          enqueue( learnt[0], -1 );
        else
        {
          auto first = learnt[0];
          enqueue( first, attach( learnt ) );
        }
        var_inc_ /= 0.95;
        continue;
      }
      int best = -1;
      while ( !heap_.empty() && best < 0 )
      {
        const int v = heap_pop();
        if ( assign_[v] < 0 )
          best = v;
      }
      if ( best < 0 )
        return SatResult::Sat;
      trail_lim_.push_back( trail_.size() );
      enqueue( 2 * best + polarity_[best], -1 ); // saved phase, negative at first
    }
  }

  /// Model value of a 1-based variable after SAT.
  bool model( int var ) const { return assign_[var - 1] == 1; }
  std::uint64_t conflicts() const { return conflicts_; }

private:
  static int lit( int dimacs ) { return dimacs > 0 ? 2 * ( dimacs - 1 ) : 2 * ( -dimacs - 1 ) + 1; }

  /// 1 true, 0 false, -1 unassigned.
  int value( int l ) const
  {
    auto a = assign_[l >> 1];
    return a < 0 ? -1 : ( a ^ ( l & 1 ) );
  }

  /// Clauses live in one arena: a size word followed by the literals.
  /// A clause is referred to by the offset of its size word.
  int attach( const std::vector<int>& lits )
  {
    const int id = static_cast<int>( arena_.size() );
    watches_[lits[0] ^ 1].push_back( id );
    watches_[lits[1] ^ 1].push_back( id );
    arena_.push_back( static_cast<int>( lits.size() ) );
    arena_.insert( arena_.end(), lits.begin(), lits.end() );
    return id;
  }

  void enqueue( int l, int reason )
  {
    assign_[l >> 1] = static_cast<std::int8_t>( !( l & 1 ) );
    level_[l >> 1] = static_cast<int>( trail_lim_.size() );
    reason_[l >> 1] = reason;
    trail_.push_back( l );
  }

  /// Returns the conflicting clause or -1.
  int propagate()
  {
    while ( qhead_ < trail_.size() )
    {
      const int p = trail_[qhead_++];
      auto& ws = watches_[p]; // clauses watching the literal p made false
      const int falsified = p ^ 1;
      std::size_t i = 0, j = 0;
      while ( i < ws.size() )
      {
        const int ci = ws[i++];
        int* c = &arena_[ci + 1];
        const int size = arena_[ci];
        if ( c[0] == falsified )
          std::swap( c[0], c[1] );
        if ( value( c[0] ) == 1 )
        {
          ws[j++] = ci;
          continue;
        }
        bool moved = false;
        for ( int k = 2; k < size; ++k )
          if ( value( c[k] ) != 0 )
          {
            std::swap( c[1], c[k] );
            watches_[c[1] ^ 1].push_back( ci );
            moved = true;
            break;
          }
        if ( moved )
          continue;
        ws[j++] = ci;
        if ( value( c[0] ) == 0 )
        {
          while ( i < ws.size() )
            ws[j++] = ws[i++];
          ws.resize( j );
          qhead_ = trail_.size();
          return ci;
        }
        enqueue( c[0], ci );
      }
      ws.resize( j );
    }
    return -1;
  }

  std::pair<std::vector<int>, int> analyze( int confl )
  {
    std::vector<int> learnt{ -1 };
    const int cur = static_cast<int>( trail_lim_.size() );
    int path = 0, p = -1;
    std::size_t idx = trail_.size();
    do
    {
      const int* c = &arena_[confl + 1];
      const int size = arena_[confl];
      for ( int k = ( p < 0 ? 0 : 1 ); k < size; ++k )
      {
        const int v = c[k] >> 1;
        if ( seen_[v] || level_[v] == 0 )
          continue;
        seen_[v] = 1;
        activity_[v] += var_inc_;
        if ( heap_pos_[v] >= 0 )
          heap_up( heap_pos_[v] );
        if ( level_[v] == cur )
          ++path;
        else
          learnt.push_back( c[k] );
      }
      while ( !seen_[trail_[idx - 1] >> 1] )
        --idx;
      p = trail_[--idx];
      confl = reason_[p >> 1];
      seen_[p >> 1] = 0;
      --path;
    } while ( path > 0 );
    learnt[0] = p ^ 1;

    int bj = 0;
    std::size_t at = 1;
    for ( std::size_t k = 1; k < learnt.size(); ++k )
    {
      seen_[learnt[k] >> 1] = 0;
      if ( level_[learnt[k] >> 1] > bj )
      {
        bj = level_[learnt[k] >> 1];
        at = k;
      }
    }
    if ( learnt.size() > 1 )
      std::swap( learnt[1], learnt[at] );
    if ( var_inc_ > 1e100 )
    {
      for ( auto& a : activity_ )
        a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    return { std::move( learnt ), bj };
  }

  void cancel_until( int level )
  {
    if ( static_cast<int>( trail_lim_.size() ) <= level )
      return;
    for ( auto i = trail_.size(); i > trail_lim_[level]; --i )
    {
      const int v = trail_[i - 1] >> 1;
      polarity_[v] = static_cast<std::int8_t>( assign_[v] == 0 );
      assign_[v] = -1;
      reason_[v] = -1;
      heap_insert( v );
    }
    trail_.resize( trail_lim_[level] );
    trail_lim_.resize( level );
    qhead_ = trail_.size();
  }

  /* branching order: binary max-heap on activity, lowest index on ties */

  bool before( int a, int b ) const { return activity_[a] > activity_[b] || ( activity_[a] == activity_[b] && a < b ); }

  void heap_up( int i )
  {
    const int v = heap_[i];
    while ( i > 0 && before( v, heap_[( i - 1 ) / 2] ) )
    {
      heap_[i] = heap_[( i - 1 ) / 2];
      heap_pos_[heap_[i]] = i;
      i = ( i - 1 ) / 2;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
  }

  void heap_down( int i )
  {
    const int v = heap_[i];
    const int n = static_cast<int>( heap_.size() );
    while ( 2 * i + 1 < n )
    {
      int child = 2 * i + 1;
      if ( child + 1 < n && before( heap_[child + 1], heap_[child] ) )
        ++child;
      if ( !before( heap_[child], v ) )
        break;
      heap_[i] = heap_[child];
      heap_pos_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
  }

  void heap_insert( int v )
  {
    if ( heap_pos_[v] >= 0 )
      return;
    heap_.push_back( v );
    heap_up( static_cast<int>( heap_.size() ) - 1 );
  }

  int heap_pop()
  {
    const int top = heap_[0];
    heap_pos_[top] = -1;
    const int last = heap_.back();
    heap_.pop_back();
    if ( !heap_.empty() )
    {
      heap_[0] = last;
      heap_down( 0 );
    }
    return top;
  }

  int n_;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;
  std::vector<std::int8_t> assign_;
  std::vector<std::int8_t> polarity_; // 1 = negative literal next
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<char> seen_;
  std::vector<int> arena_;
  std::vector<std::vector<int>> watches_;
  std::vector<int> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  double var_inc_ = 1.0;
  std::uint64_t conflicts_ = 0;
  bool unsat_ = false;
};

/// PI projection of a model; PIs outside the cone stay X.
inline Pattern pattern_from_model( const Circuit& c, const CnfInstance& cnf, const MiniSolver& s )
{
  Pattern p;
  p.values.assign( c.primary_inputs().size(), Tri::X );
  for ( auto pi : c.primary_inputs() )
    if ( pi < cnf.good_var.size() && cnf.good_var[pi] )
      p.values[c.pi_index( pi )] = tri_from_bool( s.model( cnf.good_var[pi] ) );
  return p;
}

struct TimingRow
{
  Fault fault;
  double t_generate_us = 0; // cone extraction + encoding + DIMACS text
  double t_solve_us = 0;    // solver construction + search
  double t_cdsl_us = 0;     // engine on the same fault
  SatResult sat{ SatResult::Unsat };
  Status engine{ Status::Untestable };
};

namespace detail
{

template<class F>
double median_us( unsigned repeats, F&& f )
{
  std::vector<double> t;
  for ( unsigned i = 0; i < repeats; ++i )
  {
    auto t0 = std::chrono::steady_clock::now();
    f();
    t.push_back( std::chrono::duration<double, std::micro>( std::chrono::steady_clock::now() - t0 ).count() );
  }
  std::sort( t.begin(), t.end() );
  return t[t.size() / 2];
}

} // namespace detail

/// Per fault, median wall-clock of CNF generation, CNF solving and the
/// engine. A site that reaches no output gets a zero row.
inline std::vector<TimingRow> timed_compare( const Circuit& c, std::span<const Fault> faults, const EngineConfig& config,
                                             unsigned repeats = 5, std::span<const PiConstraint> constraints = {} )
{
  std::vector<TimingRow> rows;
  for ( const auto& f : faults )
  {
    TimingRow row;
    row.fault = f;
    Cone cone;
    try
    {
      cone = extract_cone( c, f.site );
    }
    catch ( const UnreachableFaultError& )
    {
      rows.push_back( row );
      continue;
    }
    CnfInstance cnf;
    std::size_t sink = 0;
    row.t_generate_us = detail::median_us( repeats, [&] {
      auto k = extract_cone( c, f.site );
      cnf = encode( c, k, f, constraints );
      sink += write_dimacs( cnf ).size();
    } );
    row.t_solve_us = detail::median_us( repeats, [&] {
      MiniSolver s( cnf );
      row.sat = s.solve();
    } );
    row.t_cdsl_us = detail::median_us( repeats, [&] { row.engine = run_fault( c, cone, f, config, constraints ).status; } );
    if ( sink == 0 )
      throw std::logic_error( "empty DIMACS text" );
    rows.push_back( row );
  }
  return rows;
}

inline std::string timing_csv( const Circuit& c, std::span<const TimingRow> rows )
{
  std::ostringstream os;
  os << "fault,t_generate_us,t_solve_us,t_cdsl_us\n";
  os << std::fixed << std::setprecision( 3 );
  for ( const auto& r : rows )
    os << fault_name( c, r.fault ) << ',' << r.t_generate_us << ',' << r.t_solve_us << ',' << r.t_cdsl_us << '\n';
  return os.str();
}

} // namespace cdsl
