#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "netlist.hpp"

// Synthetic benchmark circuits standing in for the ISCAS-85 suite: the same
// functional classes (priority logic, SEC/SEC-DED codecs, ALU, array
// multiplier) at comparable or smaller size.

namespace cdsl::gen
{

/// CircuitBuilder with automatic net names.
class Net
{
public:
  std::string input( const std::string& name )
  {
    b_.add_input( name );
    return name;
  }
  void output( const std::string& name ) { b_.add_output( name ); }

  std::string gate( GateKind k, std::vector<std::string> in, std::string name = {} )
  {
    if ( name.empty() )
      name = "n" + std::to_string( next_++ );
    b_.add_gate( name, k, std::move( in ) );
    return name;
  }
  std::string and_( std::vector<std::string> in, std::string name = {} ) { return gate( GateKind::And, std::move( in ), std::move( name ) ); }
  std::string or_( std::vector<std::string> in, std::string name = {} ) { return gate( GateKind::Or, std::move( in ), std::move( name ) ); }
  std::string nand_( std::vector<std::string> in, std::string name = {} ) { return gate( GateKind::Nand, std::move( in ), std::move( name ) ); }
  std::string nor_( std::vector<std::string> in, std::string name = {} ) { return gate( GateKind::Nor, std::move( in ), std::move( name ) ); }
  std::string xor_( std::string a, std::string b, std::string name = {} ) { return gate( GateKind::Xor, { std::move( a ), std::move( b ) }, std::move( name ) ); }
  std::string not_( std::string a, std::string name = {} ) { return gate( GateKind::Not, { std::move( a ) }, std::move( name ) ); }
  std::string buf_( std::string a, std::string name = {} ) { return gate( GateKind::Buf, { std::move( a ) }, std::move( name ) ); }

  /// Two-input XOR out of four NANDs.
  std::string xor_nand( const std::string& a, const std::string& b, std::string name = {} )
  {
    auto m = nand_( { a, b } );
    return nand_( { nand_( { a, m } ), nand_( { b, m } ) }, std::move( name ) );
  }

  Circuit build() const { return b_.build(); }

private:
  CircuitBuilder b_;
  std::size_t next_ = 0;
};

inline constexpr std::string_view c17_bench = R"(# c17
INPUT(1)
INPUT(2)
INPUT(3)
INPUT(6)
INPUT(7)
OUTPUT(22)
OUTPUT(23)
10 = NAND(1, 3)
11 = NAND(3, 6)
16 = NAND(2, 11)
19 = NAND(11, 7)
22 = NAND(10, 16)
23 = NAND(16, 19)
)";

inline Circuit c17() { return parse_bench( c17_bench ); }

/// 27-channel interrupt controller in the style of c432: three request
/// buses with fixed bus priority, a shared enable mask, and a 4-bit encoder
/// for the highest selected channel.
inline Circuit priority_controller( unsigned channels = 9 )
{
  Net n;
  std::vector<std::string> a, b, c, e;
  for ( unsigned i = 0; i < channels; ++i )
    a.push_back( n.input( "A" + std::to_string( i ) ) );
  for ( unsigned i = 0; i < channels; ++i )
    b.push_back( n.input( "B" + std::to_string( i ) ) );
  for ( unsigned i = 0; i < channels; ++i )
    c.push_back( n.input( "C" + std::to_string( i ) ) );
  for ( unsigned i = 0; i < channels; ++i )
    e.push_back( n.input( "E" + std::to_string( i ) ) );

  std::vector<std::string> ra, rb, rc;
  for ( unsigned i = 0; i < channels; ++i )
  {
    ra.push_back( n.and_( { a[i], e[i] } ) );
    rb.push_back( n.and_( { b[i], e[i] } ) );
    rc.push_back( n.and_( { c[i], e[i] } ) );
  }
  auto any_a = n.or_( ra, "PA" );
  auto any_b = n.or_( rb, "PB" );
  auto any_c = n.or_( rc, "PC" );
  auto na = n.not_( any_a );
  auto nb = n.not_( any_b );

  std::vector<std::string> sel;
  for ( unsigned i = 0; i < channels; ++i )
    sel.push_back( n.or_( { ra[i], n.and_( { na, rb[i] } ), n.and_( { na, nb, rc[i] } ) } ) );

  // Highest index wins.
  std::vector<std::string> first( channels );
  std::string none_above;
  for ( unsigned i = channels; i-- > 0; )
  {
    first[i] = none_above.empty() ? sel[i] : n.and_( { sel[i], none_above } );
    auto ns = n.not_( sel[i] );
    none_above = none_above.empty() ? ns : n.and_( { none_above, ns } );
  }
  n.output( any_a );
  n.output( any_b );
  n.output( any_c );
  for ( unsigned bit = 0; bit < 4; ++bit )
  {
    std::vector<std::string> terms;
    for ( unsigned i = 0; i < channels; ++i )
      if ( ( i >> bit ) & 1 )
        terms.push_back( first[i] );
    std::string out = "CH" + std::to_string( bit );
    if ( terms.size() == 1 )
      n.buf_( terms[0], out );
    else
      n.or_( terms, out );
    n.output( out );
  }
  return n.build();
}

namespace detail
{

/// Distinct syndrome columns of weight >= 2 (weight-3 first).
inline std::vector<unsigned> code_columns( unsigned bits, unsigned count )
{
  std::vector<unsigned> out;
  for ( unsigned w : { 3u, 2u, 4u, 5u } )
    for ( unsigned v = 0; v < ( 1u << bits ) && out.size() < count; ++v )
      if ( static_cast<unsigned>( __builtin_popcount( v ) ) == w )
        out.push_back( v );
  return out;
}

inline std::string xor_tree( Net& n, std::vector<std::string> v, bool nand_xor )
{
  while ( v.size() > 1 )
  {
    std::vector<std::string> next;
    for ( std::size_t i = 0; i + 1 < v.size(); i += 2 )
      next.push_back( nand_xor ? n.xor_nand( v[i], v[i + 1] ) : n.xor_( v[i], v[i + 1] ) );
    if ( v.size() % 2 )
      next.push_back( v.back() );
    v = std::move( next );
  }
  return v[0];
}

} // namespace detail

/// Single-error-correcting decoder over `data` bits with an 8-bit syndrome
/// and a correction enable (c499-like). With `nand_xor` every XOR is built
/// from NANDs (c1355-like).
inline Circuit sec_decoder( unsigned data = 32, unsigned check = 8, bool nand_xor = false )
{
  Net n;
  std::vector<std::string> d, k;
  for ( unsigned i = 0; i < data; ++i )
    d.push_back( n.input( "ID" + std::to_string( i ) ) );
  for ( unsigned j = 0; j < check; ++j )
    k.push_back( n.input( "IC" + std::to_string( j ) ) );
  auto en = n.input( "R" );
  auto cols = detail::code_columns( check, data );

  std::vector<std::string> s, ns;
  for ( unsigned j = 0; j < check; ++j )
  {
    std::vector<std::string> terms{ k[j] };
    for ( unsigned i = 0; i < data; ++i )
      if ( ( cols[i] >> j ) & 1 )
        terms.push_back( d[i] );
    s.push_back( detail::xor_tree( n, terms, nand_xor ) );
    ns.push_back( n.not_( s.back() ) );
  }
  for ( unsigned i = 0; i < data; ++i )
  {
    std::vector<std::string> lits{ en };
    for ( unsigned j = 0; j < check; ++j )
      lits.push_back( ( cols[i] >> j ) & 1 ? s[j] : ns[j] );
    auto flip = n.and_( lits );
    auto out = "OD" + std::to_string( i );
    if ( nand_xor )
      n.xor_nand( d[i], flip, out );
    else
      n.xor_( d[i], flip, out );
    n.output( out );
  }
  return n.build();
}

/// SEC/DED codec with single- and double-error flags (c1908-like).
inline Circuit secded( unsigned data = 16, unsigned check = 5 )
{
  Net n;
  std::vector<std::string> d, k;
  for ( unsigned i = 0; i < data; ++i )
    d.push_back( n.input( "D" + std::to_string( i ) ) );
  for ( unsigned j = 0; j < check; ++j )
    k.push_back( n.input( "K" + std::to_string( j ) ) );
  auto kp = n.input( "KP" );
  auto cols = detail::code_columns( check, data );

  std::vector<std::string> s, ns;
  for ( unsigned j = 0; j < check; ++j )
  {
    std::vector<std::string> terms{ k[j] };
    for ( unsigned i = 0; i < data; ++i )
      if ( ( cols[i] >> j ) & 1 )
        terms.push_back( d[i] );
    s.push_back( detail::xor_tree( n, terms, true ) );
    ns.push_back( n.not_( s.back() ) );
  }
  std::vector<std::string> all = d;
  all.insert( all.end(), k.begin(), k.end() );
  all.push_back( kp );
  auto parity = detail::xor_tree( n, all, false );
  auto err = n.or_( s );
  auto single = n.and_( { err, parity }, "SE" );
  n.nor_( { n.not_( err ), parity }, "DE" );
  n.output( "SE" );
  n.output( "DE" );
  for ( unsigned i = 0; i < data; ++i )
  {
    std::vector<std::string> lits{ single };
    for ( unsigned j = 0; j < check; ++j )
      lits.push_back( ( cols[i] >> j ) & 1 ? s[j] : ns[j] );
    auto out = "O" + std::to_string( i );
    n.xor_( d[i], n.and_( lits ), out );
    n.output( out );
  }
  return n.build();
}

/// 8-bit ALU: add, subtract, and, or, xor, pass-A selected by a 3-bit
/// opcode, with carry out and zero flag (c880-like).
inline Circuit alu( unsigned width = 8 )
{
  Net n;
  std::vector<std::string> a, b, op;
  for ( unsigned i = 0; i < width; ++i )
    a.push_back( n.input( "A" + std::to_string( i ) ) );
  for ( unsigned i = 0; i < width; ++i )
    b.push_back( n.input( "B" + std::to_string( i ) ) );
  auto cin = n.input( "CIN" );
  for ( unsigned i = 0; i < 3; ++i )
    op.push_back( n.input( "OP" + std::to_string( i ) ) );
  std::vector<std::string> nop;
  for ( auto& o : op )
    nop.push_back( n.not_( o ) );
  auto code = [&]( unsigned v ) {
    return n.and_( { ( v & 1 ) ? op[0] : nop[0], ( v & 2 ) ? op[1] : nop[1], ( v & 4 ) ? op[2] : nop[2] } );
  };
  auto s_add = code( 0 ), s_sub = code( 1 ), s_and = code( 2 ), s_or = code( 3 ), s_xor = code( 4 ), s_pass = code( 5 );
  auto arith = n.or_( { s_add, s_sub } );

  // Subtraction adds ~B with carry-in forced to 1.
  auto carry = n.or_( { n.and_( { s_add, cin } ), s_sub } );
  std::vector<std::string> res;
  for ( unsigned i = 0; i < width; ++i )
  {
    auto bi = n.xor_( b[i], s_sub );
    auto p = n.xor_( a[i], bi );
    auto sum = n.xor_( p, carry );
    carry = n.or_( { n.and_( { a[i], bi } ), n.and_( { p, carry } ) } );
    auto r = n.or_( { n.and_( { arith, sum } ), n.and_( { s_and, a[i], b[i] } ), n.and_( { s_or, n.or_( { a[i], b[i] } ) } ),
                      n.and_( { s_xor, n.xor_( a[i], b[i] ) } ), n.and_( { s_pass, a[i] } ) },
                    "F" + std::to_string( i ) );
    res.push_back( r );
    n.output( r );
  }
  n.and_( { arith, carry }, "COUT" );
  n.output( "COUT" );
  n.nor_( res, "ZERO" );
  n.output( "ZERO" );
  return n.build();
}

/// Unsigned array multiplier, carry-save rows and a ripple final adder
/// (c6288-like at width 16).
inline Circuit multiplier( unsigned width = 8 )
{
  Net n;
  std::vector<std::string> a, b;
  for ( unsigned i = 0; i < width; ++i )
    a.push_back( n.input( "A" + std::to_string( i ) ) );
  for ( unsigned i = 0; i < width; ++i )
    b.push_back( n.input( "B" + std::to_string( i ) ) );

  auto full_add = [&]( const std::string& x, const std::string& y, const std::string& z ) {
    auto p = n.xor_( x, y );
    return std::pair{ n.xor_( p, z ), n.or_( { n.and_( { x, y } ), n.and_( { p, z } ) } ) };
  };
  auto half_add = [&]( const std::string& x, const std::string& y ) { return std::pair{ n.xor_( x, y ), n.and_( { x, y } ) }; };

  // pp[i][j] = a_j & b_i, weight i + j.
  std::vector<std::vector<std::string>> pp( width, std::vector<std::string>( width ) );
  for ( unsigned i = 0; i < width; ++i )
    for ( unsigned j = 0; j < width; ++j )
      pp[i][j] = n.and_( { a[j], b[i] } );

  std::vector<std::string> product;
  // Running sum bits for weights i..i+width-1 and carries into them.
  std::vector<std::string> sum( pp[0].begin(), pp[0].end() ), carry( width );
  product.push_back( sum[0] );
  for ( unsigned i = 1; i < width; ++i )
  {
    std::vector<std::string> nsum( width ), ncarry( width );
    for ( unsigned j = 0; j < width; ++j )
    {
      // weight i + j: pp[i][j] + previous sum at that weight + carry
      std::string prev = j + 1 < width ? sum[j + 1] : std::string();
      std::string cin = carry[j];
      if ( prev.empty() && cin.empty() )
        nsum[j] = pp[i][j];
      else if ( prev.empty() || cin.empty() )
        std::tie( nsum[j], ncarry[j] ) = half_add( pp[i][j], prev.empty() ? cin : prev );
      else
        std::tie( nsum[j], ncarry[j] ) = full_add( pp[i][j], prev, cin );
    }
    sum = std::move( nsum );
    carry = std::move( ncarry );
    product.push_back( sum[0] );
  }
  // Final ripple over the remaining weights.
  std::string rc;
  for ( unsigned j = 1; j < width; ++j )
  {
    std::string x = sum[j], y = carry[j - 1];
    std::string s;
    if ( y.empty() && rc.empty() )
      s = x;
    else if ( y.empty() || rc.empty() )
      std::tie( s, rc ) = half_add( x, y.empty() ? rc : y );
    else
      std::tie( s, rc ) = full_add( x, y, rc );
    product.push_back( s );
  }
  {
    std::string y = carry[width - 1];
    if ( !y.empty() && !rc.empty() )
      product.push_back( n.or_( { y, rc } ) ); // cannot both be 1 at the top weight
    else
      product.push_back( !y.empty() ? y : rc );
  }
  for ( std::size_t k = 0; k < product.size(); ++k )
  {
    auto name = "P" + std::to_string( k );
    n.buf_( product[k], name );
    n.output( name );
  }
  return n.build();
}

/// Random reconvergent logic seeded with redundant consensus structures
/// (y = ab + a'c + bc) whose `bc` terms carry untestable faults.
inline Circuit redundant_random( unsigned inputs, unsigned gates, unsigned consensus, std::uint64_t seed )
{
  Net n;
  std::mt19937_64 rng( seed );
  auto pick = [&]( std::size_t hi ) { return static_cast<std::size_t>( rng() % hi ); };
  std::vector<std::string> pool;
  for ( unsigned i = 0; i < inputs; ++i )
    pool.push_back( n.input( "I" + std::to_string( i ) ) );

  static constexpr GateKind kinds[] = { GateKind::And, GateKind::Nand, GateKind::Or, GateKind::Nor, GateKind::Xor, GateKind::Not };
  std::vector<int> used( pool.size(), 0 );
  for ( unsigned g = 0; g < gates; ++g )
  {
    auto k = kinds[pick( std::size( kinds ) )];
    // Prefer recent nets so depth builds up and paths reconverge.
    auto from = [&] {
      std::size_t lo = pool.size() > 12 ? pool.size() - 12 : 0;
      std::size_t i = rng() % 3 == 0 ? pick( pool.size() ) : lo + pick( pool.size() - lo );
      ++used[i];
      return pool[i];
    };
    std::string net;
    if ( k == GateKind::Not )
      net = n.not_( from() );
    else
    {
      std::vector<std::string> in{ from(), from() };
      if ( in[0] == in[1] )
        in[1] = pool[pick( pool.size() )];
      if ( in[0] == in[1] )
        in.pop_back();
      if ( in.size() == 1 )
        net = n.buf_( in[0] );
      else
        net = n.gate( k, in );
    }
    pool.push_back( net );
    used.push_back( 0 );
    if ( consensus && g % ( gates / consensus + 1 ) == gates / ( 2 * consensus ) )
    {
      auto a = from(), b = from(), c = from();
      if ( a != b && b != c && a != c )
      {
        auto y = n.or_( { n.and_( { a, b } ), n.and_( { n.not_( a ), c } ), n.and_( { b, c } ) } );
        pool.push_back( y );
        used.push_back( 0 );
      }
    }
  }
  unsigned outs = 0;
  for ( std::size_t i = inputs; i < pool.size(); ++i )
    if ( !used[i] )
    {
      n.output( pool[i] );
      ++outs;
    }
  if ( outs == 0 )
    n.output( pool.back() );
  return n.build();
}

} // namespace cdsl::gen
