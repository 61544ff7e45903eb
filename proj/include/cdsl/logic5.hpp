#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "netlist.hpp"

namespace cdsl
{

/// Three-valued boolean used for one machine (good or faulty).
enum class Tri : std::uint8_t
{
  Zero,
  One,
  X
};

constexpr Tri tri_not( Tri a )
{
  return a == Tri::X ? Tri::X : ( a == Tri::One ? Tri::Zero : Tri::One );
}

constexpr Tri tri_and( Tri a, Tri b )
{
  if ( a == Tri::Zero || b == Tri::Zero )
    return Tri::Zero;
  if ( a == Tri::X || b == Tri::X )
    return Tri::X;
  return Tri::One;
}

constexpr Tri tri_or( Tri a, Tri b )
{
  if ( a == Tri::One || b == Tri::One )
    return Tri::One;
  if ( a == Tri::X || b == Tri::X )
    return Tri::X;
  return Tri::Zero;
}

constexpr Tri tri_xor( Tri a, Tri b )
{
  if ( a == Tri::X || b == Tri::X )
    return Tri::X;
  return a == b ? Tri::Zero : Tri::One;
}

constexpr Tri tri_from_bool( bool b ) { return b ? Tri::One : Tri::Zero; }

constexpr char tri_char( Tri t )
{
  return t == Tri::Zero ? '0' : ( t == Tri::One ? '1' : 'X' );
}

/// Fault-free boolean function of a gate kind over three-valued inputs.
inline Tri eval_tri( GateKind kind, std::span<const Tri> in )
{
  Tri acc = Tri::X;
  switch ( kind )
  {
  case GateKind::Input: return Tri::X;
  case GateKind::Output:
  case GateKind::Buf: return in[0];
  case GateKind::Not: return tri_not( in[0] );
  case GateKind::And:
  case GateKind::Nand:
    acc = Tri::One;
    for ( auto v : in )
      acc = tri_and( acc, v );
    return kind == GateKind::Nand ? tri_not( acc ) : acc;
  case GateKind::Or:
  case GateKind::Nor:
    acc = Tri::Zero;
    for ( auto v : in )
      acc = tri_or( acc, v );
    return kind == GateKind::Nor ? tri_not( acc ) : acc;
  case GateKind::Xor:
  case GateKind::Xnor:
    acc = Tri::Zero;
    for ( auto v : in )
      acc = tri_xor( acc, v );
    return kind == GateKind::Xnor ? tri_not( acc ) : acc;
  }
  return Tri::X;
}

/// D-calculus value. Each value is a (good, faulty) pair:
/// Zero=(0,0) One=(1,1) D=(1,0) Dbar=(0,1) X=(x,x).
enum class Value5 : std::uint8_t
{
  Zero,
  One,
  X,
  D,
  Dbar
};

inline constexpr std::array<Value5, 5> all_values5{ Value5::Zero, Value5::One, Value5::X, Value5::D, Value5::Dbar };
inline constexpr std::array<Value5, 4> concrete_values5{ Value5::Zero, Value5::One, Value5::D, Value5::Dbar };
inline constexpr std::array<Value5, 2> binary_values5{ Value5::Zero, Value5::One };

struct TriPair
{
  Tri good;
  Tri faulty;
  constexpr bool operator==( const TriPair& ) const = default;
};

constexpr TriPair to_pair( Value5 v )
{
  switch ( v )
  {
  case Value5::Zero: return { Tri::Zero, Tri::Zero };
  case Value5::One: return { Tri::One, Tri::One };
  case Value5::D: return { Tri::One, Tri::Zero };
  case Value5::Dbar: return { Tri::Zero, Tri::One };
  case Value5::X: break;
  }
  return { Tri::X, Tri::X };
}

/// Pairs with exactly one unknown component have no five-valued image and
/// collapse to X.
constexpr Value5 from_pair( TriPair p )
{
  if ( p.good == Tri::X || p.faulty == Tri::X )
    return Value5::X;
  if ( p.good == p.faulty )
    return p.good == Tri::One ? Value5::One : Value5::Zero;
  return p.good == Tri::One ? Value5::D : Value5::Dbar;
}

constexpr Value5 from_bool( bool b ) { return b ? Value5::One : Value5::Zero; }

constexpr bool is_binary( Value5 v ) { return v == Value5::Zero || v == Value5::One; }
constexpr bool is_fault_effect( Value5 v ) { return v == Value5::D || v == Value5::Dbar; }

/// ZERO<->ONE, D<->DBAR; X stays X.
constexpr Value5 complement( Value5 v )
{
  switch ( v )
  {
  case Value5::Zero: return Value5::One;
  case Value5::One: return Value5::Zero;
  case Value5::D: return Value5::Dbar;
  case Value5::Dbar: return Value5::D;
  case Value5::X: break;
  }
  return Value5::X;
}

constexpr std::string_view value_name( Value5 v )
{
  switch ( v )
  {
  case Value5::Zero: return "0";
  case Value5::One: return "1";
  case Value5::D: return "D";
  case Value5::Dbar: return "D'";
  case Value5::X: break;
  }
  return "X";
}

/// Forward implication: evaluates good and faulty machines separately and
/// recombines. Throws ArityError on a fanin count the kind does not accept.
inline Value5 eval_gate( GateKind kind, std::span<const Value5> inputs )
{
  if ( !arity_ok( kind, inputs.size() ) )
    throw ArityError( std::string( kind_name( kind ) ) + " evaluated with " + std::to_string( inputs.size() ) + " inputs" );
  if ( kind == GateKind::Input )
    return Value5::X;

  Tri good = Tri::X, faulty = Tri::X;
  auto fold = [&]( Tri init, auto op ) {
    good = faulty = init;
    for ( auto v : inputs )
    {
      auto p = to_pair( v );
      good = op( good, p.good );
      faulty = op( faulty, p.faulty );
    }
  };
  bool invert = false;
  switch ( kind )
  {
  case GateKind::Output:
  case GateKind::Buf:
    return inputs[0];
  case GateKind::Not:
    return complement( inputs[0] );
  case GateKind::Nand:
    invert = true;
    [[fallthrough]];
  case GateKind::And:
    fold( Tri::One, tri_and );
    break;
  case GateKind::Nor:
    invert = true;
    [[fallthrough]];
  case GateKind::Or:
    fold( Tri::Zero, tri_or );
    break;
  case GateKind::Xnor:
    invert = true;
    [[fallthrough]];
  case GateKind::Xor:
    fold( Tri::Zero, tri_xor );
    break;
  default:
    break;
  }
  if ( invert )
  {
    good = tri_not( good );
    faulty = tri_not( faulty );
  }
  return from_pair( { good, faulty } );
}

inline Value5 eval_gate( GateKind kind, std::initializer_list<Value5> inputs )
{
  return eval_gate( kind, std::span<const Value5>( inputs.begin(), inputs.size() ) );
}

/// Controlling input value of AND/NAND (0) and OR/NOR (1); nullopt otherwise.
constexpr std::optional<bool> controlling_value( GateKind kind )
{
  switch ( kind )
  {
  case GateKind::And:
  case GateKind::Nand: return false;
  case GateKind::Or:
  case GateKind::Nor: return true;
  default: return std::nullopt;
  }
}

constexpr bool is_inverting( GateKind kind )
{
  return kind == GateKind::Nand || kind == GateKind::Nor || kind == GateKind::Not || kind == GateKind::Xnor;
}

/// Every minimal completion of the X inputs that makes the gate produce
/// `output`, drawing new input values from `domain`. An empty result means
/// the current inputs cannot produce `output`.
inline std::vector<std::vector<Value5>> justify_gate( GateKind kind, Value5 output, std::span<const Value5> current,
                                                      std::span<const Value5> domain )
{
  std::vector<std::vector<Value5>> out;
  if ( output == Value5::X )
    return out;

  std::vector<std::size_t> free;
  for ( std::size_t i = 0; i < current.size(); ++i )
    if ( current[i] == Value5::X )
      free.push_back( i );

  // Each free input either stays X or takes one of the domain values.
  const std::size_t radix = domain.size() + 1;
  std::size_t total = 1;
  for ( std::size_t i = 0; i < free.size(); ++i )
    total *= radix;

  std::vector<Value5> cand( current.begin(), current.end() );
  for ( std::size_t code = 0; code < total; ++code )
  {
    auto rest = code;
    for ( auto i : free )
    {
      auto digit = rest % radix;
      rest /= radix;
      cand[i] = digit == 0 ? Value5::X : domain[digit - 1];
    }
    if ( eval_gate( kind, cand ) != output )
      continue;
    // Monotonicity makes the single-revert test equivalent to full minimality.
    bool minimal = true;
    for ( auto i : free )
    {
      if ( cand[i] == Value5::X )
        continue;
      auto saved = cand[i];
      cand[i] = Value5::X;
      bool still = eval_gate( kind, cand ) == output;
      cand[i] = saved;
      if ( still )
      {
        minimal = false;
        break;
      }
    }
    if ( minimal )
      out.push_back( cand );
  }
  return out;
}

/// Binary outputs are justified over {0,1}; D/D' outputs over all four
/// concrete values.
inline std::vector<std::vector<Value5>> justify_gate( GateKind kind, Value5 output, std::span<const Value5> current )
{
  if ( is_binary( output ) )
    return justify_gate( kind, output, current, binary_values5 );
  return justify_gate( kind, output, current, concrete_values5 );
}

} // namespace cdsl
