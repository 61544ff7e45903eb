#include "test_util.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace cdsl;
using cdsl::test::id;

TEST( Fault, EnumerateSmall )
{
  auto c = parse_bench( "INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)" );
  auto faults = enumerate_faults( c );
  EXPECT_EQ( faults.size(), 6u );
  std::set<std::string> names;
  for ( const auto& f : faults )
    names.insert( fault_name( c, f ) );
  EXPECT_EQ( names, ( std::set<std::string>{ "a/0", "a/1", "b/0", "b/1", "y/0", "y/1" } ) );
}

TEST( Fault, EnumerateC17 )
{
  auto c = gen::c17();
  auto faults = enumerate_faults( c );
  EXPECT_EQ( faults.size(), 22u );
  for ( std::size_t i = 0; i + 1 < faults.size(); i += 2 )
  {
    EXPECT_EQ( faults[i].site, faults[i + 1].site );
    EXPECT_EQ( faults[i].polarity, Polarity::Sa0 );
    EXPECT_EQ( faults[i + 1].polarity, Polarity::Sa1 );
  }
}

TEST( Fault, EffectValues )
{
  Fault sa0{ 0, Polarity::Sa0 }, sa1{ 0, Polarity::Sa1 };
  EXPECT_EQ( sa0.effect(), Value5::D );
  EXPECT_EQ( sa1.effect(), Value5::Dbar );
  EXPECT_TRUE( sa0.effect_good() );
  EXPECT_FALSE( sa1.effect_good() );
}

TEST( Fault, ParseAndName )
{
  auto c = gen::c17();
  for ( const auto& f : enumerate_faults( c ) )
    EXPECT_EQ( parse_fault( c, fault_name( c, f ) ), f );
  EXPECT_THROW( parse_fault( c, "G1" ), std::invalid_argument );
  EXPECT_THROW( parse_fault( c, "G1/2" ), std::invalid_argument );
  EXPECT_THROW( parse_fault( c, "nope/0" ), UndefinedNetError );
}

TEST( Coverage, NineOfTen )
{
  std::vector<AtpgResult> rs( 10 );
  for ( std::size_t i = 0; i < 9; ++i )
    rs[i].status = Status::Testable;
  rs[9].status = Status::Aborted;
  auto r = coverage( rs );
  EXPECT_EQ( r.n_total, 10u );
  EXPECT_EQ( r.n_testable, 9u );
  EXPECT_EQ( r.n_aborted, 1u );
  EXPECT_DOUBLE_EQ( r.fault_coverage, 0.9 );
}

TEST( Coverage, CountsAddUp )
{
  std::vector<AtpgResult> rs( 7 );
  rs[0].status = rs[1].status = Status::Untestable;
  rs[2].status = rs[3].status = rs[4].status = Status::Testable;
  auto r = coverage( rs );
  EXPECT_EQ( r.n_testable + r.n_untestable + r.n_aborted, r.n_total );
  EXPECT_GE( r.fault_coverage, 0.0 );
  EXPECT_LE( r.fault_coverage, 1.0 );
  EXPECT_DOUBLE_EQ( r.fault_coverage, 3.0 / 7.0 );
  EXPECT_DOUBLE_EQ( r.test_coverage(), 3.0 / 5.0 );
}

TEST( Coverage, EmptyThrows )
{
  EXPECT_THROW( coverage( {} ), EmptyInputError );
}

TEST( Status, NamesRoundTrip )
{
  for ( auto s : { Status::Testable, Status::Untestable, Status::Aborted } )
    EXPECT_EQ( status_from_name( status_name( s ) ), s );
  EXPECT_FALSE( status_from_name( "testable" ) );
}
