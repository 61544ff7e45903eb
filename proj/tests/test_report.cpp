#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace cdsl;
using cdsl::test::id;

TEST( Report, FaultListRoundTrip )
{
  auto c = gen::c17();
  auto faults = enumerate_faults( c );
  auto text = write_fault_list( c, faults );
  EXPECT_EQ( parse_fault_list( c, text ), faults );
  EXPECT_EQ( parse_fault_list( c, "# header\n\n  1/0  # trailing\n" ).size(), 1u );
  try
  {
    parse_fault_list( c, "1/0\n1/7\n" );
    FAIL();
  }
  catch ( const FormatError& e )
  {
    EXPECT_EQ( e.line(), 2u );
  }
}

TEST( Report, Constraints )
{
  auto c = test::load_data( "masking.bench" );
  auto cs = parse_constraints( c, "p=0\n a = 1 \n" );
  ASSERT_EQ( cs.size(), 2u );
  EXPECT_EQ( cs[0], ( PiConstraint{ id( c, "p" ), false } ) );
  EXPECT_EQ( cs[1], ( PiConstraint{ id( c, "a" ), true } ) );
  EXPECT_EQ( parse_constraints( c, write_constraints( c, cs ) ), cs );
  EXPECT_THROW( parse_constraints( c, "p" ), FormatError );
  EXPECT_THROW( parse_constraints( c, "p=2" ), FormatError );
  EXPECT_THROW( parse_constraints( c, "zz=1" ), FormatError );
  EXPECT_THROW( parse_constraints( c, "g=1" ), FormatError );     // not a PI
  EXPECT_THROW( parse_constraints( c, "p=1\np=0" ), FormatError ); // one per PI
}

TEST( Report, PatternsRoundTrip )
{
  auto c = gen::c17();
  auto faults = enumerate_faults( c );
  EngineConfig cfg;
  auto rs = run_faults( c, faults, cfg );
  auto text = write_patterns( c, rs );
  auto back = parse_patterns( c, text );
  std::size_t k = 0;
  for ( const auto& r : rs )
  {
    if ( r.status != Status::Testable )
      continue;
    ASSERT_LT( k, back.size() );
    EXPECT_EQ( back[k].first, r.fault );
    EXPECT_EQ( back[k].second, *r.pattern );
    ++k;
  }
  EXPECT_EQ( k, back.size() );
  EXPECT_THROW( parse_patterns( c, "1/0 : 01" ), FormatError );
  EXPECT_THROW( parse_patterns( c, "1/0 : 01a01" ), FormatError );
  EXPECT_THROW( parse_patterns( c, "1/0 01101" ), FormatError );
}

TEST( Report, StatsCsv )
{
  auto c = gen::c17();
  auto faults = enumerate_faults( c );
  auto rs = run_faults( c, faults, EngineConfig{} );
  auto timed = write_stats_csv( c, rs, true );
  auto fixed = write_stats_csv( c, rs, false );
  EXPECT_EQ( fixed.substr( 0, stats_header.size() ), stats_header );
  EXPECT_EQ( std::count( fixed.begin(), fixed.end(), '\n' ), static_cast<long>( rs.size() + 1 ) );
  auto rows = parse_stats_csv( c, fixed );
  ASSERT_EQ( rows.size(), rs.size() );
  for ( std::size_t i = 0; i < rows.size(); ++i )
  {
    EXPECT_EQ( rows[i].fault, rs[i].fault );
    EXPECT_EQ( rows[i].status, rs[i].status );
    EXPECT_EQ( rows[i].backtracks, rs[i].stats.backtracks );
  }
  // Without timing every row ends in ",0".
  std::istringstream is( fixed );
  std::string line;
  std::getline( is, line );
  while ( std::getline( is, line ) )
    EXPECT_EQ( line.substr( line.size() - 2 ), ",0" );
  EXPECT_EQ( parse_stats_csv( c, timed ).size(), rs.size() );
  EXPECT_THROW( parse_stats_csv( c, "fault,status\n" ), FormatError );
  EXPECT_THROW( parse_stats_csv( c, std::string( stats_header ) + "\n1/0,MAYBE,0,0,0,0,0\n" ), FormatError );
}

TEST( Report, SummaryEchoesConfig )
{
  std::vector<AtpgResult> rs( 10 );
  for ( std::size_t i = 0; i < 9; ++i )
    rs[i].status = Status::Testable;
  EngineConfig cfg;
  auto s = write_summary( coverage( rs ), cfg, "cdsl", "x.bench" );
  for ( auto key : { "mode cdsl\n", "abort_limit 100\n", "vsids_decay 0.95\n", "forget_n 1000\n", "seed 1\n", "n_total 10\n",
                     "n_aborted 1\n", "fault_coverage 0.900000\n" } )
    EXPECT_NE( s.find( key ), std::string::npos ) << key;
}

TEST( Report, MissingFile )
{
  EXPECT_THROW( read_file( "/nonexistent/file.bench" ), IoError );
}
