// Writes the synthetic benchmark suite as .bench files.

#include <cdsl/generators.hpp>
#include <cdsl/report.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace cdsl;

int main( int argc, char** argv )
{
  CLI::App app{ "Generate the benchmark circuits" };
  std::string out = "benchmarks";
  app.add_option( "dir", out, "output directory" )->capture_default_str();
  CLI11_PARSE( app, argc, argv );

  std::vector<std::pair<std::string, Circuit>> suite;
  suite.emplace_back( "c17", gen::c17() );
  suite.emplace_back( "prio27", gen::priority_controller( 9 ) );
  suite.emplace_back( "sec32", gen::sec_decoder( 32, 8, false ) );
  suite.emplace_back( "alu8", gen::alu( 8 ) );
  suite.emplace_back( "sec32n", gen::sec_decoder( 32, 8, true ) );
  suite.emplace_back( "secded16", gen::secded( 16, 5 ) );
  suite.emplace_back( "mult8", gen::multiplier( 8 ) );
  suite.emplace_back( "mult16", gen::multiplier( 16 ) );
  suite.emplace_back( "rr_a", gen::redundant_random( 12, 120, 6, 1 ) );
  suite.emplace_back( "rr_b", gen::redundant_random( 24, 400, 20, 2 ) );
  suite.emplace_back( "rr_c", gen::redundant_random( 16, 250, 16, 3 ) );

  try
  {
    std::filesystem::create_directories( out );
    for ( const auto& [name, c] : suite )
    {
      auto path = std::filesystem::path( out ) / ( name + ".bench" );
      write_file( path.string(), "# " + name + "\n" + to_bench( c ) );
      std::cout << path.string() << "  " << c.primary_inputs().size() << " inputs, " << c.primary_outputs().size() << " outputs, "
                << c.size() << " nets\n";
    }
  }
  catch ( const std::exception& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
