/*!
  \file medianet_cli.cpp
  \brief Command-line front end: analysis, verification, cost estimation,
         generation, oracles, evolutionary search, imaging, RTL export.

  Exit codes: 0 success (verify: exact), 1 quality failure (verify:
  approximate), 2 usage or data errors.
*/

#include <medianet/analysis.hpp>
#include <medianet/builtin_networks.hpp>
#include <medianet/cost.hpp>
#include <medianet/imaging.hpp>
#include <medianet/json_io.hpp>
#include <medianet/network.hpp>
#include <medianet/rtl.hpp>
#include <medianet/search.hpp>
#include <medianet/version.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace
{

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file( const std::string& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw std::runtime_error( "cannot open " + path );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> read_file_bytes( const std::string& path )
{
  const auto text = read_file( path );
  return { text.begin(), text.end() };
}

void write_file( const std::string& path, std::string_view content )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    throw std::runtime_error( "cannot write " + path );
  out.write( content.data(), static_cast<std::streamsize>( content.size() ) );
}

void write_file_bytes( const std::string& path, const std::vector<std::uint8_t>& bytes )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    throw std::runtime_error( "cannot write " + path );
  out.write( reinterpret_cast<const char*>( bytes.data() ),
             static_cast<std::streamsize>( bytes.size() ) );
}

medianet::network load_network( const std::string& path )
{
  return medianet::parse_network( read_file( path ) );
}

medianet::tech_config load_tech( const std::string& path )
{
  if ( path.empty() )
    return {};
  return medianet::parse_tech_config( read_file( path ) );
}

std::string fnv1a_digest( const std::string& data )
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for ( unsigned char c : data )
  {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf( buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>( h ) );
  return buf;
}

std::string utc_timestamp()
{
  const auto now = std::chrono::system_clock::now();
  const auto tt = std::chrono::system_clock::to_time_t( now );
  char buf[32];
  std::tm tm_utc{};
  gmtime_r( &tt, &tm_utc );
  std::strftime( buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc );
  return buf;
}

std::string format_double( double v )
{
  char buf[40];
  std::snprintf( buf, sizeof buf, "%.17g", v );
  return buf;
}

// ---------------------------------------------------------------- analyze

int cmd_analyze( const std::string& net_path, bool as_json )
{
  const auto profile = medianet::analyze( load_network( net_path ) );
  if ( as_json )
    std::cout << medianet::profile_json( profile ).dump( 2 ) << "\n";
  else
    std::cout << medianet::profile_text( profile );
  return 0;
}

int cmd_verify( const std::string& net_path )
{
  const auto net = load_network( net_path );
  const auto profile = medianet::analyze( net );
  const bool threshold_exact = medianet::is_exact_median( net );
  if ( threshold_exact != profile.exact() )
    throw std::logic_error( "verify: threshold check and distance analysis disagree" );
  if ( threshold_exact )
  {
    std::cout << "exact\n";
    return 0;
  }
  std::cout << "approximate d_L=" << profile.d_left << " d_R=" << profile.d_right << "\n";
  return 1;
}

int cmd_cost( const std::string& net_path, const std::string& tech_path, bool as_json )
{
  const auto report = medianet::cost( load_network( net_path ), load_tech( tech_path ) );
  if ( as_json )
    std::cout << medianet::cost_json( report ).dump( 2 ) << "\n";
  else
    std::cout << medianet::cost_text( report );
  return 0;
}

int cmd_gen( const std::string& kind, unsigned inputs, const std::string& out_path )
{
  medianet::network net = [&]() {
    if ( kind == "sorter" )
      return medianet::gen_batcher_sorter( inputs );
    if ( kind == "median" )
      return medianet::gen_exact_median( inputs );
    if ( kind == "mom" )
      return medianet::gen_mom( inputs );
    throw std::runtime_error( "unknown kind `" + kind + "`" );
  }();
  const auto text = medianet::serialize_network( net ) + "\n";
  if ( out_path.empty() )
    std::cout << text;
  else
    write_file( out_path, text );
  return 0;
}

int cmd_oracle( const std::string& net_path, const std::string& mode, bool as_json )
{
  const auto net = load_network( net_path );
  if ( mode == "binary" )
  {
    const auto profile = medianet::binary_oracle_profile( net );
    if ( as_json )
      std::cout << medianet::profile_json( profile ).dump( 2 ) << "\n";
    else
      std::cout << medianet::profile_text( profile );
    return 0;
  }
  if ( mode != "perm" )
    throw std::runtime_error( "oracle mode must be `perm` or `binary`" );
  const auto hist = medianet::perm_oracle( net );
  const unsigned m = ( net.num_inputs() + 1 ) / 2;
  if ( as_json )
  {
    json j;
    j["n"] = net.num_inputs();
    j["m"] = m;
    json h = json::array();
    for ( const auto& v : hist )
      h.push_back( medianet::rational_json( v ) );
    j["H"] = std::move( h );
    j["h0"] = medianet::rational_json( hist[m - 1] );
    j["Q"] = medianet::rational_json( medianet::quality( hist, m ) );
    std::cout << j.dump( 2 ) << "\n";
  }
  else
  {
    char buf[32];
    std::cout << "n     " << net.num_inputs() << "\n";
    std::snprintf( buf, sizeof buf, "%.2f", medianet::to_double( medianet::quality( hist, m ) ) );
    std::cout << "Q     " << buf << "\n";
    std::snprintf( buf, sizeof buf, "%.2f", medianet::to_double( hist[m - 1] ) );
    std::cout << "h_0   " << buf << "\n";
    std::cout << "H    ";
    for ( const auto& v : hist )
    {
      std::snprintf( buf, sizeof buf, "%.2f", medianet::to_double( v ) );
      std::cout << " " << buf;
    }
    std::cout << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- search

struct search_cli
{
  std::string seed_net_path;
  unsigned inputs = 0;
  int target_cas = -1;
  double target_cost = -1.0;
  double eps = -1.0;
  unsigned lambda = 4;
  unsigned mutated = 2;
  unsigned node_capacity = 0;
  std::uint64_t budget_evals = 0;
  double budget_seconds = 0.0;
  std::uint64_t rng_seed = 1;
  std::string tech_path;
  std::string out_dir;
};

int cmd_search( const search_cli& opt, const std::vector<std::string>& argv )
{
  const auto started = utc_timestamp();
  const auto tech = load_tech( opt.tech_path );

  medianet::network seed = [&]() {
    if ( !opt.seed_net_path.empty() )
      return load_network( opt.seed_net_path );
    if ( opt.inputs == 0 )
      throw std::runtime_error( "search needs --seed-net or --inputs" );
    switch ( opt.inputs )
    {
    case 3:
    case 5:
    case 7:
    case 9:
    case 25:
      return medianet::builtin_median( opt.inputs );
    default:
      return medianet::gen_exact_median( opt.inputs );
    }
  }();

  if ( ( opt.target_cas < 0 ) == ( opt.target_cost < 0 ) )
    throw std::runtime_error( "search needs exactly one of --target-cas / --target-cost" );

  medianet::search_config cfg( seed );
  cfg.tech = tech;
  if ( opt.target_cas >= 0 )
  {
    cfg.target_cost = medianet::target_cost_for_cas( seed, static_cast<unsigned>( opt.target_cas ), tech );
    // default band: half of one comparator's worth of area in the seed
    cfg.eps = opt.eps >= 0 ? opt.eps
                           : cfg.target_cost / static_cast<double>( opt.target_cas ) / 2.0;
  }
  else
  {
    cfg.target_cost = opt.target_cost;
    cfg.eps = opt.eps;
  }
  cfg.lambda = opt.lambda;
  cfg.mutated_genes = opt.mutated;
  cfg.node_capacity = opt.node_capacity;
  cfg.max_evaluations = opt.budget_evals;
  cfg.max_seconds = opt.budget_seconds;
  cfg.seed = opt.rng_seed;

  const auto result = medianet::evolve( cfg );

  fs::create_directories( opt.out_dir );
  fs::create_directories( opt.out_dir + "/archive" );

  const double eps_used = cfg.eps >= 0 ? cfg.eps : cfg.tech.a_cmp / 2;
  json config;
  config["n"] = seed.num_inputs();
  config["seed_cas"] = medianet::prune( seed ).num_cas();
  config["target_cost"] = cfg.target_cost;
  config["eps"] = eps_used;
  config["lambda"] = cfg.lambda;
  config["mutated_genes"] = cfg.mutated_genes;
  config["node_capacity"] = cfg.node_capacity;
  config["budget_evaluations"] = cfg.max_evaluations;
  config["budget_seconds"] = cfg.max_seconds;
  config["rng_seed"] = cfg.seed;
  config["tech"] = { { "a_mx", tech.a_mux },
                     { "a_cmp", tech.a_cmp },
                     { "a_reg", tech.a_reg },
                     { "width", tech.width } };
  write_file( opt.out_dir + "/config.json", config.dump( 2 ) + "\n" );

  std::string log = "generation,stage,parent_C,parent_Q\n";
  for ( const auto& row : result.trace )
  {
    log += std::to_string( row.generation ) + "," + std::to_string( row.stage ) + "," +
           format_double( row.parent_cost ) + "," +
           format_double( medianet::to_double( row.parent_quality ) ) + "\n";
  }
  write_file( opt.out_dir + "/log.csv", log );

  const unsigned n = seed.num_inputs();
  std::string pareto = "k,n_A,n_P,n_R,depth,C,Q,dL,dR,h0";
  for ( unsigned i = 0; i < n; ++i )
    pareto += ",H" + std::to_string( i );
  pareto += "\n";
  unsigned index = 0;
  for ( const auto& e : result.archive.entries() )
  {
    pareto += std::to_string( e.profile.k ) + "," + std::to_string( e.cost.n_both ) + "," +
              std::to_string( e.cost.n_single ) + "," + std::to_string( e.cost.n_registers ) + "," +
              std::to_string( e.cost.depth ) + "," + format_double( e.cost.area ) + "," +
              format_double( medianet::to_double( e.profile.q ) ) + "," +
              std::to_string( e.profile.d_left ) + "," + std::to_string( e.profile.d_right ) + "," +
              format_double( medianet::to_double( e.profile.h0 ) );
    for ( const auto& h : e.profile.hist )
      pareto += "," + format_double( medianet::to_double( h ) );
    pareto += "\n";

    char name[32];
    std::snprintf( name, sizeof name, "net_%03u", index );
    write_file( opt.out_dir + "/archive/" + name + ".net",
                medianet::serialize_network( e.net ) + "\n" );
    json member;
    member["profile"] = medianet::profile_json( e.profile );
    member["cost"] = medianet::cost_json( e.cost );
    write_file( opt.out_dir + "/archive/" + name + ".json", member.dump( 2 ) + "\n" );
    ++index;
  }
  write_file( opt.out_dir + "/pareto.csv", pareto );
  write_file( opt.out_dir + "/best.net",
              medianet::serialize_network( medianet::decode( result.best ) ) + "\n" );

  json manifest;
  manifest["version"] = MEDIANET_VERSION;
  manifest["subcommand"] = "search";
  manifest["argv"] = argv;
  manifest["rng_seed"] = cfg.seed;
  manifest["started_utc"] = started;
  manifest["finished_utc"] = utc_timestamp();
  json digests = json::object();
  if ( !opt.seed_net_path.empty() )
    digests[opt.seed_net_path] = fnv1a_digest( read_file( opt.seed_net_path ) );
  if ( !opt.tech_path.empty() )
    digests[opt.tech_path] = fnv1a_digest( read_file( opt.tech_path ) );
  manifest["inputs"] = digests;
  write_file( opt.out_dir + "/manifest.json", manifest.dump( 2 ) + "\n" );

  std::cout << "evaluations " << result.evaluations << "\n"
            << "stage2      " << ( result.reached_stage2 ? "yes" : "no" ) << "\n"
            << "archive     " << result.archive.size() << "\n"
            << "best_C      " << format_double( result.best_cost.area ) << "\n"
            << "best_Q      " << format_double( medianet::to_double( result.best_profile.q ) )
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- imaging

int cmd_filter( const std::string& img_path, const std::string& net_path, unsigned window,
                const std::string& out_path )
{
  const auto img = medianet::read_pgm( read_file_bytes( img_path ) );
  const auto net = load_network( net_path );
  if ( window == 0 )
  {
    if ( net.num_inputs() == 9 )
      window = 3;
    else if ( net.num_inputs() == 25 )
      window = 5;
    else
      throw std::runtime_error( "cannot infer window from network arity; pass --window" );
  }
  write_file_bytes( out_path, medianet::write_pgm( medianet::median_filter( img, net, window ) ) );
  return 0;
}

int cmd_noise( const std::string& img_path, const std::string& kind, double p,
               std::uint64_t seed, const std::string& out_path )
{
  const auto img = medianet::read_pgm( read_file_bytes( img_path ) );
  medianet::rng_engine rng( seed );
  medianet::gray_image out = [&]() {
    if ( kind == "salt-pepper" || kind == "sp" )
      return medianet::add_salt_pepper( img, p, rng );
    if ( kind == "shot" )
      return medianet::add_shot_noise( img, p, rng );
    throw std::runtime_error( "noise kind must be `salt-pepper` or `shot`" );
  }();
  write_file_bytes( out_path, medianet::write_pgm( out ) );
  return 0;
}

int cmd_ssim( const std::string& a_path, const std::string& b_path )
{
  const auto a = medianet::read_pgm( read_file_bytes( a_path ) );
  const auto b = medianet::read_pgm( read_file_bytes( b_path ) );
  std::cout << format_double( medianet::ssim( a, b ) ) << "\n";
  return 0;
}

int cmd_export_rtl( const std::string& net_path, const std::string& tech_path,
                    const std::string& name, const std::string& out_path )
{
  const auto net = medianet::prune( load_network( net_path ) );
  const auto tech = load_tech( tech_path );
  const auto text = medianet::emit_rtl( net, tech, medianet::asap_schedule( net ), name );
  if ( out_path.empty() )
    std::cout << text;
  else
    write_file( out_path, text );
  return 0;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "analysis, cost estimation and evolutionary approximation of median comparison networks" };
  app.set_version_flag( "--version", MEDIANET_VERSION );
  app.require_subcommand( 1 );

  std::string net_path, tech_path, out_path, kind, mode, name = "median_net";
  std::string img_path, img_b_path;
  bool as_json = false;
  unsigned inputs = 0, window = 0;
  double prob = 0.0;
  std::uint64_t rng_seed = 1;

  auto* analyze = app.add_subcommand( "analyze", "exact rank-error profile of a network" );
  analyze->add_option( "network", net_path, "network file" )->required();
  analyze->add_flag( "--json", as_json, "JSON output" );

  auto* verify = app.add_subcommand( "verify", "prove a network exact or report worst-case distances" );
  verify->add_option( "network", net_path, "network file" )->required();

  auto* cost = app.add_subcommand( "cost", "pipelined hardware cost estimate" );
  cost->add_option( "network", net_path, "network file" )->required();
  cost->add_option( "--tech", tech_path, "tech config file (key=value)" );
  cost->add_flag( "--json", as_json, "JSON output" );

  auto* gen = app.add_subcommand( "gen", "generate a network file" );
  gen->add_option( "--kind", kind, "sorter | median | mom" )->required();
  gen->add_option( "--inputs", inputs, "input count" )->required();
  gen->add_option( "-o,--output", out_path, "output file (default stdout)" );

  auto* oracle = app.add_subcommand( "oracle", "brute-force reference profile" );
  oracle->add_option( "network", net_path, "network file" )->required();
  oracle->add_option( "--mode", mode, "perm | binary" )->required();
  oracle->add_flag( "--json", as_json, "JSON output" );

  search_cli sopt;
  auto* search = app.add_subcommand( "search", "evolutionary approximation run" );
  search->add_option( "--seed-net", sopt.seed_net_path, "seed network file" );
  search->add_option( "--inputs", sopt.inputs, "input count (selects a built-in exact seed)" );
  search->add_option( "--target-cas", sopt.target_cas, "target comparator count" );
  search->add_option( "--target-cost", sopt.target_cost, "target cost in area units" );
  search->add_option( "--eps", sopt.eps, "cost band half-width" );
  search->add_option( "--lambda", sopt.lambda, "offspring per generation" );
  search->add_option( "--mut", sopt.mutated, "genes mutated per offspring" );
  search->add_option( "--node-capacity", sopt.node_capacity, "genome node capacity" );
  search->add_option( "--budget", sopt.budget_evals, "evaluation budget" );
  search->add_option( "--budget-seconds", sopt.budget_seconds, "wall-clock budget" );
  search->add_option( "--rng-seed", sopt.rng_seed, "RNG seed" );
  search->add_option( "--tech", sopt.tech_path, "tech config file" );
  search->add_option( "--out", sopt.out_dir, "run directory" )->required();

  auto* filter = app.add_subcommand( "filter", "apply a network as a sliding-window filter" );
  filter->add_option( "image", img_path, "input PGM (P5)" )->required();
  filter->add_option( "--net", net_path, "network file" )->required();
  filter->add_option( "--window", window, "window size (3 or 5; default from arity)" );
  filter->add_option( "-o,--output", out_path, "output PGM" )->required();

  auto* noise = app.add_subcommand( "noise", "corrupt an image with seeded noise" );
  noise->add_option( "image", img_path, "input PGM (P5)" )->required();
  noise->add_option( "--kind", kind, "salt-pepper | shot" )->required();
  noise->add_option( "--p", prob, "corruption probability" )->required();
  noise->add_option( "--rng-seed", rng_seed, "RNG seed" );
  noise->add_option( "-o,--output", out_path, "output PGM" )->required();

  auto* ssim = app.add_subcommand( "ssim", "structural similarity of two images" );
  ssim->add_option( "image_a", img_path, "first PGM" )->required();
  ssim->add_option( "image_b", img_b_path, "second PGM" )->required();

  auto* rtl = app.add_subcommand( "export-rtl", "structural Verilog of the pipelined network" );
  rtl->add_option( "network", net_path, "network file" )->required();
  rtl->add_option( "--tech", tech_path, "tech config file" );
  rtl->add_option( "--name", name, "module name" );
  rtl->add_option( "-o,--output", out_path, "output file (default stdout)" );

  try
  {
    app.parse( argc, argv );
  }
  catch ( const CLI::ParseError& e )
  {
    const int code = app.exit( e );
    return code == 0 ? 0 : 2;
  }

  try
  {
    if ( analyze->parsed() )
      return cmd_analyze( net_path, as_json );
    if ( verify->parsed() )
      return cmd_verify( net_path );
    if ( cost->parsed() )
      return cmd_cost( net_path, tech_path, as_json );
    if ( gen->parsed() )
      return cmd_gen( kind, inputs, out_path );
    if ( oracle->parsed() )
      return cmd_oracle( net_path, mode, as_json );
    if ( search->parsed() )
      return cmd_search( sopt, { argv, argv + argc } );
    if ( filter->parsed() )
      return cmd_filter( img_path, net_path, window, out_path );
    if ( noise->parsed() )
      return cmd_noise( img_path, kind, prob, rng_seed, out_path );
    if ( ssim->parsed() )
      return cmd_ssim( img_path, img_b_path );
    if ( rtl->parsed() )
      return cmd_export_rtl( net_path, tech_path, name, out_path );
  }
  catch ( const std::exception& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
