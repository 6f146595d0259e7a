/*!
  \file imaging.hpp
  \brief Grayscale image I/O, noise injection, network-based median
         filtering, and SSIM scoring for application-level evaluation.
*/

#pragma once

#include "network.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace medianet
{

struct gray_image
{
  unsigned width = 0;
  unsigned height = 0;
  std::vector<std::uint8_t> pixels;   //!< row-major, 8-bit

  std::uint8_t at( unsigned x, unsigned y ) const { return pixels[static_cast<std::size_t>( y ) * width + x]; }
  std::uint8_t& at( unsigned x, unsigned y ) { return pixels[static_cast<std::size_t>( y ) * width + x]; }

  bool operator==( const gray_image& ) const = default;
};

/*! \brief Reads a binary PGM (P5, maxval 255). */
inline gray_image read_pgm( const std::vector<std::uint8_t>& bytes )
{
  std::size_t pos = 0;
  auto skip_space = [&]() {
    while ( pos < bytes.size() )
    {
      if ( bytes[pos] == '#' )
      {
        while ( pos < bytes.size() && bytes[pos] != '\n' )
          ++pos;
      }
      else if ( std::isspace( bytes[pos] ) )
      {
        ++pos;
      }
      else
      {
        break;
      }
    }
  };
  auto read_value = [&]() -> unsigned {
    skip_space();
    if ( pos >= bytes.size() || !std::isdigit( bytes[pos] ) )
      throw std::invalid_argument( "read_pgm: truncated or malformed header" );
    unsigned v = 0;
    while ( pos < bytes.size() && std::isdigit( bytes[pos] ) )
      v = v * 10 + ( bytes[pos++] - '0' );
    return v;
  };

  if ( bytes.size() < 2 || bytes[0] != 'P' )
    throw std::invalid_argument( "read_pgm: not a PGM file" );
  if ( bytes[1] == '2' )
    throw std::invalid_argument( "read_pgm: ASCII PGM (P2) is not supported, use binary P5" );
  if ( bytes[1] != '5' )
    throw std::invalid_argument( "read_pgm: unsupported magic" );
  pos = 2;

  gray_image img;
  img.width = read_value();
  img.height = read_value();
  const unsigned maxval = read_value();
  if ( maxval != 255 )
    throw std::invalid_argument( "read_pgm: only maxval 255 is supported" );
  if ( img.width == 0 || img.height == 0 )
    throw std::invalid_argument( "read_pgm: empty image" );
  if ( pos >= bytes.size() || !std::isspace( bytes[pos] ) )
    throw std::invalid_argument( "read_pgm: malformed header" );
  ++pos;   // single whitespace before raster

  const std::size_t count = static_cast<std::size_t>( img.width ) * img.height;
  if ( bytes.size() - pos < count )
    throw std::invalid_argument( "read_pgm: truncated pixel data" );
  img.pixels.assign( bytes.begin() + pos, bytes.begin() + pos + count );
  return img;
}

inline std::vector<std::uint8_t> write_pgm( const gray_image& img )
{
  const std::string header =
      "P5\n" + std::to_string( img.width ) + " " + std::to_string( img.height ) + "\n255\n";
  std::vector<std::uint8_t> bytes( header.begin(), header.end() );
  bytes.insert( bytes.end(), img.pixels.begin(), img.pixels.end() );
  return bytes;
}

/*! \brief Each pixel independently becomes 0 or 255 (equiprobable) with
 *         probability p.
 */
inline gray_image add_salt_pepper( const gray_image& img, double p, rng_engine& rng )
{
  if ( p < 0.0 || p > 1.0 )
    throw std::invalid_argument( "add_salt_pepper: probability out of range" );
  gray_image out = img;
  std::uniform_real_distribution<double> unit( 0.0, 1.0 );
  std::uniform_int_distribution<int> coin( 0, 1 );
  for ( auto& px : out.pixels )
  {
    if ( unit( rng ) < p )
      px = coin( rng ) ? 255 : 0;
  }
  return out;
}

/*! \brief Each pixel independently replaced by a uniform value in 0..255
 *         with probability p.
 */
inline gray_image add_shot_noise( const gray_image& img, double p, rng_engine& rng )
{
  if ( p < 0.0 || p > 1.0 )
    throw std::invalid_argument( "add_shot_noise: probability out of range" );
  gray_image out = img;
  std::uniform_real_distribution<double> unit( 0.0, 1.0 );
  std::uniform_int_distribution<int> level( 0, 255 );
  for ( auto& px : out.pixels )
  {
    if ( unit( rng ) < p )
      px = static_cast<std::uint8_t>( level( rng ) );
  }
  return out;
}

/*! \brief Sliding-window filtering with a single-output selection network.
 *
 * The window is read row-major with replicate-padded borders; the network
 * must have window*window inputs.  With an exact median network this is a
 * true median filter.
 */
inline gray_image median_filter( const gray_image& img, const network& net, unsigned window )
{
  if ( window != 3 && window != 5 )
    throw std::invalid_argument( "median_filter: window must be 3 or 5" );
  if ( !net.single_output() )
    throw std::invalid_argument( "median_filter: network must have a single output" );
  if ( net.num_inputs() != window * window )
    throw std::invalid_argument( "median_filter: network arity does not match window" );

  gray_image out = img;
  const int r = static_cast<int>( window ) / 2;
  std::vector<int> patch( window * window );
  std::vector<int> scratch;
  for ( unsigned y = 0; y < img.height; ++y )
  {
    for ( unsigned x = 0; x < img.width; ++x )
    {
      std::size_t idx = 0;
      for ( int dy = -r; dy <= r; ++dy )
      {
        const unsigned yy = static_cast<unsigned>(
            std::clamp<int>( static_cast<int>( y ) + dy, 0, static_cast<int>( img.height ) - 1 ) );
        for ( int dx = -r; dx <= r; ++dx )
        {
          const unsigned xx = static_cast<unsigned>(
              std::clamp<int>( static_cast<int>( x ) + dx, 0, static_cast<int>( img.width ) - 1 ) );
          patch[idx++] = img.at( xx, yy );
        }
      }
      out.at( x, y ) = static_cast<std::uint8_t>(
          net.evaluate_single( std::span<const int>( patch ), scratch ) );
    }
  }
  return out;
}

namespace detail
{

/*! \brief Separable convolution by a symmetric kernel, valid region only. */
inline std::vector<double> filter_valid( const std::vector<double>& plane, unsigned w, unsigned h,
                                         const std::vector<double>& kernel )
{
  const unsigned r = static_cast<unsigned>( kernel.size() );
  const unsigned ow = w - r + 1, oh = h - r + 1;
  std::vector<double> rows( static_cast<std::size_t>( ow ) * h );
  for ( unsigned y = 0; y < h; ++y )
  {
    for ( unsigned x = 0; x < ow; ++x )
    {
      double acc = 0;
      for ( unsigned i = 0; i < r; ++i )
        acc += kernel[i] * plane[static_cast<std::size_t>( y ) * w + x + i];
      rows[static_cast<std::size_t>( y ) * ow + x] = acc;
    }
  }
  std::vector<double> out( static_cast<std::size_t>( ow ) * oh );
  for ( unsigned y = 0; y < oh; ++y )
  {
    for ( unsigned x = 0; x < ow; ++x )
    {
      double acc = 0;
      for ( unsigned i = 0; i < r; ++i )
        acc += kernel[i] * rows[static_cast<std::size_t>( y + i ) * ow + x];
      out[static_cast<std::size_t>( y ) * ow + x] = acc;
    }
  }
  return out;
}

} // namespace detail

/*! \brief Mean structural similarity with the reference parameters:
 *         11x11 Gaussian window, sigma 1.5, K1=0.01, K2=0.03, L=255.
 */
inline double ssim( const gray_image& a, const gray_image& b )
{
  if ( a.width != b.width || a.height != b.height )
    throw std::invalid_argument( "ssim: image dimensions differ" );
  constexpr unsigned win = 11;
  if ( a.width < win || a.height < win )
    throw std::invalid_argument( "ssim: images must be at least 11x11" );

  std::vector<double> kernel( win );
  constexpr double sigma = 1.5;
  double ksum = 0;
  for ( unsigned i = 0; i < win; ++i )
  {
    const double d = static_cast<double>( i ) - ( win - 1 ) / 2.0;
    kernel[i] = std::exp( -d * d / ( 2 * sigma * sigma ) );
    ksum += kernel[i];
  }
  for ( auto& k : kernel )
    k /= ksum;

  const std::size_t count = a.pixels.size();
  std::vector<double> pa( count ), pb( count ), paa( count ), pbb( count ), pab( count );
  for ( std::size_t i = 0; i < count; ++i )
  {
    pa[i] = a.pixels[i];
    pb[i] = b.pixels[i];
    paa[i] = pa[i] * pa[i];
    pbb[i] = pb[i] * pb[i];
    pab[i] = pa[i] * pb[i];
  }
  const auto mu_a = detail::filter_valid( pa, a.width, a.height, kernel );
  const auto mu_b = detail::filter_valid( pb, a.width, a.height, kernel );
  const auto raw_aa = detail::filter_valid( paa, a.width, a.height, kernel );
  const auto raw_bb = detail::filter_valid( pbb, a.width, a.height, kernel );
  const auto raw_ab = detail::filter_valid( pab, a.width, a.height, kernel );

  constexpr double c1 = ( 0.01 * 255 ) * ( 0.01 * 255 );
  constexpr double c2 = ( 0.03 * 255 ) * ( 0.03 * 255 );
  double total = 0;
  for ( std::size_t i = 0; i < mu_a.size(); ++i )
  {
    const double var_a = raw_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = raw_bb[i] - mu_b[i] * mu_b[i];
    const double cov = raw_ab[i] - mu_a[i] * mu_b[i];
    total += ( ( 2 * mu_a[i] * mu_b[i] + c1 ) * ( 2 * cov + c2 ) ) /
             ( ( mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1 ) * ( var_a + var_b + c2 ) );
  }
  return total / static_cast<double>( mu_a.size() );
}

} // namespace medianet
