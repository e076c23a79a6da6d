#ifndef PANOLUM_RGBE_HPP
#define PANOLUM_RGBE_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "panolum/hdr_image.hpp"

namespace panolum {

// Shared-exponent RGBE pixel codec (Radiance .hdr ecosystem).
//
// decode: exponent byte 0 means black, otherwise channel c restores to
// (m_c + 0.5)/256 * 2^(e-128). encode quantizes so that the decoded max
// component has relative error <= 1/256.
std::array<float, 3> decode_rgbe(const std::array<std::uint8_t, 4>& quad);
std::array<std::uint8_t, 4> encode_rgbe(float r, float g, float b);

// Radiance .hdr file format. Header must carry FORMAT=32-bit_rle_rgbe and a
// `-Y H +X W` resolution line; EXPOSURE lines accumulate multiplicatively and
// the returned pixels are divided by the product. Scanlines may be flat RGBE
// quads or new-style RLE.
HdrImage read_hdr(std::istream& in);
HdrImage read_hdr_file(const std::string& path);

// Always writes EXPOSURE=1.0; RLE scanlines for 8 <= width <= 32767,
// flat quads otherwise.
void write_hdr(const HdrImage& img, std::ostream& out);
void write_hdr_file(const HdrImage& img, const std::string& path);

} // namespace panolum

#endif
