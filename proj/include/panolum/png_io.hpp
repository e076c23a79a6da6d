#ifndef PANOLUM_PNG_IO_HPP
#define PANOLUM_PNG_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "panolum/hdr_image.hpp"

namespace panolum {

// Encodes an 8-bit RGB raster as a PNG byte stream (truecolor, no interlace,
// filter type 0 on every row). Output is deterministic.
std::vector<std::uint8_t> encode_png(const Raster8& raster);

void write_raster_png(const Raster8& raster, const std::string& path);

} // namespace panolum

#endif
