#include "panolum/png_io.hpp"

#include <fstream>

#include <zlib.h>

namespace panolum {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& payload) {
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
    put_u32(out, crc);
}

} // namespace

std::vector<std::uint8_t> encode_png(const Raster8& raster) {
    if (raster.width <= 0 || raster.height <= 0)
        fail(Errc::io_failure, "cannot encode empty raster");

    // Scanlines, each prefixed with filter byte 0.
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(raster.height) * (raster.width * 3 + 1));
    for (int y = 0; y < raster.height; ++y) {
        raw.push_back(0);
        const std::uint8_t* row = raster.at(0, y);
        raw.insert(raw.end(), row, row + static_cast<std::size_t>(raster.width) * 3);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> zdata(bound);
    if (compress2(zdata.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK)
        fail(Errc::io_failure, "zlib compression failed");
    zdata.resize(bound);

    std::vector<std::uint8_t> out;
    const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.insert(out.end(), sig, sig + 8);

    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(raster.width));
    put_u32(ihdr, static_cast<std::uint32_t>(raster.height));
    ihdr.push_back(8); // bit depth
    ihdr.push_back(2); // truecolor
    ihdr.push_back(0); // compression
    ihdr.push_back(0); // filter
    ihdr.push_back(0); // interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", zdata);
    put_chunk(out, "IEND", {});
    return out;
}

void write_raster_png(const Raster8& raster, const std::string& path) {
    std::vector<std::uint8_t> bytes = encode_png(raster);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(Errc::io_failure, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out)
        fail(Errc::io_failure, "write failed: " + path);
}

} // namespace panolum
