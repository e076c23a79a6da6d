#ifndef PANOLUM_HDR_IMAGE_HPP
#define PANOLUM_HDR_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "panolum/error.hpp"

namespace panolum {

enum class Projection {
    equirectangular,
    fisheye180,
    unspecified,
};

// Linear RGB radiance raster. Values are in consistent radiance units;
// multiplied by a calibration factor k they become cd/m^2.
struct HdrImage {
    int width = 0;
    int height = 0;
    std::vector<float> pixels; // row-major RGB triplets, 3*width*height
    double exposure = 1.0;     // cumulative EXPOSURE from the source header
    Projection projection = Projection::unspecified;
    // Header lines we carry through verbatim (comments, PRIMARIES, ...).
    std::vector<std::string> header_lines;

    static HdrImage filled(int w, int h, float r, float g, float b,
                           Projection proj = Projection::unspecified) {
        HdrImage img;
        img.width = w;
        img.height = h;
        img.projection = proj;
        img.pixels.resize(static_cast<std::size_t>(w) * h * 3);
        for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
            img.pixels[i] = r;
            img.pixels[i + 1] = g;
            img.pixels[i + 2] = b;
        }
        return img;
    }

    float* at(int x, int y) {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const float* at(int x, int y) const {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }
};

// 8-bit RGB raster for visualization output.
struct Raster8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // row-major RGB, 3*width*height

    Raster8() = default;
    Raster8(int w, int h) : width(w), height(h) {
        data.assign(static_cast<std::size_t>(w) * h * 3, 0);
    }

    std::uint8_t* at(int x, int y) {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const std::uint8_t* at(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
};

} // namespace panolum

#endif
