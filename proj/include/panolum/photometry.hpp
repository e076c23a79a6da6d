#ifndef PANOLUM_PHOTOMETRY_HPP
#define PANOLUM_PHOTOMETRY_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "panolum/hdr_image.hpp"

namespace panolum {

// Scalar luminance raster in cd/m^2.
struct LuminanceMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;
    Projection projection = Projection::unspecified;

    float at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    float& at(int x, int y) {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

struct CalibrationFactor {
    double k = 1.0;
};

struct PixelRect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

// L = k * (0.2127 R + 0.7151 G + 0.0722 B), cd/m^2.
double pixel_luminance(double r, double g, double b, const CalibrationFactor& k);

LuminanceMap to_luminance_map(const HdrImage& img, const CalibrationFactor& k);

// k = measured / mean uncalibrated luminance over the region.
CalibrationFactor compute_k(double measured_cdm2, const PixelRect& region,
                            const HdrImage& img);

enum class FalseColorScale { linear, log10 };

struct FalseColorOptions {
    double lo = 0.0;
    double hi = 1000.0;
    FalseColorScale scale = FalseColorScale::linear;
};

// Normalized ramp position in [0, 1]; clamps outside [lo, hi].
double false_color_t(double luminance, const FalseColorOptions& opts);
// Blue -> cyan -> green -> yellow -> red.
std::array<std::uint8_t, 3> false_color_ramp(double t);

Raster8 false_color(const LuminanceMap& map, const FalseColorOptions& opts = {});
// Vertical ramp strip, hi at the top.
Raster8 false_color_legend(int width, int height);
// Map with the legend strip appended on the right.
Raster8 false_color_with_legend(const LuminanceMap& map,
                                const FalseColorOptions& opts = {});

struct ErrorStats {
    double mae = 0.0;
    double rmse = 0.0;
    double bias = 0.0; // mean of (a - b)
    std::size_t n_pixels = 0;
};

// Signed per-pixel difference a - b. Stats come from the raw values; the clip
// bound only shapes the display raster.
struct ErrorMap {
    int width = 0;
    int height = 0;
    std::vector<float> signed_diff;
    double clip = 3000.0;
    ErrorStats stats;
};

ErrorMap error_map(const LuminanceMap& a, const LuminanceMap& b,
                   double clip = 3000.0);
// Diverging raster: blue = underestimation (a < b), white = 0, red = over.
Raster8 error_map_raster(const ErrorMap& em);

} // namespace panolum

#endif
