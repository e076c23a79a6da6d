#include "panolum/photometry.hpp"

#include <algorithm>
#include <cmath>

#include "panolum/error.hpp"

namespace panolum {

double pixel_luminance(double r, double g, double b, const CalibrationFactor& k) {
    return k.k * (0.2127 * r + 0.7151 * g + 0.0722 * b);
}

LuminanceMap to_luminance_map(const HdrImage& img, const CalibrationFactor& k) {
    LuminanceMap map;
    map.width = img.width;
    map.height = img.height;
    map.projection = img.projection;
    map.values.resize(img.pixel_count());
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const float* p = img.pixels.data() + i * 3;
        map.values[i] = static_cast<float>(pixel_luminance(p[0], p[1], p[2], k));
    }
    return map;
}

CalibrationFactor compute_k(double measured_cdm2, const PixelRect& region,
                            const HdrImage& img) {
    int x0 = std::max(region.x, 0);
    int y0 = std::max(region.y, 0);
    int x1 = std::min(region.x + region.width, img.width);
    int y1 = std::min(region.y + region.height, img.height);
    if (region.width <= 0 || region.height <= 0 || x0 >= x1 || y0 >= y1)
        fail(Errc::empty_region, "calibration region has no pixels");

    double sum = 0.0;
    std::size_t n = 0;
    CalibrationFactor unit{1.0};
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const float* p = img.at(x, y);
            sum += pixel_luminance(p[0], p[1], p[2], unit);
            ++n;
        }
    }
    double mean = sum / static_cast<double>(n);
    if (!(mean > 0.0))
        fail(Errc::zero_region_luminance, "calibration region mean luminance is zero");
    return CalibrationFactor{measured_cdm2 / mean};
}

double false_color_t(double luminance, const FalseColorOptions& opts) {
    if (!(opts.lo < opts.hi))
        fail(Errc::bad_range, "false color range requires lo < hi");
    if (opts.scale == FalseColorScale::log10) {
        if (!(opts.lo > 0.0))
            fail(Errc::bad_range, "log false color requires lo > 0");
        if (luminance <= opts.lo)
            return 0.0;
        double t = (std::log10(luminance) - std::log10(opts.lo)) /
                   (std::log10(opts.hi) - std::log10(opts.lo));
        return std::clamp(t, 0.0, 1.0);
    }
    double t = (luminance - opts.lo) / (opts.hi - opts.lo);
    return std::clamp(t, 0.0, 1.0);
}

std::array<std::uint8_t, 3> false_color_ramp(double t) {
    static const double stops[5][3] = {
        {0.0, 0.0, 1.0}, // blue
        {0.0, 1.0, 1.0}, // cyan
        {0.0, 1.0, 0.0}, // green
        {1.0, 1.0, 0.0}, // yellow
        {1.0, 0.0, 0.0}, // red
    };
    t = std::clamp(t, 0.0, 1.0);
    double s = t * 4.0;
    int i = std::min(3, static_cast<int>(s));
    double f = s - i;
    std::array<std::uint8_t, 3> out{};
    for (int c = 0; c < 3; ++c) {
        double v = stops[i][c] * (1.0 - f) + stops[i + 1][c] * f;
        out[c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return out;
}

Raster8 false_color(const LuminanceMap& map, const FalseColorOptions& opts) {
    Raster8 raster(map.width, map.height);
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            auto rgb = false_color_ramp(false_color_t(map.at(x, y), opts));
            std::uint8_t* p = raster.at(x, y);
            p[0] = rgb[0];
            p[1] = rgb[1];
            p[2] = rgb[2];
        }
    }
    return raster;
}

Raster8 false_color_legend(int width, int height) {
    Raster8 raster(width, height);
    for (int y = 0; y < height; ++y) {
        double t = height > 1 ? 1.0 - static_cast<double>(y) / (height - 1) : 1.0;
        auto rgb = false_color_ramp(t);
        for (int x = 0; x < width; ++x) {
            std::uint8_t* p = raster.at(x, y);
            p[0] = rgb[0];
            p[1] = rgb[1];
            p[2] = rgb[2];
        }
    }
    return raster;
}

Raster8 false_color_with_legend(const LuminanceMap& map,
                                const FalseColorOptions& opts) {
    Raster8 img = false_color(map, opts);
    const int gap = 4;
    const int legend_w = std::max(8, map.width / 32);
    Raster8 legend = false_color_legend(legend_w, map.height);
    Raster8 out(map.width + gap + legend_w, map.height);
    for (int y = 0; y < map.height; ++y) {
        std::copy_n(img.at(0, y), static_cast<std::size_t>(map.width) * 3,
                    out.at(0, y));
        // gap stays black
        std::copy_n(legend.at(0, y), static_cast<std::size_t>(legend_w) * 3,
                    out.at(map.width + gap, y));
    }
    return out;
}

ErrorMap error_map(const LuminanceMap& a, const LuminanceMap& b, double clip) {
    if (a.width != b.width || a.height != b.height ||
        a.projection != b.projection)
        fail(Errc::dimension_mismatch, "error map inputs must match in size and projection");

    ErrorMap em;
    em.width = a.width;
    em.height = a.height;
    em.clip = clip;
    em.signed_diff.resize(a.values.size());

    double abs_sum = 0.0, sq_sum = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        double d = static_cast<double>(a.values[i]) - b.values[i];
        em.signed_diff[i] = static_cast<float>(d);
        abs_sum += std::fabs(d);
        sq_sum += d * d;
        sum += d;
    }
    std::size_t n = a.values.size();
    em.stats.n_pixels = n;
    if (n > 0) {
        em.stats.mae = abs_sum / static_cast<double>(n);
        em.stats.rmse = std::sqrt(sq_sum / static_cast<double>(n));
        em.stats.bias = sum / static_cast<double>(n);
    }
    return em;
}

Raster8 error_map_raster(const ErrorMap& em) {
    Raster8 raster(em.width, em.height);
    for (int y = 0; y < em.height; ++y) {
        for (int x = 0; x < em.width; ++x) {
            double d = em.signed_diff[static_cast<std::size_t>(y) * em.width + x];
            double t = std::clamp(d / em.clip, -1.0, 1.0);
            // white at zero, red positive, blue negative
            double r = 1.0, g = 1.0, b = 1.0;
            if (t >= 0.0) {
                g = 1.0 - t;
                b = 1.0 - t;
            } else {
                r = 1.0 + t;
                g = 1.0 + t;
            }
            std::uint8_t* p = raster.at(x, y);
            p[0] = static_cast<std::uint8_t>(std::lround(r * 255.0));
            p[1] = static_cast<std::uint8_t>(std::lround(g * 255.0));
            p[2] = static_cast<std::uint8_t>(std::lround(b * 255.0));
        }
    }
    return raster;
}

} // namespace panolum
