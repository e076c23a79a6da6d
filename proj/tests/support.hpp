#ifndef PANOLUM_TESTS_SUPPORT_HPP
#define PANOLUM_TESTS_SUPPORT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "panolum/layout.hpp"
#include "panolum/projection.hpp"
#include "panolum/sky.hpp"

namespace testsupport {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Minimal PNG probe: parses only what our writer emits (8-bit truecolor,
// filter 0, no interlace). Independent of the library encoder.
// ---------------------------------------------------------------------------
struct PngProbe {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;
};

inline std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline PngProbe parse_png(const std::vector<std::uint8_t>& bytes) {
    PngProbe out;
    if (bytes.size() < 8 || bytes[1] != 'P' || bytes[2] != 'N' || bytes[3] != 'G')
        throw std::runtime_error("not a PNG");
    std::size_t pos = 8;
    std::vector<std::uint8_t> idat;
    while (pos + 8 <= bytes.size()) {
        std::uint32_t len = be32(&bytes[pos]);
        std::string type(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
        const std::uint8_t* payload = &bytes[pos + 8];
        if (type == "IHDR") {
            out.width = static_cast<int>(be32(payload));
            out.height = static_cast<int>(be32(payload + 4));
            if (payload[8] != 8 || payload[9] != 2)
                throw std::runtime_error("unexpected PNG pixel format");
        } else if (type == "IDAT") {
            idat.insert(idat.end(), payload, payload + len);
        } else if (type == "IEND") {
            break;
        }
        pos += 12 + len;
    }
    uLongf raw_size =
        static_cast<uLongf>(out.height) * (static_cast<uLongf>(out.width) * 3 + 1);
    std::vector<std::uint8_t> raw(raw_size);
    if (uncompress(raw.data(), &raw_size, idat.data(),
                   static_cast<uLong>(idat.size())) != Z_OK)
        throw std::runtime_error("PNG inflate failed");
    out.rgb.reserve(static_cast<std::size_t>(out.width) * out.height * 3);
    for (int y = 0; y < out.height; ++y) {
        const std::uint8_t* row = raw.data() +
                                  static_cast<std::size_t>(y) * (out.width * 3 + 1);
        if (row[0] != 0)
            throw std::runtime_error("unexpected PNG filter type");
        out.rgb.insert(out.rgb.end(), row + 1, row + 1 + out.width * 3);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic box room: forward-projects wall corners and window rectangles of
// a known axis-aligned box into panorama annotations. Oracle for the layout
// reconstruction.
// ---------------------------------------------------------------------------
struct BoxRoom {
    double width = 4.0;  // x extent
    double depth = 6.0;  // z extent
    double height = 3.0; // ceiling
    double cam_x = 0.0;  // camera plan offset from the box center
    double cam_z = 0.0;
    double camera_height = 1.6;

    // Plan corners counterclockwise seen from +y looking down at the
    // (x, z) plane, relative to the camera.
    std::vector<std::array<double, 2>> plan_corners() const {
        double hx = width / 2.0, hz = depth / 2.0;
        return {{-hx - cam_x, -hz - cam_z},
                {+hx - cam_x, -hz - cam_z},
                {+hx - cam_x, +hz - cam_z},
                {-hx - cam_x, +hz - cam_z}};
    }
};

inline std::array<double, 2> project_point(const panolum::Vec3& p,
                                           double camera_height, int W, int H) {
    panolum::Vec3 rel{p.x, p.y - camera_height, p.z};
    panolum::SphericalDir d = panolum::cart_to_sph(rel);
    double u, v;
    panolum::dir_to_pixel(d, W, H, u, v);
    return {u, v};
}

inline panolum::CornerDoc make_box_corner_doc(const BoxRoom& box, int W, int H) {
    panolum::CornerDoc doc;
    doc.camera_height_m = box.camera_height;
    doc.corners.image_width = W;
    doc.corners.image_height = H;
    for (const auto& c : box.plan_corners()) {
        auto floor_uv =
            project_point({c[0], 0.0, c[1]}, box.camera_height, W, H);
        auto ceil_uv =
            project_point({c[0], box.height, c[1]}, box.camera_height, W, H);
        panolum::CornerColumn col;
        col.u = floor_uv[0];
        col.v_floor = floor_uv[1];
        col.v_ceiling = ceil_uv[1];
        doc.corners.corners.push_back(col);
    }
    return doc;
}

// Forward-projects a window rectangle on wall `wall` (s/t wall coordinates)
// into an image quad.
inline panolum::WindowQuad project_box_window(const BoxRoom& box, int wall,
                                              double s0, double t0, double s1,
                                              double t1, int W, int H) {
    auto corners = box.plan_corners();
    auto a = corners[static_cast<std::size_t>(wall)];
    auto b = corners[(static_cast<std::size_t>(wall) + 1) % corners.size()];
    double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    double ux = (b[0] - a[0]) / len, uz = (b[1] - a[1]) / len;
    auto at = [&](double s, double t) {
        return panolum::Vec3{a[0] + ux * s, t, a[1] + uz * s};
    };
    panolum::WindowQuad q;
    q.wall = wall;
    q.quad[0] = project_point(at(s0, t0), box.camera_height, W, H);
    q.quad[1] = project_point(at(s1, t0), box.camera_height, W, H);
    q.quad[2] = project_point(at(s1, t1), box.camera_height, W, H);
    q.quad[3] = project_point(at(s0, t1), box.camera_height, W, H);
    return q;
}

// ---------------------------------------------------------------------------
// Scene fixtures for renderer and glare tests
// ---------------------------------------------------------------------------

// Box scene with one window on wall 0 (the z = -depth/2 wall when the camera
// sits at the box center).
inline panolum::SceneSpec make_box_scene(double wall_rho = 0.5,
                                         double floor_rho = 0.2,
                                         double ceiling_rho = 0.7,
                                         bool window_open = true) {
    panolum::SceneSpec spec;
    spec.room.floor_polygon = {{-2.0, -3.0}, {2.0, -3.0}, {2.0, 3.0}, {-2.0, 3.0}};
    spec.room.ceiling_height = 3.0;
    spec.room.camera_height = 1.6;
    panolum::WindowAperture ap;
    ap.wall = 0;
    ap.s0 = 1.0;
    ap.s1 = 3.0;
    ap.t0 = 0.75;
    ap.t1 = 2.25;
    spec.windows.push_back(ap);
    spec.materials.wall_reflectance = wall_rho;
    spec.materials.floor_reflectance = floor_rho;
    spec.materials.ceiling_reflectance = ceiling_rho;
    spec.materials.window_open = window_open;
    return spec;
}

inline panolum::SkyModel uniform_sky(double luminance) {
    panolum::SkyModel sky;
    sky.condition = panolum::SkyCondition::uniform;
    sky.zenith_luminance = luminance;
    sky.sun_luminance = 0.0;
    return sky;
}

// ---------------------------------------------------------------------------
// EPW fixture: Pittsburgh header plus hourly rows for the requested dates.
// Hour-by-hour radiation follows a plausible bell over the daylight hours.
// ---------------------------------------------------------------------------
inline std::string make_epw_text(const std::vector<std::array<int, 2>>& dates,
                                 bool illuminance_fields = true) {
    std::ostringstream out;
    out << "LOCATION,Pittsburgh Intl Ap,PA,USA,TMY3,725200,40.4406,-79.9959,-5.0,373.0\n";
    out << "DESIGN CONDITIONS,0\n";
    out << "TYPICAL/EXTREME PERIODS,0\n";
    out << "GROUND TEMPERATURES,0\n";
    out << "HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0\n";
    out << "COMMENTS 1,synthetic fixture\n";
    out << "COMMENTS 2,\n";
    out << "DATA PERIODS,1,1,Data,Sunday,1/1,12/31\n";
    for (const auto& date : dates) {
        for (int hour = 1; hour <= 24; ++hour) {
            double day_pos = (hour - 12.5) / 6.0; // rough daylight bell
            double bell = std::max(0.0, 1.0 - day_pos * day_pos);
            double dnr = 700.0 * bell;
            double dhr = 120.0 * bell;
            double dni_illum = illuminance_fields ? dnr * 100.0 : 999999.0;
            double dhi_illum = illuminance_fields ? dhr * 105.0 : 999999.0;
            out << "2023," << date[0] << "," << date[1] << "," << hour << ",0,"
                << "A," // data source flag
                << "10,5,60,101000,"
                << "0,0,310,"      // extraterrestrial + horizontal IR
                << 900.0 * bell    // global horizontal radiation
                << "," << dnr << "," << dhr << ","
                << 10000.0 * bell  // global horizontal illuminance
                << "," << dni_illum << "," << dhi_illum << ","
                << "4000,180,3,10,10,7777,9,999999999,0,0.0,0,88,0.2,0\n";
        }
    }
    return out.str();
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a * 0x9E3779B97F4A7C15ull + b;
    x ^= x >> 33;
    x *= 0xC2B2AE3D27D4EB4Full;
    x ^= x >> 29;
    return x;
}

} // namespace testsupport

#endif
