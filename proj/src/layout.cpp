#include "panolum/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "panolum/error.hpp"
#include "panolum/projection.hpp"

namespace panolum {

namespace {

constexpr double kMinFloorAngle = 1e-3; // rad; grazing floor rays are unusable

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

double seg_cross(const std::array<double, 2>& o, const std::array<double, 2>& a,
                 const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool segments_intersect(const std::array<double, 2>& p1,
                        const std::array<double, 2>& p2,
                        const std::array<double, 2>& q1,
                        const std::array<double, 2>& q2) {
    double d1 = seg_cross(q1, q2, p1);
    double d2 = seg_cross(q1, q2, p2);
    double d3 = seg_cross(p1, p2, q1);
    double d4 = seg_cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](const std::array<double, 2>& a,
                         const std::array<double, 2>& b,
                         const std::array<double, 2>& p) {
        return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) &&
               std::min(a[1], b[1]) <= p[1] && p[1] <= std::max(a[1], b[1]);
    };
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

} // namespace

bool polygon_is_simple(const std::vector<std::array<double, 2>>& poly) {
    const std::size_t n = poly.size();
    if (n < 3)
        return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // skip adjacent edges (they share an endpoint)
            if (j == i + 1 || (i == 0 && j == n - 1))
                continue;
            if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j],
                                   poly[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

bool point_in_polygon(double x, double z,
                      const std::vector<std::array<double, 2>>& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        double xi = poly[i][0], zi = poly[i][1];
        double xj = poly[j][0], zj = poly[j][1];
        if ((zi > z) != (zj > z) &&
            x < (xj - xi) * (z - zi) / (zj - zi) + xi)
            inside = !inside;
    }
    return inside;
}

double polygon_area(const std::vector<Vec3>& polygon) {
    Vec3 acc{};
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i)
        acc += cross(polygon[i], polygon[(i + 1) % n]);
    return 0.5 * norm(acc);
}

double RoomLayout::wall_length(std::size_t i) const {
    const auto& a = floor_polygon[i];
    const auto& b = floor_polygon[(i + 1) % floor_polygon.size()];
    return std::hypot(b[0] - a[0], b[1] - a[1]);
}

CornerDoc parse_corner_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::schema_error, std::string("invalid corner JSON: ") + e.what());
    }

    CornerDoc out;
    try {
        const auto& image = doc.at("image");
        out.corners.image_width = image.at("width").get<int>();
        out.corners.image_height = image.at("height").get<int>();
        if (doc.contains("camera_height_m"))
            out.camera_height_m = doc.at("camera_height_m").get<double>();
        for (const auto& c : doc.at("corners")) {
            CornerColumn col;
            col.u = c.at("u").get<double>();
            col.v_floor = c.at("v_floor").get<double>();
            col.v_ceiling = c.at("v_ceiling").get<double>();
            out.corners.corners.push_back(col);
        }
        if (doc.contains("windows")) {
            for (const auto& w : doc.at("windows")) {
                WindowQuad q;
                q.wall = w.at("wall").get<int>();
                const auto& quad = w.at("quad");
                if (quad.size() != 4)
                    fail(Errc::schema_error, "window quad must have 4 points");
                for (int i = 0; i < 4; ++i) {
                    q.quad[i][0] = quad[i].at(0).get<double>();
                    q.quad[i][1] = quad[i].at(1).get<double>();
                }
                out.windows.push_back(q);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::schema_error, std::string("corner JSON schema violation: ") + e.what());
    }

    const int W = out.corners.image_width;
    const int H = out.corners.image_height;
    if (W <= 0 || H <= 0 || W != 2 * H)
        fail(Errc::schema_error, "corner JSON image must be equirectangular (W = 2H)");
    if (out.corners.corners.size() < 3)
        fail(Errc::schema_error, "need at least 3 corners");
    if (!(out.camera_height_m > 0.0))
        fail(Errc::schema_error, "camera_height_m must be positive");

    for (const auto& c : out.corners.corners) {
        SphericalDir f = pixel_to_dir(c.u, c.v_floor, W, H);
        SphericalDir t = pixel_to_dir(c.u, c.v_ceiling, W, H);
        if (f.phi >= 0.0)
            fail(Errc::horizon_violation, "floor corner at or above the horizon row");
        if (t.phi <= 0.0)
            fail(Errc::horizon_violation, "ceiling corner at or below the horizon row");
    }

    for (const auto& w : out.windows) {
        if (w.wall < 0 ||
            static_cast<std::size_t>(w.wall) >= out.corners.corners.size())
            fail(Errc::schema_error, "window wall index out of range");
    }

    // Plan shape is scale-invariant in camera height, so simplicity can be
    // checked here with h_c = 1.
    std::vector<std::array<double, 2>> plan;
    for (const auto& c : out.corners.corners) {
        SphericalDir f = pixel_to_dir(c.u, c.v_floor, W, H);
        double d = 1.0 / std::tan(-f.phi);
        plan.push_back({d * std::sin(f.theta), d * std::cos(f.theta)});
    }
    if (!polygon_is_simple(plan))
        fail(Errc::corner_order, "corner columns do not form a simple plan polygon");

    return out;
}

RoomLayout reconstruct_room(const CornerSet& corners, double camera_height) {
    if (corners.corners.size() < 3)
        fail(Errc::schema_error, "need at least 3 corners");
    const int W = corners.image_width;
    const int H = corners.image_height;

    RoomLayout room;
    room.camera_height = camera_height;
    double ceiling_sum = 0.0;
    for (const auto& c : corners.corners) {
        SphericalDir f = pixel_to_dir(c.u, c.v_floor, W, H);
        SphericalDir t = pixel_to_dir(c.u, c.v_ceiling, W, H);
        if (f.phi >= 0.0 || -f.phi < kMinFloorAngle)
            fail(Errc::degenerate_corner,
                 "floor corner ray too close to the horizon");
        if (t.phi <= 0.0)
            fail(Errc::degenerate_corner, "ceiling corner ray not above the horizon");
        double d = camera_height / std::tan(-f.phi);
        room.floor_polygon.push_back({d * std::sin(f.theta), d * std::cos(f.theta)});
        ceiling_sum += camera_height + d * std::tan(t.phi);
    }
    room.ceiling_height = ceiling_sum / static_cast<double>(corners.corners.size());

    if (!polygon_is_simple(room.floor_polygon))
        fail(Errc::corner_order, "reconstructed plan polygon is not simple");
    if (!point_in_polygon(0.0, 0.0, room.floor_polygon))
        fail(Errc::corner_order, "camera is not inside the reconstructed plan polygon");
    return room;
}

WindowAperture project_window(const std::array<std::array<double, 2>, 4>& quad,
                              int wall_index, const RoomLayout& room,
                              int image_width, int image_height) {
    const std::size_t n = room.wall_count();
    const auto& a2 = room.floor_polygon[static_cast<std::size_t>(wall_index)];
    const auto& b2 = room.floor_polygon[(static_cast<std::size_t>(wall_index) + 1) % n];
    Vec3 A{a2[0], 0.0, a2[1]};
    Vec3 B{b2[0], 0.0, b2[1]};
    Vec3 along = B - A;
    double len = norm(along);
    Vec3 w_hat = along / len;
    Vec3 normal = normalized(Vec3{along.z, 0.0, -along.x});
    Vec3 cam{0.0, room.camera_height, 0.0};

    double s_min = 1e300, s_max = -1e300, t_min = 1e300, t_max = -1e300;
    for (const auto& p : quad) {
        SphericalDir sd = pixel_to_dir(p[0], p[1], image_width, image_height);
        Vec3 dir = sph_to_cart(sd);
        double denom = dot(dir, normal);
        if (std::fabs(denom) < 1e-9)
            fail(Errc::ray_parallel_to_wall, "window ray parallel to the wall plane");
        double t = dot(A - cam, normal) / denom;
        if (t <= 0.0)
            fail(Errc::behind_camera, "window ray intersects the wall plane behind the camera");
        Vec3 hit = cam + dir * t;
        double s = dot(hit - A, w_hat);
        s_min = std::min(s_min, s);
        s_max = std::max(s_max, s);
        t_min = std::min(t_min, hit.y);
        t_max = std::max(t_max, hit.y);
    }

    WindowAperture ap;
    ap.wall = wall_index;
    ap.s0 = std::max(0.0, s_min);
    ap.s1 = std::min(len, s_max);
    ap.t0 = std::max(0.0, t_min);
    ap.t1 = std::min(room.ceiling_height, t_max);
    if (!(ap.s0 < ap.s1) || !(ap.t0 < ap.t1))
        fail(Errc::empty_aperture, "window quad does not land on the wall");
    return ap;
}

namespace {

struct WallFrame {
    Vec3 origin;
    Vec3 along;
    double length;
};

Vec3 wall_point(const WallFrame& w, double s, double t) {
    return {w.origin.x + w.along.x * s, t, w.origin.z + w.along.z * s};
}

} // namespace

SceneModel build_scene(const RoomLayout& room,
                       const std::vector<WindowAperture>& apertures,
                       const MaterialSet& mats) {
    SceneModel scene;
    scene.materials = {
        {"floor_mat", MaterialKind::plastic, mats.floor_reflectance},
        {"ceiling_mat", MaterialKind::plastic, mats.ceiling_reflectance},
        {"wall_mat", MaterialKind::plastic, mats.wall_reflectance},
    };
    int window_mat = 3;
    if (mats.window_open)
        scene.materials.push_back({"window_open", MaterialKind::open, 1.0});
    else
        scene.materials.push_back(
            {"window_glass", MaterialKind::glass, mats.glass_transmittance});

    const double H = room.ceiling_height;
    const std::size_t n = room.wall_count();

    // Reject overlapping apertures on the same wall (shared edges are fine).
    for (std::size_t i = 0; i < apertures.size(); ++i) {
        const auto& a = apertures[i];
        if (a.wall < 0 || static_cast<std::size_t>(a.wall) >= n ||
            !(a.s0 < a.s1) || !(a.t0 < a.t1) || a.s0 < 0.0 || a.t0 < 0.0 ||
            a.s1 > room.wall_length(static_cast<std::size_t>(a.wall)) + 1e-9 ||
            a.t1 > H + 1e-9)
            fail(Errc::schema_error, "aperture outside its wall");
        for (std::size_t j = i + 1; j < apertures.size(); ++j) {
            const auto& b = apertures[j];
            if (a.wall != b.wall)
                continue;
            if (a.s0 < b.s1 && b.s0 < a.s1 && a.t0 < b.t1 && b.t0 < a.t1)
                fail(Errc::overlapping_apertures, "apertures overlap on one wall");
        }
    }

    Surface floor;
    floor.name = "floor";
    floor.material = 0;
    for (const auto& p : room.floor_polygon)
        floor.polygon.push_back({p[0], 0.0, p[1]});
    scene.surfaces.push_back(std::move(floor));

    Surface ceiling;
    ceiling.name = "ceiling";
    ceiling.material = 1;
    for (auto it = room.floor_polygon.rbegin(); it != room.floor_polygon.rend(); ++it)
        ceiling.polygon.push_back({(*it)[0], H, (*it)[1]});
    scene.surfaces.push_back(std::move(ceiling));

    for (std::size_t i = 0; i < n; ++i) {
        const auto& a2 = room.floor_polygon[i];
        const auto& b2 = room.floor_polygon[(i + 1) % n];
        WallFrame w;
        w.origin = {a2[0], 0.0, a2[1]};
        Vec3 b3{b2[0], 0.0, b2[1]};
        w.length = norm(b3 - w.origin);
        w.along = (b3 - w.origin) / w.length;

        std::vector<const WindowAperture*> on_wall;
        for (const auto& ap : apertures)
            if (ap.wall == static_cast<int>(i))
                on_wall.push_back(&ap);

        auto emit_rect = [&](double s0, double t0, double s1, double t1,
                             int part) {
            if (!(s0 < s1) || !(t0 < t1))
                return;
            Surface surf;
            surf.name = "wall_" + std::to_string(i) +
                        (part >= 0 ? "_part_" + std::to_string(part) : "");
            surf.material = 2;
            surf.polygon = {wall_point(w, s0, t0), wall_point(w, s1, t0),
                            wall_point(w, s1, t1), wall_point(w, s0, t1)};
            scene.surfaces.push_back(std::move(surf));
        };

        if (on_wall.empty()) {
            emit_rect(0.0, 0.0, w.length, H, -1);
            continue;
        }

        // Vertical slab partition: full-height slabs left/right of each
        // aperture, and below/above strips inside the aperture span. For a
        // single aperture this is the classic 4-rectangle frame.
        std::vector<double> cuts{0.0, w.length};
        for (const auto* ap : on_wall) {
            cuts.push_back(ap->s0);
            cuts.push_back(ap->s1);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        int part = 0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            double s0 = cuts[k];
            double s1 = cuts[k + 1];
            double mid = 0.5 * (s0 + s1);
            // apertures covering this slab, sorted by bottom edge
            std::vector<const WindowAperture*> covering;
            for (const auto* ap : on_wall)
                if (ap->s0 <= mid && mid <= ap->s1)
                    covering.push_back(ap);
            std::sort(covering.begin(), covering.end(),
                      [](const WindowAperture* a, const WindowAperture* b) {
                          return a->t0 < b->t0;
                      });
            double t = 0.0;
            for (const auto* ap : covering) {
                emit_rect(s0, t, s1, ap->t0, part++);
                t = ap->t1;
            }
            emit_rect(s0, t, s1, H, part++);
        }

        for (std::size_t k = 0; k < on_wall.size(); ++k) {
            const auto* ap = on_wall[k];
            Surface surf;
            surf.name = "window_" + std::to_string(i) + "_" + std::to_string(k);
            surf.material = window_mat;
            surf.polygon = {wall_point(w, ap->s0, ap->t0), wall_point(w, ap->s1, ap->t0),
                            wall_point(w, ap->s1, ap->t1), wall_point(w, ap->s0, ap->t1)};
            scene.surfaces.push_back(std::move(surf));
        }
    }
    return scene;
}

std::string export_rad(const SceneModel& scene) {
    std::ostringstream out;
    out << "# panolum scene export\n";
    for (const auto& m : scene.materials) {
        if (m.kind == MaterialKind::plastic) {
            std::string v = fmt_num(m.value);
            out << "void plastic " << m.name << " 0 0 5 " << v << " " << v << " "
                << v << " 0 0\n";
        } else if (m.kind == MaterialKind::glass) {
            std::string v = fmt_num(m.value);
            out << "void glass " << m.name << " 0 0 3 " << v << " " << v << " "
                << v << "\n";
        }
        // open apertures carry no Radiance primitive: they are holes
    }
    for (const auto& s : scene.surfaces) {
        const Material& m = scene.materials[static_cast<std::size_t>(s.material)];
        if (m.kind == MaterialKind::open)
            continue;
        out << m.name << " polygon " << s.name << " 0 0 "
            << s.polygon.size() * 3;
        for (const auto& p : s.polygon)
            out << " " << fmt_num(p.x) << " " << fmt_num(p.y) << " " << fmt_num(p.z);
        out << "\n";
    }
    return out.str();
}

std::string export_obj(const SceneModel& scene, bool triangulate) {
    std::ostringstream out;
    out << "# panolum OBJ export\n";

    // Weld vertices shared between surfaces (quantized at 1e-9 m).
    std::map<std::array<long long, 3>, int> index;
    std::vector<Vec3> verts;
    auto key_of = [](const Vec3& p) {
        auto q = [](double v) { return static_cast<long long>(std::llround(v * 1e9)); };
        return std::array<long long, 3>{q(p.x), q(p.y), q(p.z)};
    };
    std::vector<std::vector<int>> faces;
    for (const auto& s : scene.surfaces) {
        std::vector<int> face;
        for (const auto& p : s.polygon) {
            auto key = key_of(p);
            auto it = index.find(key);
            if (it == index.end()) {
                it = index.emplace(key, static_cast<int>(verts.size())).first;
                verts.push_back(p);
            }
            face.push_back(it->second);
        }
        faces.push_back(std::move(face));
    }

    for (const auto& v : verts)
        out << "v " << fmt_num(v.x) << " " << fmt_num(v.y) << " " << fmt_num(v.z)
            << "\n";
    for (std::size_t i = 0; i < scene.surfaces.size(); ++i) {
        out << "g " << scene.surfaces[i].name << "\n";
        const auto& face = faces[i];
        if (triangulate && face.size() > 3) {
            for (std::size_t k = 1; k + 1 < face.size(); ++k)
                out << "f " << face[0] + 1 << " " << face[k] + 1 << " "
                    << face[k + 1] + 1 << "\n";
        } else {
            out << "f";
            for (int idx : face)
                out << " " << idx + 1;
            out << "\n";
        }
    }
    return out.str();
}

std::string scene_spec_to_json(const SceneSpec& spec) {
    nlohmann::json doc;
    auto& room = doc["room"];
    room["floor_polygon"] = nlohmann::json::array();
    for (const auto& p : spec.room.floor_polygon)
        room["floor_polygon"].push_back({p[0], p[1]});
    room["ceiling_height_m"] = spec.room.ceiling_height;
    room["camera_height_m"] = spec.room.camera_height;

    doc["windows"] = nlohmann::json::array();
    for (const auto& w : spec.windows)
        doc["windows"].push_back({{"wall", w.wall},
                                  {"s0", w.s0},
                                  {"t0", w.t0},
                                  {"s1", w.s1},
                                  {"t1", w.t1}});

    auto& mats = doc["materials"];
    mats["wall_reflectance"] = spec.materials.wall_reflectance;
    mats["ceiling_reflectance"] = spec.materials.ceiling_reflectance;
    mats["floor_reflectance"] = spec.materials.floor_reflectance;
    mats["window_open"] = spec.materials.window_open;
    mats["glass_transmittance"] = spec.materials.glass_transmittance;
    doc["north_offset_deg"] = spec.north_offset_deg;
    return doc.dump(2) + "\n";
}

SceneSpec scene_spec_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::schema_error, std::string("invalid scene JSON: ") + e.what());
    }
    SceneSpec spec;
    try {
        const auto& room = doc.at("room");
        for (const auto& p : room.at("floor_polygon"))
            spec.room.floor_polygon.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        spec.room.ceiling_height = room.at("ceiling_height_m").get<double>();
        spec.room.camera_height = room.at("camera_height_m").get<double>();
        if (doc.contains("windows")) {
            for (const auto& w : doc.at("windows")) {
                WindowAperture ap;
                ap.wall = w.at("wall").get<int>();
                ap.s0 = w.at("s0").get<double>();
                ap.t0 = w.at("t0").get<double>();
                ap.s1 = w.at("s1").get<double>();
                ap.t1 = w.at("t1").get<double>();
                spec.windows.push_back(ap);
            }
        }
        if (doc.contains("materials")) {
            const auto& mats = doc.at("materials");
            auto opt = [&](const char* key, double& target) {
                if (mats.contains(key))
                    target = mats.at(key).get<double>();
            };
            opt("wall_reflectance", spec.materials.wall_reflectance);
            opt("ceiling_reflectance", spec.materials.ceiling_reflectance);
            opt("floor_reflectance", spec.materials.floor_reflectance);
            opt("glass_transmittance", spec.materials.glass_transmittance);
            if (mats.contains("window_open"))
                spec.materials.window_open = mats.at("window_open").get<bool>();
        }
        if (doc.contains("north_offset_deg"))
            spec.north_offset_deg = doc.at("north_offset_deg").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::schema_error, std::string("scene JSON schema violation: ") + e.what());
    }
    if (spec.room.floor_polygon.size() < 3)
        fail(Errc::schema_error, "scene floor polygon needs at least 3 vertices");
    if (!(spec.room.ceiling_height > spec.room.camera_height) ||
        !(spec.room.camera_height > 0.0))
        fail(Errc::schema_error, "scene requires H > camera height > 0");
    return spec;
}

} // namespace panolum
