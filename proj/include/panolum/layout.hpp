#ifndef PANOLUM_LAYOUT_HPP
#define PANOLUM_LAYOUT_HPP

#include <array>
#include <string>
#include <vector>

#include "panolum/geometry.hpp"

namespace panolum {

// One wall-corner column in an equirectangular panorama: the image column and
// the rows where the corner meets floor and ceiling.
struct CornerColumn {
    double u = 0.0;
    double v_floor = 0.0;
    double v_ceiling = 0.0;
};

struct CornerSet {
    int image_width = 0;
    int image_height = 0;
    std::vector<CornerColumn> corners; // plan order (counterclockwise expected)
};

struct WindowQuad {
    int wall = 0;
    std::array<std::array<double, 2>, 4> quad; // (u, v) image points
};

// Full annotation document: corners plus window quads.
struct CornerDoc {
    CornerSet corners;
    std::vector<WindowQuad> windows;
    double camera_height_m = 1.6;
};

struct RoomLayout {
    std::vector<std::array<double, 2>> floor_polygon; // (x, z) meters at y = 0
    double ceiling_height = 0.0;                      // meters
    double camera_height = 1.6;                       // camera at (0, h_c, 0)

    std::size_t wall_count() const { return floor_polygon.size(); }
    double wall_length(std::size_t i) const;
};

// Rectangle in wall-plane coordinates: s meters along the wall from its first
// corner, t meters above the floor.
struct WindowAperture {
    int wall = 0;
    double s0 = 0.0, t0 = 0.0, s1 = 0.0, t1 = 0.0;
};

enum class MaterialKind { plastic, glass, open };

struct Material {
    std::string name;
    MaterialKind kind = MaterialKind::plastic;
    double value = 0.5; // reflectance for plastic, transmittance for glass
};

struct Surface {
    std::string name;
    int material = 0; // index into SceneModel::materials
    std::vector<Vec3> polygon;
};

struct SceneModel {
    std::vector<Material> materials;
    std::vector<Surface> surfaces;
    // Compass heading (degrees clockwise from North) of the room's +z axis.
    double north_offset_deg = 0.0;
};

struct MaterialSet {
    double wall_reflectance = 0.5;
    double ceiling_reflectance = 0.7;
    double floor_reflectance = 0.2;
    bool window_open = true; // true: unglazed aperture, false: glass
    double glass_transmittance = 0.88;
};

CornerDoc parse_corner_json(const std::string& text);

RoomLayout reconstruct_room(const CornerSet& corners, double camera_height = 1.6);

WindowAperture project_window(const std::array<std::array<double, 2>, 4>& quad,
                              int wall_index, const RoomLayout& room,
                              int image_width, int image_height);

SceneModel build_scene(const RoomLayout& room,
                       const std::vector<WindowAperture>& apertures,
                       const MaterialSet& mats = {});

std::string export_rad(const SceneModel& scene);
std::string export_obj(const SceneModel& scene, bool triangulate = false);

// Self-contained scene description used by the CLI pipeline.
struct SceneSpec {
    RoomLayout room;
    std::vector<WindowAperture> windows;
    MaterialSet materials;
    double north_offset_deg = 0.0;

    SceneModel build() const {
        SceneModel m = build_scene(room, windows, materials);
        m.north_offset_deg = north_offset_deg;
        return m;
    }
};

std::string scene_spec_to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const std::string& text);

// Plan-polygon helpers shared with the renderer.
bool polygon_is_simple(const std::vector<std::array<double, 2>>& poly);
bool point_in_polygon(double x, double z,
                      const std::vector<std::array<double, 2>>& poly);
double polygon_area(const std::vector<Vec3>& polygon);

} // namespace panolum

#endif
