#ifndef PANOLUM_RENDER_HPP
#define PANOLUM_RENDER_HPP

#include <cstdint>

#include "panolum/layout.hpp"
#include "panolum/photometry.hpp"
#include "panolum/sky.hpp"

namespace panolum {

struct RenderParams {
    int samples_per_pixel = 100;
    int max_bounces = 8;        // "ab": maximum diffuse bounce count
    double limit_weight = 0.01; // "lw": Russian-roulette threshold
    std::uint64_t seed = 0;
    int threads = 0; // 0 = PANOLUM_THREADS env var or hardware concurrency
};

struct Viewpoint {
    Vec3 position;
    double view_azimuth = 0.0; // radians, room frame; used by fisheye views
};

// Path-traced equirectangular luminance map (width x width/2), cd/m^2.
LuminanceMap render_panorama(const SceneModel& scene, const SkyModel& sky,
                             const Viewpoint& vp, int width,
                             const RenderParams& params = {});

// Path-traced equidistant 180-degree fisheye (size x size) about a horizontal
// axis at vp.view_azimuth.
LuminanceMap render_fisheye(const SceneModel& scene, const SkyModel& sky,
                            const Viewpoint& vp, int size,
                            const RenderParams& params = {});

// Deterministic quadrature of sky radiance reaching an upward-facing sensor
// through the scene's apertures, plus the direct sun term when unoccluded.
double direct_horizontal_illuminance(const SceneModel& scene, const SkyModel& sky,
                                     const Vec3& point, double step_deg = 0.25);

} // namespace panolum

#endif
