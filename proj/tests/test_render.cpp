#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "panolum/render.hpp"
#include "support.hpp"

using namespace panolum;
using testsupport::kPi;

namespace {

// Test-side ray/window oracle: does the ray from `origin` through the box
// window (wall 0 at z = -3, x in [-1, 1], y in [0.75, 2.25]) escape?
bool through_window(const Vec3& origin, const Vec3& dir) {
    if (dir.z >= 0.0)
        return false;
    double t = (-3.0 - origin.z) / dir.z;
    if (t <= 0.0)
        return false;
    double x = origin.x + dir.x * t;
    double y = origin.y + dir.y * t;
    return x > -1.0 && x < 1.0 && y > 0.75 && y < 2.25;
}

double mean_value(const LuminanceMap& map) {
    double sum = 0.0;
    for (float v : map.values)
        sum += v;
    return sum / static_cast<double>(map.values.size());
}

// Closed-form irradiance on a horizontal upward sensor from a vertical
// rectangle of constant radiance L: rectangle plane at distance c, width
// x in [x0, x1], height y in [y0, y1] above the sensor.
double perpendicular_rect_illuminance(double L, double c, double x0, double x1,
                                      double y0, double y1) {
    double q0 = std::sqrt(y0 * y0 + c * c);
    double q1 = std::sqrt(y1 * y1 + c * c);
    return (L * c / 2.0) *
           ((std::atan(x1 / q0) - std::atan(x0 / q0)) / q0 -
            (std::atan(x1 / q1) - std::atan(x0 / q1)) / q1);
}

} // namespace

TEST_CASE("black room with an open window is exactly two-valued") {
    SceneSpec spec = testsupport::make_box_scene(0.0, 0.0, 0.0);
    SceneModel scene = spec.build();
    const double L = 100.0;
    SkyModel sky = testsupport::uniform_sky(L);

    Viewpoint vp{{0.0, 1.6, 0.0}, 0.0};
    RenderParams params;
    params.samples_per_pixel = 16;
    params.seed = 1;
    const int W = 64;
    LuminanceMap map = render_panorama(scene, sky, vp, W, params);

    int interior = 0, exterior = 0;
    for (int y = 0; y < W / 2; ++y) {
        for (int x = 0; x < W; ++x) {
            // classify the pixel footprint on a 5x5 probe grid
            int through = 0, probes = 0;
            for (int i = 0; i < 5; ++i) {
                for (int j = 0; j < 5; ++j) {
                    double ox = -0.4999 + 0.24995 * i;
                    double oy = -0.4999 + 0.24995 * j;
                    Vec3 dir =
                        sph_to_cart(pixel_to_dir(x + ox, y + oy, W, W / 2));
                    ++probes;
                    if (through_window(vp.position, dir))
                        ++through;
                }
            }
            float v = map.at(x, y);
            if (through == probes) {
                CHECK(v == doctest::Approx(L).epsilon(1e-6));
                ++interior;
            } else if (through == 0) {
                CHECK(v == 0.0f);
                ++exterior;
            } else {
                CHECK(v >= 0.0f);
                CHECK(v <= static_cast<float>(L) * 1.0001f);
            }
        }
    }
    CHECK(interior > 5);
    CHECK(exterior > 500);
}

TEST_CASE("a room without apertures renders all zeros") {
    SceneSpec spec = testsupport::make_box_scene();
    spec.windows.clear();
    SceneModel scene = spec.build();
    SkyModel sky = testsupport::uniform_sky(1000.0);
    RenderParams params;
    params.samples_per_pixel = 4;
    LuminanceMap map = render_panorama(scene, sky, {{0.0, 1.6, 0.0}, 0.0}, 32, params);
    for (float v : map.values)
        CHECK(v == 0.0f);
}

TEST_CASE("glass window attenuates the sky by tau") {
    SceneSpec spec = testsupport::make_box_scene(0.0, 0.0, 0.0, false);
    spec.materials.glass_transmittance = 0.88;
    SceneModel scene = spec.build();
    SkyModel sky = testsupport::uniform_sky(200.0);

    Viewpoint vp{{0.1, 1.5, -1.0}, 0.0};
    RenderParams params;
    params.samples_per_pixel = 4;
    params.seed = 7;
    LuminanceMap map = render_panorama(scene, sky, vp, 64, params);

    // the pixel looking at the window center; the window subtends tens of
    // degrees from here, so the whole pixel footprint passes through glass
    double u, v;
    Vec3 to_window = normalized(Vec3{0.0, 1.5, -3.0} - vp.position);
    dir_to_pixel(cart_to_sph(to_window), 64, 32, u, v);
    int x = std::min(63, static_cast<int>(std::lround(u)));
    int y = std::min(31, static_cast<int>(std::lround(v)));
    CHECK(map.at(x, y) == doctest::Approx(0.88 * 200.0).epsilon(1e-6));
}

TEST_CASE("indoor brightness grows with bounce count and stays bounded") {
    SceneSpec spec = testsupport::make_box_scene(0.5, 0.5, 0.5);
    SceneModel scene = spec.build();
    const double L = 100.0;
    SkyModel sky = testsupport::uniform_sky(L);
    Viewpoint vp{{0.0, 1.6, 1.0}, 0.0};

    double prev = -1.0;
    for (int ab : {0, 1, 2, 8}) {
        RenderParams params;
        params.samples_per_pixel = 32;
        params.max_bounces = ab;
        params.seed = 99;
        LuminanceMap map = render_panorama(scene, sky, vp, 32, params);
        double mean = mean_value(map);
        CHECK(mean > prev);
        prev = mean;
        // every path carries at most the sky luminance
        for (float v : map.values)
            CHECK(v <= L * 1.0001);
    }
}

TEST_CASE("same seed gives bit-identical images across thread counts") {
    SceneSpec spec = testsupport::make_box_scene();
    SceneModel scene = spec.build();
    SkyModel sky = testsupport::uniform_sky(120.0);
    Viewpoint vp{{0.3, 1.4, 0.5}, kPi};

    RenderParams one;
    one.samples_per_pixel = 8;
    one.seed = 42;
    one.threads = 1;
    RenderParams four = one;
    four.threads = 4;

    LuminanceMap a = render_panorama(scene, sky, vp, 32, one);
    LuminanceMap b = render_panorama(scene, sky, vp, 32, four);
    CHECK(a.values == b.values);

    LuminanceMap fa = render_fisheye(scene, sky, vp, 24, one);
    LuminanceMap fb = render_fisheye(scene, sky, vp, 24, four);
    CHECK(fa.values == fb.values);

    RenderParams other = one;
    other.seed = 43;
    LuminanceMap c = render_panorama(scene, sky, vp, 32, other);
    CHECK(a.values != c.values);
}

TEST_CASE("a window-facing view is far brighter than a windowless one") {
    SceneSpec spec = testsupport::make_box_scene();
    SceneModel scene = spec.build();
    SkyModel sky = testsupport::uniform_sky(50.0);
    RenderParams params;
    params.samples_per_pixel = 8;
    params.seed = 2;

    Viewpoint away{{0.0, 1.5, 0.0}, 0.0};   // toward the blank z = +3 wall
    Viewpoint facing{{0.0, 1.5, 0.0}, kPi}; // toward the window
    LuminanceMap blank = render_fisheye(scene, sky, away, 24, params);
    LuminanceMap window = render_fisheye(scene, sky, facing, 24, params);
    float max_window = *std::max_element(window.values.begin(), window.values.end());
    CHECK(max_window == doctest::Approx(50.0).epsilon(1e-6)); // sky through glassless window
    CHECK(mean_value(blank) < 0.5 * mean_value(window));
}

TEST_CASE("viewpoint outside the room is rejected") {
    SceneSpec spec = testsupport::make_box_scene();
    SceneModel scene = spec.build();
    SkyModel sky = testsupport::uniform_sky(100.0);
    for (Vec3 pos : {Vec3{5.0, 1.6, 0.0}, Vec3{0.0, -1.0, 0.0}, Vec3{0.0, 4.0, 0.0}}) {
        try {
            render_panorama(scene, sky, {pos, 0.0}, 32, {});
            FAIL("expected viewpoint_outside_room");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::viewpoint_outside_room);
        }
    }
}

TEST_CASE("relabeling equal walls leaves the image unchanged") {
    SceneSpec spec = testsupport::make_box_scene();
    SceneModel scene = spec.build();
    SceneModel renamed = scene;
    for (auto& s : renamed.surfaces) {
        if (s.name == "wall_1")
            s.name = "wall_2";
        else if (s.name == "wall_2")
            s.name = "wall_1";
    }
    SkyModel sky = testsupport::uniform_sky(80.0);
    Viewpoint vp{{0.0, 1.6, 0.0}, 0.0};
    RenderParams params;
    params.samples_per_pixel = 4;
    params.seed = 5;
    LuminanceMap a = render_panorama(scene, sky, vp, 32, params);
    LuminanceMap b = render_panorama(renamed, sky, vp, 32, params);
    CHECK(a.values == b.values);
}

TEST_CASE("fisheye render agrees with fisheye extraction of the panorama") {
    // Black walls keep the comparison free of one-bounce Monte Carlo noise;
    // what remains is the projection consistency of the two render paths.
    SceneSpec spec = testsupport::make_box_scene(0.0, 0.0, 0.0);
    SceneModel scene = spec.build();
    SkyModel sky = testsupport::uniform_sky(150.0);
    Viewpoint vp{{0.0, 1.5, 0.0}, kPi}; // facing the window wall

    RenderParams params;
    params.samples_per_pixel = 256;
    params.seed = 11;
    const int size = 96;

    LuminanceMap direct = render_fisheye(scene, sky, vp, size, params);
    LuminanceMap pano = render_panorama(scene, sky, vp, 256, params);

    HdrImage pano_img;
    pano_img.width = pano.width;
    pano_img.height = pano.height;
    pano_img.projection = Projection::equirectangular;
    pano_img.pixels.resize(pano.values.size() * 3);
    for (std::size_t i = 0; i < pano.values.size(); ++i)
        pano_img.pixels[i * 3] = pano_img.pixels[i * 3 + 1] =
            pano_img.pixels[i * 3 + 2] = pano.values[i];
    HdrImage extracted = extract_fisheye(pano_img, vp.view_azimuth, size);

    double err_sum = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            if (!fisheye_disk_contains(x + 0.5, y + 0.5, size))
                continue;
            double a = direct.at(x, y);
            double b = extracted.at(x, y)[0];
            double denom = std::max({a, b, 1.0});
            err_sum += std::fabs(a - b) / denom;
            ++n;
        }
    }
    CHECK(err_sum / static_cast<double>(n) < 0.05);
}

TEST_CASE("direct horizontal illuminance through a rectangular aperture") {
    // Enclosed box whose only sky access is the window on wall 0
    // (z = -3, x in [-1, 1], y in [0.75, 2.25]).
    SceneSpec spec = testsupport::make_box_scene();
    SceneModel scene = spec.build();

    const double L = 100.0;
    SkyModel sky = testsupport::uniform_sky(L);
    Vec3 sensor{0.0, 0.2, 0.0};
    double got = direct_horizontal_illuminance(scene, sky, sensor, 0.2);
    // window rectangle relative to the sensor: distance 3, x in [-1, 1],
    // heights in [0.55, 2.05]
    double expect = perpendicular_rect_illuminance(L, 3.0, -1.0, 1.0, 0.55, 2.05);
    CHECK(got == doctest::Approx(expect).epsilon(0.01));

    // no apertures at all: an enclosing box with no windows reads zero
    SceneSpec closed = testsupport::make_box_scene();
    closed.windows.clear();
    CHECK(direct_horizontal_illuminance(closed.build(), sky, {0.0, 1.0, 0.0}, 0.5) ==
          0.0);
}

TEST_CASE("direct horizontal illuminance approaches pi L under an open ceiling") {
    // empty scene: the bare hemisphere integral
    SceneModel empty;
    const double L = 40.0;
    SkyModel sky = testsupport::uniform_sky(L);
    CHECK(direct_horizontal_illuminance(empty, sky, {0, 0, 0}, 0.5) ==
          doctest::Approx(kPi * L).epsilon(1e-3));

    // wide floor and low distant walls, ceiling removed: the opening occupies
    // nearly the whole hemisphere seen from the center
    SceneModel scene;
    scene.materials = {{"wall_mat", MaterialKind::plastic, 0.3}};
    scene.surfaces.push_back({"floor", 0,
                              {{-50, 0, -50}, {50, 0, -50}, {50, 0, 50}, {-50, 0, 50}}});
    auto wall = [&](double x0, double z0, double x1, double z1, int i) {
        scene.surfaces.push_back({"wall_" + std::to_string(i), 0,
                                  {{x0, 0, z0}, {x1, 0, z1}, {x1, 3, z1}, {x0, 3, z0}}});
    };
    wall(-50, -50, 50, -50, 0);
    wall(50, -50, 50, 50, 1);
    wall(50, 50, -50, 50, 2);
    wall(-50, 50, -50, -50, 3);

    double got = direct_horizontal_illuminance(scene, sky, {0, 1, 0}, 0.5);
    CHECK(got < kPi * L);
    CHECK(got == doctest::Approx(kPi * L).epsilon(0.005));
}

TEST_CASE("monte carlo variance halves when samples double") {
    SceneSpec spec = testsupport::make_box_scene();
    SceneModel scene = spec.build();
    SkyModel sky = testsupport::uniform_sky(100.0);
    Viewpoint vp{{0.0, 1.6, 1.5}, kPi};

    auto pixel_variances = [&](int spp) {
        const int runs = 24;
        const int W = 16;
        std::vector<LuminanceMap> maps;
        for (int r = 0; r < runs; ++r) {
            RenderParams params;
            params.samples_per_pixel = spp;
            params.seed = testsupport::mix_seed(1234, static_cast<std::uint64_t>(r));
            maps.push_back(render_panorama(scene, sky, vp, W, params));
        }
        // mean per-pixel variance across runs, over pixels with signal
        double total = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < maps[0].values.size(); ++i) {
            double mean = 0.0;
            for (const auto& m : maps)
                mean += m.values[i];
            mean /= runs;
            if (mean < 1e-3)
                continue;
            double var = 0.0;
            for (const auto& m : maps) {
                double d = m.values[i] - mean;
                var += d * d;
            }
            total += var / (runs - 1);
            ++n;
        }
        return total / static_cast<double>(n);
    };

    double v8 = pixel_variances(8);
    double v16 = pixel_variances(16);
    double ratio = v8 / v16;
    CHECK(ratio > 1.4);
    CHECK(ratio < 2.9);
}
