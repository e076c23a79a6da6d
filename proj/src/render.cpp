#include "panolum/render.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

#include "panolum/error.hpp"
#include "panolum/projection.hpp"

namespace panolum {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRayEpsilon = 1e-6; // meters; offset against self-intersection

struct CompiledSurface {
    std::vector<Vec3> polygon;
    Vec3 normal; // unit
    double plane_d = 0.0;
    int drop_axis = 0; // dominant normal axis, dropped for 2D tests
    MaterialKind kind = MaterialKind::plastic;
    double value = 0.5;
};

struct Ray {
    Vec3 origin;
    Vec3 dir; // unit
};

struct Hit {
    double t = 0.0;
    const CompiledSurface* surface = nullptr;
};

class CompiledScene {
public:
    CompiledScene(const SceneModel& scene, const SkyModel& sky)
        : sky_(&sky) {
        north_rad_ = scene.north_offset_deg * kPi / 180.0;
        for (const auto& s : scene.surfaces) {
            if (s.polygon.size() < 3)
                continue;
            CompiledSurface cs;
            cs.polygon = s.polygon;
            Vec3 acc{};
            for (std::size_t i = 0; i < s.polygon.size(); ++i)
                acc += cross(s.polygon[i], s.polygon[(i + 1) % s.polygon.size()]);
            double a = norm(acc);
            if (!(a > 0.0))
                continue;
            cs.normal = acc / a;
            cs.plane_d = dot(cs.normal, s.polygon[0]);
            double ax = std::fabs(cs.normal.x);
            double ay = std::fabs(cs.normal.y);
            double az = std::fabs(cs.normal.z);
            cs.drop_axis = (ax >= ay && ax >= az) ? 0 : (ay >= az ? 1 : 2);
            const Material& m = scene.materials[static_cast<std::size_t>(s.material)];
            cs.kind = m.kind;
            cs.value = m.value;
            surfaces_.push_back(std::move(cs));
        }
        if (sky.sun_luminance > 0.0 && sky.sun.altitude > 0.0) {
            sun_dir_ = sph_to_cart(
                {wrap_angle(sky.sun.azimuth - north_rad_), sky.sun.altitude});
            sun_radius_rad_ = kSunAngularRadiusDeg * kPi / 180.0;
            has_sun_ = true;
        }
    }

    static double wrap_angle(double a) {
        while (a > kPi)
            a -= 2.0 * kPi;
        while (a <= -kPi)
            a += 2.0 * kPi;
        return a;
    }

    // Nearest opaque hit, with the transmittance of every glazing pane that
    // sits in front of it. Open apertures are holes and never intersect.
    struct Traversal {
        bool hit_opaque = false;
        double t = 0.0;
        const CompiledSurface* surface = nullptr;
        double transmittance = 1.0; // product of glass tau up to the hit
    };

    Traversal traverse(const Ray& ray) const {
        Traversal tr;
        double nearest = 1e300;
        std::vector<std::pair<double, double>> glass; // (t, tau)
        for (const auto& s : surfaces_) {
            if (s.kind == MaterialKind::open)
                continue;
            double t;
            if (!intersect(s, ray, t))
                continue;
            if (s.kind == MaterialKind::glass) {
                glass.emplace_back(t, s.value);
            } else if (t < nearest) {
                nearest = t;
                tr.hit_opaque = true;
                tr.surface = &s;
            }
        }
        tr.t = nearest;
        for (const auto& [t, tau] : glass)
            if (!tr.hit_opaque || t < nearest)
                tr.transmittance *= tau;
        return tr;
    }

    // Transmittance toward the sky along a ray: 0 when an opaque surface
    // blocks it, otherwise the product of glazing factors.
    double transmittance(const Ray& ray) const {
        Traversal tr = traverse(ray);
        return tr.hit_opaque ? 0.0 : tr.transmittance;
    }

    double sky_toward(const Vec3& dir) const {
        SphericalDir d = cart_to_sph(dir);
        d.theta = wrap_angle(d.theta + north_rad_);
        return sky_luminance(*sky_, d);
    }

    bool has_sun() const { return has_sun_; }
    const Vec3& sun_dir() const { return sun_dir_; }
    double sun_radius_rad() const { return sun_radius_rad_; }
    double sun_luminance() const { return sky_->sun_luminance; }

    bool anything_hit(const Ray& ray) const {
        for (const auto& s : surfaces_) {
            double t;
            if (intersect(s, ray, t))
                return true;
        }
        return false;
    }

private:
    static bool intersect(const CompiledSurface& s, const Ray& ray, double& t_out) {
        double denom = dot(s.normal, ray.dir);
        if (std::fabs(denom) < 1e-12)
            return false;
        double t = (s.plane_d - dot(s.normal, ray.origin)) / denom;
        if (t < kRayEpsilon)
            return false;
        Vec3 p = ray.origin + ray.dir * t;
        if (!point_in_polygon_2d(s, p))
            return false;
        t_out = t;
        return true;
    }

    static bool point_in_polygon_2d(const CompiledSurface& s, const Vec3& p) {
        auto coords = [&](const Vec3& v, double& a, double& b) {
            switch (s.drop_axis) {
            case 0: a = v.y; b = v.z; break;
            case 1: a = v.x; b = v.z; break;
            default: a = v.x; b = v.y; break;
            }
        };
        double px, py;
        coords(p, px, py);
        bool inside = false;
        const std::size_t n = s.polygon.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            double xi, yi, xj, yj;
            coords(s.polygon[i], xi, yi);
            coords(s.polygon[j], xj, yj);
            if ((yi > py) != (yj > py) &&
                px < (xj - xi) * (py - yi) / (yj - yi) + xi)
                inside = !inside;
        }
        return inside;
    }

    std::vector<CompiledSurface> surfaces_;
    const SkyModel* sky_;
    double north_rad_ = 0.0;
    bool has_sun_ = false;
    Vec3 sun_dir_{0.0, 1.0, 0.0};
    double sun_radius_rad_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t pixel_stream_seed(std::uint64_t seed, int x, int y) {
    std::uint64_t h = splitmix64(seed ^ 0x6A09E667F3BCC908ull);
    h = splitmix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) |
                        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)) << 32)));
    return h;
}

class Sampler {
public:
    explicit Sampler(std::uint64_t stream_seed) : engine_(stream_seed) {}
    double next() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> dist_{0.0, 1.0};
};

void make_onb(const Vec3& n, Vec3& b1, Vec3& b2) {
    double sign = std::copysign(1.0, n.z);
    double a = -1.0 / (sign + n.z);
    double b = n.x * n.y * a;
    b1 = {1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x};
    b2 = {b, sign + n.y * n.y * a, -n.y};
}

Vec3 cosine_sample(const Vec3& n, double u1, double u2) {
    double r = std::sqrt(u1);
    double phi = 2.0 * kPi * u2;
    Vec3 b1, b2;
    make_onb(n, b1, b2);
    double z = std::sqrt(std::max(0.0, 1.0 - u1));
    return normalized(b1 * (r * std::cos(phi)) + b2 * (r * std::sin(phi)) + n * z);
}

double trace_path(const CompiledScene& scene, Ray ray, const RenderParams& params,
                  Sampler& rng) {
    double radiance = 0.0;
    double throughput = 1.0;
    bool camera_chain = true; // no diffuse scatter yet: the sun disk is visible
    int bounces = 0;

    for (;;) {
        CompiledScene::Traversal tr = scene.traverse(ray);
        if (!tr.hit_opaque) {
            double tau = tr.transmittance;
            radiance += throughput * tau * scene.sky_toward(ray.dir);
            if (camera_chain && scene.has_sun() &&
                angle_between(normalized(ray.dir), scene.sun_dir()) <=
                    scene.sun_radius_rad())
                radiance += throughput * tau * scene.sun_luminance();
            break;
        }

        throughput *= tr.transmittance;
        const CompiledSurface& surf = *tr.surface;
        Vec3 hit = ray.origin + ray.dir * tr.t;
        Vec3 n = dot(surf.normal, ray.dir) < 0.0 ? surf.normal : -surf.normal;
        double rho = surf.value;

        // next-event estimation toward the solar disk
        if (scene.has_sun()) {
            double cos_i = dot(n, scene.sun_dir());
            if (cos_i > 0.0) {
                Ray shadow{hit + n * kRayEpsilon, scene.sun_dir()};
                double vis = scene.transmittance(shadow);
                if (vis > 0.0)
                    radiance += throughput * (rho / kPi) * scene.sun_luminance() *
                                sun_solid_angle() * cos_i * vis;
            }
        }

        ++bounces;
        if (bounces > params.max_bounces)
            break;
        throughput *= rho;
        if (!(throughput > 0.0))
            break;
        if (throughput < params.limit_weight) {
            double p = throughput / params.limit_weight;
            if (rng.next() >= p)
                break;
            throughput = params.limit_weight;
        }
        ray = Ray{hit + n * kRayEpsilon, cosine_sample(n, rng.next(), rng.next())};
        camera_chain = false;
    }
    return radiance;
}

int resolve_threads(const RenderParams& params) {
    if (params.threads > 0)
        return params.threads;
    if (const char* env = std::getenv("PANOLUM_THREADS")) {
        int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Stratified jitter cell for sample i on a grid x grid pattern.
void stratum_offset(int i, int grid, double& ox, double& oy) {
    int cell = i % (grid * grid);
    ox = (cell % grid) / static_cast<double>(grid);
    oy = (cell / grid) / static_cast<double>(grid);
}

template <typename RayGen>
void render_loop(const CompiledScene& scene, const RenderParams& params,
                 LuminanceMap& out, RayGen&& make_ray) {
    const int width = out.width;
    const int height = out.height;
    const int spp = std::max(1, params.samples_per_pixel);
    const int grid = std::max(1, static_cast<int>(std::floor(std::sqrt(
                                  static_cast<double>(spp)))));
    const int n_threads = resolve_threads(params);

    std::atomic<int> next_row{0};
    auto worker = [&]() {
        for (;;) {
            int y = next_row.fetch_add(1);
            if (y >= height)
                return;
            for (int x = 0; x < width; ++x) {
                Sampler rng(pixel_stream_seed(params.seed, x, y));
                double sum = 0.0;
                for (int s = 0; s < spp; ++s) {
                    double ox, oy;
                    stratum_offset(s, grid, ox, oy);
                    double jx = (ox + rng.next() / grid);
                    double jy = (oy + rng.next() / grid);
                    Ray ray;
                    bool active = make_ray(x, y, jx, jy, ray);
                    if (active)
                        sum += trace_path(scene, ray, params, rng);
                }
                out.at(x, y) = static_cast<float>(sum / spp);
            }
        }
    };

    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
}

void check_viewpoint(const CompiledScene& scene, const Vec3& position) {
    // Inside the room both the floor below and the ceiling above are visible.
    Ray down{position, {0.0, -1.0, 0.0}};
    Ray up{position, {0.0, 1.0, 0.0}};
    if (!scene.anything_hit(down) || !scene.anything_hit(up))
        fail(Errc::viewpoint_outside_room, "viewpoint is not inside the scene");
}

} // namespace

LuminanceMap render_panorama(const SceneModel& scene, const SkyModel& sky,
                             const Viewpoint& vp, int width,
                             const RenderParams& params) {
    if (width < 2 || width % 2 != 0)
        fail(Errc::bad_dimensions, "panorama width must be a positive even number");
    CompiledScene cs(scene, sky);
    check_viewpoint(cs, vp.position);

    LuminanceMap out;
    out.width = width;
    out.height = width / 2;
    out.projection = Projection::equirectangular;
    out.values.assign(static_cast<std::size_t>(width) * (width / 2), 0.0f);

    render_loop(cs, params, out,
                [&](int x, int y, double jx, double jy, Ray& ray) {
                    SphericalDir d =
                        pixel_to_dir(x - 0.5 + jx, y - 0.5 + jy, width, width / 2);
                    ray = Ray{vp.position, sph_to_cart(d)};
                    return true;
                });
    return out;
}

LuminanceMap render_fisheye(const SceneModel& scene, const SkyModel& sky,
                            const Viewpoint& vp, int size,
                            const RenderParams& params) {
    if (size < 2)
        fail(Errc::bad_dimensions, "fisheye size must be at least 2");
    CompiledScene cs(scene, sky);
    check_viewpoint(cs, vp.position);

    LuminanceMap out;
    out.width = size;
    out.height = size;
    out.projection = Projection::fisheye180;
    out.values.assign(static_cast<std::size_t>(size) * size, 0.0f);

    ViewFrame frame = make_view_frame(vp.view_azimuth);
    render_loop(cs, params, out,
                [&](int x, int y, double jx, double jy, Ray& ray) {
                    double alpha, beta;
                    if (!fisheye_pixel_angles(x + jx, y + jy, size, alpha, beta))
                        return false;
                    ray = Ray{vp.position, fisheye_dir(alpha, beta, frame)};
                    return true;
                });
    return out;
}

double direct_horizontal_illuminance(const SceneModel& scene, const SkyModel& sky,
                                     const Vec3& point, double step_deg) {
    CompiledScene cs(scene, sky);
    double step = step_deg * kPi / 180.0;
    int n_theta = std::max(4, static_cast<int>(std::lround(2.0 * kPi / step)));
    int n_phi = std::max(1, static_cast<int>(std::lround((kPi / 2.0) / step)));
    double dtheta = 2.0 * kPi / n_theta;
    double dphi = (kPi / 2.0) / n_phi;

    double total = 0.0;
    for (int j = 0; j < n_phi; ++j) {
        double phi = (j + 0.5) * dphi;
        double sin_phi = std::sin(phi);
        double dom = dtheta * (std::sin((j + 1) * dphi) - std::sin(j * dphi));
        for (int i = 0; i < n_theta; ++i) {
            double theta = -kPi + (i + 0.5) * dtheta;
            Vec3 dir = sph_to_cart({theta, phi});
            double tau = cs.transmittance({point, dir});
            if (tau > 0.0)
                total += tau * cs.sky_toward(dir) * sin_phi * dom;
        }
    }

    if (cs.has_sun() && cs.sun_dir().y > 0.0) {
        double tau = cs.transmittance({point, cs.sun_dir()});
        if (tau > 0.0)
            total += tau * cs.sun_luminance() * sun_solid_angle() * cs.sun_dir().y;
    }
    return total;
}

} // namespace panolum
