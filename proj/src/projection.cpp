#include "panolum/projection.hpp"

#include <cmath>

#include "panolum/error.hpp"

namespace panolum {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = kPi / 2.0;
} // namespace

CartesianDir sph_to_cart(const SphericalDir& d) {
    double cphi = std::cos(d.phi);
    return {cphi * std::sin(d.theta), std::sin(d.phi), cphi * std::cos(d.theta)};
}

SphericalDir cart_to_sph(const Vec3& v) {
    double n = norm(v);
    if (!(n > 0.0))
        fail(Errc::zero_vector, "cannot convert zero vector to direction");
    SphericalDir d;
    d.theta = std::atan2(v.x, v.z);
    d.phi = std::asin(v.y / n);
    return d;
}

SphericalDir pixel_to_dir(double u, double v, int width, int height) {
    if (width != 2 * height || height <= 0)
        fail(Errc::bad_dimensions, "equirectangular image requires W = 2H");
    SphericalDir d;
    d.theta = 2.0 * kPi * (u + 0.5) / width - kPi;
    d.phi = kHalfPi - kPi * (v + 0.5) / height;
    return d;
}

void dir_to_pixel(const SphericalDir& d, int width, int height, double& u,
                  double& v) {
    u = (d.theta + kPi) * width / (2.0 * kPi) - 0.5;
    v = (kHalfPi - d.phi) * height / kPi - 0.5;
}

double equirect_pixel_solid_angle(int v, int width, int height) {
    double phi_top = kHalfPi - kPi * v / height;
    double phi_bottom = kHalfPi - kPi * (v + 1) / height;
    return (2.0 * kPi / width) * (std::sin(phi_top) - std::sin(phi_bottom));
}

double fisheye_pixel_solid_angle(double r, double R) {
    double k = kHalfPi / R; // radians of off-axis angle per pixel of radius
    if (r < 1e-9)
        return k * k;
    return k * std::sin(k * r) / r;
}

ViewFrame make_view_frame(double view_azimuth) {
    ViewFrame f;
    f.forward = {std::sin(view_azimuth), 0.0, std::cos(view_azimuth)};
    f.up = {0.0, 1.0, 0.0};
    f.right = {std::cos(view_azimuth), 0.0, -std::sin(view_azimuth)};
    return f;
}

bool fisheye_pixel_angles(double px, double py, int size, double& alpha,
                          double& beta) {
    double c = size / 2.0;
    double dx = px - c;
    double dy = py - c;
    double r = std::sqrt(dx * dx + dy * dy);
    if (r > c)
        return false;
    alpha = kHalfPi * r / c;
    beta = std::atan2(dx, -dy); // image-up is -y
    return true;
}

Vec3 fisheye_dir(double alpha, double beta, const ViewFrame& frame) {
    double sa = std::sin(alpha);
    return frame.forward * std::cos(alpha) + frame.right * (sa * std::sin(beta)) +
           frame.up * (sa * std::cos(beta));
}

bool dir_to_fisheye_pixel(const Vec3& dir, const ViewFrame& frame, int size,
                          double& px, double& py) {
    Vec3 d = normalized(dir);
    double fz = dot(d, frame.forward);
    double fx = dot(d, frame.right);
    double fy = dot(d, frame.up);
    double alpha = std::acos(std::min(1.0, std::max(-1.0, fz)));
    if (alpha > kHalfPi)
        return false;
    double c = size / 2.0;
    double r = alpha / kHalfPi * c;
    double s = std::sqrt(fx * fx + fy * fy);
    if (s < 1e-15) {
        px = c;
        py = c;
        return true;
    }
    px = c + r * fx / s;
    py = c - r * fy / s;
    return true;
}

std::array<float, 3> sample_equirect_bilinear(const HdrImage& src, double u,
                                              double v) {
    const int W = src.width;
    const int H = src.height;
    double x0f = std::floor(u);
    double y0f = std::floor(v);
    double fx = u - x0f;
    double fy = v - y0f;
    int x0 = static_cast<int>(x0f);
    int y0 = static_cast<int>(y0f);

    auto wrap_x = [&](int x) {
        int m = x % W;
        return m < 0 ? m + W : m;
    };
    auto clamp_y = [&](int y) { return y < 0 ? 0 : (y >= H ? H - 1 : y); };

    const float* p00 = src.at(wrap_x(x0), clamp_y(y0));
    const float* p10 = src.at(wrap_x(x0 + 1), clamp_y(y0));
    const float* p01 = src.at(wrap_x(x0), clamp_y(y0 + 1));
    const float* p11 = src.at(wrap_x(x0 + 1), clamp_y(y0 + 1));

    std::array<float, 3> out{};
    for (int c = 0; c < 3; ++c) {
        double a = p00[c] * (1.0 - fx) + p10[c] * fx;
        double b = p01[c] * (1.0 - fx) + p11[c] * fx;
        out[c] = static_cast<float>(a * (1.0 - fy) + b * fy);
    }
    return out;
}

HdrImage extract_fisheye(const HdrImage& src, double view_azimuth, int out_size) {
    if (src.projection != Projection::equirectangular)
        fail(Errc::bad_projection, "fisheye extraction requires an equirectangular source");
    if (src.width != 2 * src.height)
        fail(Errc::bad_dimensions, "equirectangular image requires W = 2H");

    HdrImage out;
    out.width = out_size;
    out.height = out_size;
    out.projection = Projection::fisheye180;
    out.pixels.assign(static_cast<std::size_t>(out_size) * out_size * 3, 0.0f);

    ViewFrame frame = make_view_frame(view_azimuth);
    for (int y = 0; y < out_size; ++y) {
        for (int x = 0; x < out_size; ++x) {
            double alpha, beta;
            if (!fisheye_pixel_angles(x + 0.5, y + 0.5, out_size, alpha, beta))
                continue; // outside the disk stays zero
            Vec3 d = fisheye_dir(alpha, beta, frame);
            SphericalDir s = cart_to_sph(d);
            double u, v;
            dir_to_pixel(s, src.width, src.height, u, v);
            auto rgb = sample_equirect_bilinear(src, u, v);
            float* px = out.at(x, y);
            px[0] = rgb[0];
            px[1] = rgb[1];
            px[2] = rgb[2];
        }
    }
    return out;
}

} // namespace panolum
