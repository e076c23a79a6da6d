#ifndef PANOLUM_PROJECTION_HPP
#define PANOLUM_PROJECTION_HPP

#include <array>

#include "panolum/geometry.hpp"
#include "panolum/hdr_image.hpp"

namespace panolum {

// Azimuth theta in (-pi, pi], altitude phi in [-pi/2, pi/2].
struct SphericalDir {
    double theta = 0.0;
    double phi = 0.0;
};

using CartesianDir = Vec3; // y up, z forward, x right

CartesianDir sph_to_cart(const SphericalDir& d);
SphericalDir cart_to_sph(const Vec3& v); // throws zero_vector

// Equirectangular pixel mapping, pixel-center convention: integer pixel
// (u, v) has its center at (u + 0.5, v + 0.5). Requires W = 2H.
SphericalDir pixel_to_dir(double u, double v, int width, int height);
void dir_to_pixel(const SphericalDir& d, int width, int height, double& u,
                  double& v);

// Solid angle of one pixel in row v of a W x H equirectangular image.
double equirect_pixel_solid_angle(int v, int width, int height);

// Solid angle per unit pixel area at radius r (pixels) from the center of an
// equidistant fisheye disk of radius R (pixels).
double fisheye_pixel_solid_angle(double r, double R);

// Horizontal view axis at the given azimuth; up stays world-up.
struct ViewFrame {
    Vec3 forward;
    Vec3 right;
    Vec3 up;
};

ViewFrame make_view_frame(double view_azimuth);

// Maps a fisheye raster position (pixel-center coordinates px, py in a
// size x size image) to off-axis angle alpha and image polar angle beta
// (beta = 0 is image-up, increasing clockwise). Returns false outside the
// 180-degree disk.
bool fisheye_pixel_angles(double px, double py, int size, double& alpha,
                          double& beta);
Vec3 fisheye_dir(double alpha, double beta, const ViewFrame& frame);
// Inverse: direction -> continuous fisheye pixel-center coordinates.
// Returns false for directions behind the view plane (alpha > pi/2).
bool dir_to_fisheye_pixel(const Vec3& dir, const ViewFrame& frame, int size,
                          double& px, double& py);

// Bilinear sample of an equirectangular RGB raster at continuous pixel-center
// coordinates; longitude wraps at the seam, latitude clamps at the poles.
std::array<float, 3> sample_equirect_bilinear(const HdrImage& src, double u,
                                              double v);

// Equidistant 180-degree fisheye extraction at a horizontal view axis.
// out_size is the output square edge = disk diameter in pixels.
HdrImage extract_fisheye(const HdrImage& src, double view_azimuth, int out_size);

inline bool fisheye_disk_contains(double px, double py, int size) {
    double r = size / 2.0;
    double dx = px - r;
    double dy = py - r;
    return dx * dx + dy * dy <= r * r;
}

} // namespace panolum

#endif
