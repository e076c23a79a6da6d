#ifndef PANOLUM_ERROR_HPP
#define PANOLUM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace panolum {

enum class Errc {
    // hdr i/o
    malformed_header,
    unsupported_orientation,
    truncated_scanline,
    io_failure,
    // projection
    zero_vector,
    bad_dimensions,
    bad_projection,
    // photometry
    zero_region_luminance,
    empty_region,
    bad_range,
    dimension_mismatch,
    // layout
    schema_error,
    corner_order,
    horizon_violation,
    degenerate_corner,
    ray_parallel_to_wall,
    behind_camera,
    overlapping_apertures,
    empty_aperture,
    // sky / weather
    missing_location_header,
    short_record,
    non_numeric_field,
    sun_below_horizon,
    // renderer
    viewpoint_outside_room,
    // glare
    zero_ev_with_sources,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace panolum

#endif
