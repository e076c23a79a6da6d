#ifndef PANOLUM_SKY_HPP
#define PANOLUM_SKY_HPP

#include <string>
#include <vector>

#include "panolum/projection.hpp"

namespace panolum {

struct EpwLocation {
    std::string city;
    double latitude_deg = 0.0;   // north positive
    double longitude_deg = 0.0;  // east positive
    double timezone_hours = 0.0; // hours from UTC
    double elevation_m = 0.0;
};

struct EpwRecord {
    int month = 0;
    int day = 0;
    int hour = 0; // 1..24, record covers the hour ending at this time
    double direct_normal_radiation = 0.0;      // W/m^2
    double diffuse_horizontal_radiation = 0.0; // W/m^2
    double direct_normal_illuminance = 0.0;    // lux, sentinel >= 999900 = missing
    double diffuse_horizontal_illuminance = 0.0;

    bool direct_illuminance_missing() const {
        return direct_normal_illuminance >= 999900.0;
    }
    bool diffuse_illuminance_missing() const {
        return diffuse_horizontal_illuminance >= 999900.0;
    }
};

struct EpwFile {
    EpwLocation location;
    std::vector<EpwRecord> records;

    const EpwRecord* find(int month, int day, int hour) const;
};

EpwFile parse_epw(const std::string& text);
EpwFile parse_epw_file(const std::string& path);

struct SunPosition {
    double altitude = 0.0; // radians above horizon
    double azimuth = 0.0;  // radians clockwise from North, [0, 2pi)
};

// NOAA solar geometry, good to a few tenths of a degree.
SunPosition solar_position(double latitude_deg, double longitude_deg,
                           double timezone_hours, int month, int day,
                           double local_hour);

enum class SkyCondition {
    clear,    // CIE standard clear (type 12, low turbidity)
    overcast, // CIE overcast, 3:1 zenith-to-horizon gradation
    uniform,  // constant luminance in every direction; validation sky
};

struct SkyModel {
    SkyCondition condition = SkyCondition::overcast;
    SunPosition sun;
    double zenith_luminance = 0.0; // cd/m^2
    double sun_luminance = 0.0;    // cd/m^2; 0 under overcast
};

constexpr double kSunAngularRadiusDeg = 0.2665;
double sun_solid_angle(); // steradians

// Sky luminance toward d in the sky frame (theta measured from North,
// matching SunPosition azimuth). Below-horizon queries return 0 except for
// the uniform validation sky.
double sky_luminance(const SkyModel& sky, const SphericalDir& d);

// Horizontal illuminance contributed by the sky dome (no sun), by
// equirectangular quadrature at the given angular step.
double sky_horizontal_illuminance(const SkyModel& sky, double step_deg = 1.0);

// Scales zenith luminance so the sky dome delivers evh_target lux on an
// unshaded horizontal plane. Overcast uses the closed form Lz = 9 Evh / (7 pi).
SkyModel normalize_sky(const SkyModel& sky, double evh_target);

// Solar disk luminance from a weather record: direct normal illuminance over
// the solar disk solid angle, falling back to 110 lm/W luminous efficacy when
// the illuminance field is missing.
double sun_from_record(const EpwRecord& rec, const SunPosition& pos);

// Complete SkyModel for one record: solar position, zenith normalization from
// diffuse horizontal illuminance, and the solar disk (clear sky only).
SkyModel sky_from_epw(const EpwFile& epw, int month, int day, double local_hour,
                      SkyCondition condition);

} // namespace panolum

#endif
