#include "panolum/sky.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "panolum/error.hpp"

namespace panolum {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLuminousEfficacy = 110.0; // lm/W fallback

// CIE standard clear sky (type 12) coefficients.
constexpr double kGradA = -1.0;
constexpr double kGradB = -0.32;
constexpr double kIndC = 10.0;
constexpr double kIndD = -3.0;
constexpr double kIndE = 0.45;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_field(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used])))
            ++used;
        if (used != s.size())
            fail(Errc::non_numeric_field, std::string("trailing junk in ") + what + ": " + s);
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail(Errc::non_numeric_field, std::string("non-numeric ") + what + ": " + s);
    }
}

double gradation(double phi) {
    // phi = altitude; sin(phi) = cos(zenith angle)
    if (phi <= 0.0)
        return 1.0 + kGradA; // exp(b/sin phi) -> 0 at the horizon
    return 1.0 + kGradA * std::exp(kGradB / std::sin(phi));
}

double indicatrix(double chi) {
    return 1.0 + kIndC * (std::exp(kIndD * chi) - std::exp(kIndD * kPi / 2.0)) +
           kIndE * std::cos(chi) * std::cos(chi);
}

} // namespace

const EpwRecord* EpwFile::find(int month, int day, int hour) const {
    for (const auto& r : records)
        if (r.month == month && r.day == day && r.hour == hour)
            return &r;
    return nullptr;
}

EpwFile parse_epw(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("LOCATION,", 0) != 0)
        fail(Errc::missing_location_header, "EPW must begin with a LOCATION line");

    EpwFile epw;
    {
        auto fields = split_csv(line);
        // LOCATION,city,state,country,source,WMO,lat,lon,tz,elevation
        if (fields.size() < 10)
            fail(Errc::missing_location_header, "LOCATION line has too few fields");
        epw.location.city = fields[1];
        epw.location.latitude_deg = parse_field(fields[6], "latitude");
        epw.location.longitude_deg = parse_field(fields[7], "longitude");
        epw.location.timezone_hours = parse_field(fields[8], "timezone");
        epw.location.elevation_m = parse_field(fields[9], "elevation");
        if (std::fabs(epw.location.latitude_deg) > 90.0 ||
            std::fabs(epw.location.longitude_deg) > 180.0)
            fail(Errc::missing_location_header, "LOCATION latitude/longitude out of range");
    }

    // Seven remaining header lines (DESIGN CONDITIONS .. DATA PERIODS).
    for (int i = 0; i < 7; ++i) {
        if (!std::getline(in, line))
            fail(Errc::missing_location_header, "EPW header truncated");
    }

    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        auto fields = split_csv(line);
        // 1-indexed: 15 = DNR, 16 = DHR, 18 = DNI illum, 19 = DHI illum
        if (fields.size() < 19)
            fail(Errc::short_record, "EPW data row has fewer than 19 fields");
        EpwRecord rec;
        rec.month = static_cast<int>(parse_field(fields[1], "month"));
        rec.day = static_cast<int>(parse_field(fields[2], "day"));
        rec.hour = static_cast<int>(parse_field(fields[3], "hour"));
        rec.direct_normal_radiation = parse_field(fields[14], "direct normal radiation");
        rec.diffuse_horizontal_radiation =
            parse_field(fields[15], "diffuse horizontal radiation");
        rec.direct_normal_illuminance =
            parse_field(fields[17], "direct normal illuminance");
        rec.diffuse_horizontal_illuminance =
            parse_field(fields[18], "diffuse horizontal illuminance");
        if (rec.direct_normal_radiation < 0.0 ||
            rec.diffuse_horizontal_radiation < 0.0)
            fail(Errc::non_numeric_field, "negative radiation in EPW row");
        epw.records.push_back(rec);
    }
    return epw;
}

EpwFile parse_epw_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(Errc::io_failure, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_epw(buf.str());
}

SunPosition solar_position(double latitude_deg, double longitude_deg,
                           double timezone_hours, int month, int day,
                           double local_hour) {
    static const int doy_offset[12] = {0,   31,  59,  90,  120, 151,
                                       181, 212, 243, 273, 304, 334};
    int doy = doy_offset[month - 1] + day;
    double g = 2.0 * kPi / 365.0 * (doy - 1 + (local_hour - 12.0) / 24.0);

    double eqtime = 229.18 * (0.000075 + 0.001868 * std::cos(g) -
                              0.032077 * std::sin(g) - 0.014615 * std::cos(2 * g) -
                              0.040849 * std::sin(2 * g)); // minutes
    double decl = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
                  0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
                  0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g); // rad

    double time_offset = eqtime + 4.0 * longitude_deg - 60.0 * timezone_hours;
    double true_solar_minutes = local_hour * 60.0 + time_offset;
    double hour_angle = (true_solar_minutes / 4.0 - 180.0) * kPi / 180.0;

    double lat = latitude_deg * kPi / 180.0;
    double sin_alt = std::sin(lat) * std::sin(decl) +
                     std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
    SunPosition pos;
    pos.altitude = std::asin(std::clamp(sin_alt, -1.0, 1.0));
    double east = -std::cos(decl) * std::sin(hour_angle);
    double north = std::cos(lat) * std::sin(decl) -
                   std::sin(lat) * std::cos(decl) * std::cos(hour_angle);
    double az = std::atan2(east, north);
    if (az < 0.0)
        az += 2.0 * kPi;
    pos.azimuth = az;
    return pos;
}

double sun_solid_angle() {
    double r = kSunAngularRadiusDeg * kPi / 180.0;
    return 2.0 * kPi * (1.0 - std::cos(r));
}

double sky_luminance(const SkyModel& sky, const SphericalDir& d) {
    if (sky.condition == SkyCondition::uniform)
        return sky.zenith_luminance;
    if (d.phi < 0.0)
        return 0.0;
    if (sky.condition == SkyCondition::overcast)
        return sky.zenith_luminance * (1.0 + 2.0 * std::sin(d.phi)) / 3.0;

    // clear: gradation along altitude times circumsolar indicatrix,
    // normalized so the zenith reads Lz
    Vec3 dir = sph_to_cart(d);
    SphericalDir sun_dir{sky.sun.azimuth, sky.sun.altitude};
    Vec3 sun = sph_to_cart(sun_dir);
    double chi = angle_between(dir, sun);
    double sun_zenith_angle = kPi / 2.0 - sky.sun.altitude;
    double denom = indicatrix(sun_zenith_angle) * gradation(kPi / 2.0);
    return sky.zenith_luminance * indicatrix(chi) * gradation(d.phi) / denom;
}

double sky_horizontal_illuminance(const SkyModel& sky, double step_deg) {
    double step = step_deg * kPi / 180.0;
    int n_theta = static_cast<int>(std::lround(2.0 * kPi / step));
    int n_phi = static_cast<int>(std::lround((kPi / 2.0) / step));
    double dtheta = 2.0 * kPi / n_theta;
    double dphi = (kPi / 2.0) / n_phi;

    double total = 0.0;
    for (int j = 0; j < n_phi; ++j) {
        double phi = (j + 0.5) * dphi;
        double band = 0.0;
        for (int i = 0; i < n_theta; ++i) {
            double theta = -kPi + (i + 0.5) * dtheta;
            band += sky_luminance(sky, {theta, phi});
        }
        total += band * std::sin(phi) * std::cos(phi) * dphi * dtheta;
    }
    return total;
}

SkyModel normalize_sky(const SkyModel& sky, double evh_target) {
    SkyModel out = sky;
    if (!(evh_target > 0.0)) {
        out.zenith_luminance = 0.0;
        return out;
    }
    if (sky.condition == SkyCondition::overcast) {
        out.zenith_luminance = 9.0 * evh_target / (7.0 * kPi);
        return out;
    }
    if (sky.condition == SkyCondition::uniform) {
        out.zenith_luminance = evh_target / kPi;
        return out;
    }
    SkyModel probe = sky;
    probe.zenith_luminance = 1.0;
    double evh_unit = sky_horizontal_illuminance(probe);
    out.zenith_luminance = evh_unit > 0.0 ? evh_target / evh_unit : 0.0;
    return out;
}

double sun_from_record(const EpwRecord& rec, const SunPosition& pos) {
    if (!(pos.altitude > 0.0))
        fail(Errc::sun_below_horizon, "sun is below the horizon");
    double e_dn = rec.direct_illuminance_missing()
                      ? rec.direct_normal_radiation * kLuminousEfficacy
                      : rec.direct_normal_illuminance;
    return e_dn / sun_solid_angle();
}

SkyModel sky_from_epw(const EpwFile& epw, int month, int day, double local_hour,
                      SkyCondition condition) {
    SkyModel sky;
    sky.condition = condition;
    sky.sun = solar_position(epw.location.latitude_deg, epw.location.longitude_deg,
                             epw.location.timezone_hours, month, day, local_hour);

    // EPW record h covers the hour ending at h:00; 8.5 falls in record 9.
    int rec_hour = static_cast<int>(std::ceil(local_hour - 1e-9));
    rec_hour = std::clamp(rec_hour, 1, 24);
    const EpwRecord* rec = epw.find(month, day, rec_hour);
    if (!rec)
        fail(Errc::short_record, "no EPW record for the requested date and hour");

    double evh = rec->diffuse_illuminance_missing()
                     ? rec->diffuse_horizontal_radiation * kLuminousEfficacy
                     : rec->diffuse_horizontal_illuminance;
    sky = normalize_sky(sky, evh);

    if (condition == SkyCondition::clear && sky.sun.altitude > 0.0)
        sky.sun_luminance = sun_from_record(*rec, sky.sun);
    else
        sky.sun_luminance = 0.0;
    return sky;
}

} // namespace panolum
