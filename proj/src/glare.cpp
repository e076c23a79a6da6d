#include "panolum/glare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>

#include "panolum/error.hpp"
#include "panolum/projection.hpp"

namespace panolum {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMinSourceSolidAngle = 1e-6; // sr

void require_fisheye(const LuminanceMap& map) {
    if (map.projection != Projection::fisheye180 || map.width != map.height ||
        map.width < 2)
        fail(Errc::bad_projection, "glare input must be a square fisheye180 map");
}

} // namespace

const char* glare_level_name(GlareLevel level) {
    switch (level) {
    case GlareLevel::imperceptible: return "imperceptible";
    case GlareLevel::perceptible: return "perceptible";
    case GlareLevel::disturbing: return "disturbing";
    case GlareLevel::intolerable: return "intolerable";
    }
    return "imperceptible";
}

double vertical_illuminance(const LuminanceMap& fisheye) {
    require_fisheye(fisheye);
    const int size = fisheye.width;
    const double R = size / 2.0;
    double total = 0.0;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double alpha, beta;
            if (!fisheye_pixel_angles(x + 0.5, y + 0.5, size, alpha, beta))
                continue;
            double dx = x + 0.5 - R;
            double dy = y + 0.5 - R;
            double r = std::sqrt(dx * dx + dy * dy);
            total += fisheye.at(x, y) * std::cos(alpha) *
                     fisheye_pixel_solid_angle(r, R);
        }
    }
    return total;
}

std::vector<GlareSource> detect_sources(const LuminanceMap& fisheye,
                                        const SourceDetection& policy) {
    require_fisheye(fisheye);
    const int size = fisheye.width;
    const double R = size / 2.0;

    auto solid_angle_at = [&](int x, int y) {
        double dx = x + 0.5 - R;
        double dy = y + 0.5 - R;
        return fisheye_pixel_solid_angle(std::sqrt(dx * dx + dy * dy), R);
    };

    double threshold;
    if (policy.absolute_cdm2) {
        threshold = *policy.absolute_cdm2;
    } else {
        // solid-angle weighted mean over the disk
        double lsum = 0.0, osum = 0.0;
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                double a, b;
                if (!fisheye_pixel_angles(x + 0.5, y + 0.5, size, a, b))
                    continue;
                double om = solid_angle_at(x, y);
                lsum += fisheye.at(x, y) * om;
                osum += om;
            }
        }
        threshold = policy.mean_multiplier * (osum > 0.0 ? lsum / osum : 0.0);
    }

    std::vector<int> label(static_cast<std::size_t>(size) * size, -1);
    auto bright = [&](int x, int y) {
        double a, b;
        return fisheye_pixel_angles(x + 0.5, y + 0.5, size, a, b) &&
               fisheye.at(x, y) > threshold;
    };

    std::vector<GlareSource> sources;
    for (int y0 = 0; y0 < size; ++y0) {
        for (int x0 = 0; x0 < size; ++x0) {
            std::size_t i0 = static_cast<std::size_t>(y0) * size + x0;
            if (label[i0] >= 0 || !bright(x0, y0))
                continue;
            // flood fill one 4-connected component
            double om_sum = 0.0, lum_sum = 0.0;
            Vec3 centroid{};
            ViewFrame axis = make_view_frame(0.0); // component geometry is
                                                   // relative to the view axis
            std::deque<std::pair<int, int>> queue{{x0, y0}};
            label[i0] = static_cast<int>(sources.size());
            while (!queue.empty()) {
                auto [x, y] = queue.front();
                queue.pop_front();
                double om = solid_angle_at(x, y);
                om_sum += om;
                lum_sum += fisheye.at(x, y) * om;
                double alpha, beta;
                fisheye_pixel_angles(x + 0.5, y + 0.5, size, alpha, beta);
                centroid += fisheye_dir(alpha, beta, axis) * om;
                const int nx[4] = {x - 1, x + 1, x, x};
                const int ny[4] = {y, y, y - 1, y + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || nx[k] >= size || ny[k] < 0 || ny[k] >= size)
                        continue;
                    std::size_t ni = static_cast<std::size_t>(ny[k]) * size + nx[k];
                    if (label[ni] >= 0 || !bright(nx[k], ny[k]))
                        continue;
                    label[ni] = label[i0];
                    queue.emplace_back(nx[k], ny[k]);
                }
            }
            if (om_sum < kMinSourceSolidAngle)
                continue;

            GlareSource src;
            src.solid_angle = om_sum;
            src.mean_luminance = lum_sum / om_sum;
            Vec3 c = normalized(centroid);
            // view axis is +z in the component frame
            src.sigma = std::acos(std::clamp(c.z, -1.0, 1.0));
            src.beta = std::atan2(c.x, c.y);
            double tau = src.sigma > 1e-12
                             ? std::atan2(std::fabs(c.x), std::fabs(c.y))
                             : 0.0;
            src.position_index = guth_position_index(src.sigma, tau);
            sources.push_back(src);
        }
    }
    return sources;
}

double guth_position_index(double sigma, double tau) {
    double s = sigma * 180.0 / kPi;
    double t = std::fabs(tau) * 180.0 / kPi;
    if (t > 90.0)
        t = 180.0 - t; // mirrored below the line of sight
    double a = (35.2 - 0.31889 * t - 1.22 * std::exp(-2.0 * t / 9.0)) * 1e-3;
    double b = (21.0 + 0.26667 * t - 0.002963 * t * t) * 1e-5;
    return std::exp(a * s + b * s * s);
}

GlareResult compute_dgp(double ev, std::vector<GlareSource> sources) {
    GlareResult result;
    result.ev = ev;
    result.sources = std::move(sources);

    double dgp;
    if (!(ev > 0.0)) {
        if (!result.sources.empty())
            fail(Errc::zero_ev_with_sources,
                 "DGP source term is undefined at zero vertical illuminance");
        dgp = 0.16;
    } else {
        double sum = 0.0;
        for (const auto& s : result.sources)
            sum += s.mean_luminance * s.mean_luminance * s.solid_angle /
                   (std::pow(ev, 1.87) * s.position_index * s.position_index);
        dgp = 5.87e-5 * ev + 9.8e-2 * std::log10(1.0 + sum) + 0.16;
    }
    result.dgp = std::clamp(dgp, 0.0, 1.0);
    result.level = classify(result.dgp);
    return result;
}

GlareLevel classify(double dgp) {
    if (dgp < 0.35)
        return GlareLevel::imperceptible;
    if (dgp < 0.40)
        return GlareLevel::perceptible;
    if (dgp < 0.45)
        return GlareLevel::disturbing;
    return GlareLevel::intolerable;
}

std::vector<SweepRow> dgp_sweep(const SceneModel& scene, const EpwFile& epw,
                                const Vec3& position, const SweepOptions& options,
                                const RenderParams& params) {
    std::vector<SweepRow> rows;
    const double step_deg = 360.0 / options.view_count;
    for (const auto& date : options.dates) {
        for (double hour : options.hours) {
            SkyModel sky =
                sky_from_epw(epw, date.month, date.day, hour, options.condition);
            for (int view = 1; view <= options.view_count; ++view) {
                double az_deg = (view - 1) * step_deg;
                Viewpoint vp{position, az_deg * kPi / 180.0};
                LuminanceMap fisheye =
                    render_fisheye(scene, sky, vp, options.fisheye_size, params);
                double ev = vertical_illuminance(fisheye);
                auto sources = detect_sources(fisheye, options.detection);
                GlareResult res = compute_dgp(ev, std::move(sources));
                SweepRow row;
                row.date = date;
                row.hour = hour;
                row.view = view;
                row.azimuth_deg = az_deg;
                row.ev = res.ev;
                row.dgp = res.dgp;
                row.level = res.level;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "date,hour,view,azimuth_deg,ev_lux,dgp,level\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%02d-%02d,%.4f,%d,%.4f,%.4f,%.4f,%s\n",
                      r.date.month, r.date.day, r.hour, r.view, r.azimuth_deg,
                      r.ev, r.dgp, glare_level_name(r.level));
        out << buf;
    }
    return out.str();
}

} // namespace panolum
