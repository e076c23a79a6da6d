#ifndef PANOLUM_GLARE_HPP
#define PANOLUM_GLARE_HPP

#include <optional>
#include <string>
#include <vector>

#include "panolum/photometry.hpp"
#include "panolum/render.hpp"
#include "panolum/sky.hpp"

namespace panolum {

struct GlareSource {
    double mean_luminance = 0.0; // L_s, cd/m^2 (solid-angle weighted)
    double solid_angle = 0.0;    // omega_s, sr
    double position_index = 1.0; // Guth P
    // Centroid direction relative to the view axis: off-axis angle sigma and
    // image polar angle beta (0 = up, clockwise).
    double sigma = 0.0;
    double beta = 0.0;
};

enum class GlareLevel { imperceptible, perceptible, disturbing, intolerable };

const char* glare_level_name(GlareLevel level);

struct GlareResult {
    double dgp = 0.0;
    double ev = 0.0; // lux
    std::vector<GlareSource> sources;
    GlareLevel level = GlareLevel::imperceptible;
};

// Ev = sum L cos(alpha) dOmega over the fisheye disk.
double vertical_illuminance(const LuminanceMap& fisheye);

struct SourceDetection {
    double mean_multiplier = 5.0; // threshold = multiplier x mean luminance
    std::optional<double> absolute_cdm2; // overrides the multiplier policy
};

// 4-connected components above the threshold; components under 1e-6 sr are
// discarded.
std::vector<GlareSource> detect_sources(const LuminanceMap& fisheye,
                                        const SourceDetection& policy = {});

// Wienold-Christoffersen fit of the Guth position index. sigma = angle from
// the line of sight, tau = orientation of the source plane from vertical;
// radians in, sources below the sight line are mirrored upward.
double guth_position_index(double sigma, double tau);

GlareResult compute_dgp(double ev, std::vector<GlareSource> sources);

GlareLevel classify(double dgp);

struct SweepDate {
    int month = 0;
    int day = 0;
};

struct SweepRow {
    SweepDate date;
    double hour = 0.0;
    int view = 1; // 1..16
    double azimuth_deg = 0.0;
    double ev = 0.0;
    double dgp = 0.0;
    GlareLevel level = GlareLevel::imperceptible;
};

struct SweepOptions {
    std::vector<SweepDate> dates = {{3, 21}, {6, 21}, {9, 21}, {12, 21}};
    std::vector<double> hours = {8.5, 9.5, 10.5, 11.5, 12.5,
                                 13.5, 14.5, 15.5, 16.5};
    int view_count = 16;
    int fisheye_size = 64;
    SkyCondition condition = SkyCondition::clear;
    SourceDetection detection;
};

std::vector<SweepRow> dgp_sweep(const SceneModel& scene, const EpwFile& epw,
                                const Vec3& position, const SweepOptions& options,
                                const RenderParams& params);

// CSV with header date,hour,view,azimuth_deg,ev_lux,dgp,level and 4-decimal
// floats, ordered date -> hour -> view.
std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace panolum

#endif
