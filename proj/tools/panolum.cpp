// panolum: panoramic daylighting toolkit.
//
// Subcommands cover the full pipeline: HDR inspection, calibrated luminance
// maps, false-color and error-map figures, fisheye extraction, room layout
// reconstruction from corner annotations, scene export, sky-model rendering,
// and DGP glare evaluation/sweeps.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "panolum/glare.hpp"
#include "panolum/layout.hpp"
#include "panolum/photometry.hpp"
#include "panolum/png_io.hpp"
#include "panolum/projection.hpp"
#include "panolum/render.hpp"
#include "panolum/rgbe.hpp"
#include "panolum/sky.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

using nlohmann::json;

// JSON config file support: a flat or nested object whose keys mirror the
// option names, e.g. {"render": {"spp": 64}}.
class ConfigJSON : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool,
                          std::string) const override {
        json j;
        for (const CLI::Option* opt : app->get_options({})) {
            if (!opt->get_lnames().empty() && opt->get_configurable()) {
                std::string name = opt->get_lnames()[0];
                if (opt->get_type_size() != 0 && opt->count() == 1)
                    j[name] = opt->results().at(0);
                else if (opt->count() > 1)
                    j[name] = opt->results();
                else if (default_also && !opt->get_default_str().empty())
                    j[name] = opt->get_default_str();
            }
        }
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        input >> j;
        return from_json(j, {});
    }

private:
    std::vector<CLI::ConfigItem>
    from_json(const json& j, const std::vector<std::string>& prefix) const {
        std::vector<CLI::ConfigItem> results;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it->is_object()) {
                auto sub = prefix;
                sub.push_back(it.key());
                auto nested = from_json(*it, sub);
                results.insert(results.end(), nested.begin(), nested.end());
                continue;
            }
            CLI::ConfigItem item;
            item.parents = prefix;
            item.name = it.key();
            if (it->is_boolean())
                item.inputs = {*it ? "true" : "false"};
            else if (it->is_number())
                item.inputs = {it->dump()};
            else if (it->is_string())
                item.inputs = {it->get<std::string>()};
            else if (it->is_array())
                for (const auto& v : *it)
                    item.inputs.push_back(v.is_string() ? v.get<std::string>()
                                                        : v.dump());
            results.push_back(item);
        }
        return results;
    }
};

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        panolum::fail(panolum::Errc::io_failure, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        panolum::fail(panolum::Errc::io_failure, "cannot open " + path + " for writing");
    out << text;
    if (!out.flush())
        panolum::fail(panolum::Errc::io_failure, "write failed: " + path);
}

std::pair<int, int> parse_date(const std::string& text) {
    int month = 0, day = 0;
    char dash = 0;
    std::istringstream in(text);
    if (!(in >> month >> dash >> day) || dash != '-' || month < 1 || month > 12 ||
        day < 1 || day > 31)
        throw CLI::ValidationError("--dates", "expected MM-DD, got '" + text + "'");
    return {month, day};
}

panolum::Vec3 parse_vec3(const std::string& text) {
    panolum::Vec3 v;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> v.x >> c1 >> v.y >> c2 >> v.z) || c1 != ',' || c2 != ',')
        throw CLI::ValidationError("--vp", "expected x,y,z, got '" + text + "'");
    return v;
}

panolum::SkyCondition parse_condition(const std::string& name) {
    if (name == "clear")
        return panolum::SkyCondition::clear;
    if (name == "overcast")
        return panolum::SkyCondition::overcast;
    if (name == "uniform")
        return panolum::SkyCondition::uniform;
    throw CLI::ValidationError("--sky", "expected clear|overcast|uniform");
}

panolum::HdrImage load_equirect(const std::string& path) {
    panolum::HdrImage img = panolum::read_hdr_file(path);
    if (img.width != 2 * img.height)
        panolum::fail(panolum::Errc::bad_dimensions,
                      path + ": expected an equirectangular panorama (W = 2H)");
    img.projection = panolum::Projection::equirectangular;
    return img;
}

panolum::LuminanceMap load_fisheye_luminance(const std::string& path, double k) {
    panolum::HdrImage img = panolum::read_hdr_file(path);
    if (img.width != img.height)
        panolum::fail(panolum::Errc::bad_projection,
                      path + ": expected a square fisheye image");
    img.projection = panolum::Projection::fisheye180;
    return panolum::to_luminance_map(img, {k});
}

panolum::HdrImage luminance_to_hdr(const panolum::LuminanceMap& map) {
    panolum::HdrImage img;
    img.width = map.width;
    img.height = map.height;
    img.projection = map.projection;
    img.pixels.resize(map.values.size() * 3);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        img.pixels[i * 3] = map.values[i];
        img.pixels[i * 3 + 1] = map.values[i];
        img.pixels[i * 3 + 2] = map.values[i];
    }
    return img;
}

json glare_result_json(const panolum::GlareResult& res) {
    json j;
    j["dgp"] = res.dgp;
    j["ev_lux"] = res.ev;
    j["level"] = panolum::glare_level_name(res.level);
    j["sources"] = json::array();
    for (const auto& s : res.sources) {
        j["sources"].push_back({{"luminance_cdm2", s.mean_luminance},
                                {"solid_angle_sr", s.solid_angle},
                                {"position_index", s.position_index},
                                {"sigma_deg", s.sigma * 180.0 / kPi},
                                {"beta_deg", s.beta * 180.0 / kPi}});
    }
    return j;
}

struct SharedRenderFlags {
    int spp = 100;
    int bounces = 8;
    double limit_weight = 0.01;
    std::uint64_t seed = 0;
    int threads = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--spp", spp, "samples per pixel")->check(CLI::PositiveNumber);
        cmd->add_option("--ab", bounces, "maximum diffuse bounces")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--lw", limit_weight, "Russian-roulette weight threshold");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--threads", threads,
                        "worker threads (default: PANOLUM_THREADS or all cores)");
    }

    panolum::RenderParams params() const {
        panolum::RenderParams p;
        p.samples_per_pixel = spp;
        p.max_bounces = bounces;
        p.limit_weight = limit_weight;
        p.seed = seed;
        p.threads = threads;
        return p;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"panolum: panoramic daylighting toolkit"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<ConfigJSON>());
    app.set_config("--config", "", "JSON config file supplying any flag");

    // hdr-info -----------------------------------------------------------
    auto* info = app.add_subcommand("hdr-info", "print header and pixel statistics");
    std::string info_in;
    double info_k = 1.0;
    info->add_option("input", info_in, "input .hdr")->required();
    info->add_option("-k,--calibration", info_k, "calibration factor");

    // luminance ----------------------------------------------------------
    auto* lum = app.add_subcommand("luminance",
                                   "calibrated luminance map as equal-channel .hdr");
    std::string lum_in, lum_out;
    double lum_k = 1.0;
    lum->add_option("input", lum_in, "input .hdr")->required();
    lum->add_option("-o,--output", lum_out, "output .hdr")->required();
    lum->add_option("-k,--calibration", lum_k, "calibration factor");

    // falsecolor ---------------------------------------------------------
    auto* fc = app.add_subcommand("falsecolor", "false-color luminance figure");
    std::string fc_in, fc_out;
    double fc_k = 1.0, fc_min = 0.0, fc_max = 1000.0;
    bool fc_log = false;
    fc->add_option("input", fc_in, "input .hdr")->required();
    fc->add_option("-o,--output", fc_out, "output .png")->required();
    fc->add_option("-k,--calibration", fc_k, "calibration factor");
    fc->add_option("--min", fc_min, "ramp start, cd/m^2");
    fc->add_option("--max", fc_max, "ramp end, cd/m^2");
    fc->add_flag("--log", fc_log, "logarithmic ramp");

    // fisheye ------------------------------------------------------------
    auto* fe = app.add_subcommand("fisheye",
                                  "extract fisheye views from a panorama");
    std::string fe_in, fe_prefix = "fisheye";
    double fe_increment = 45.0;
    int fe_size = 512;
    fe->add_option("input", fe_in, "input panorama .hdr")->required();
    fe->add_option("-o,--output-prefix", fe_prefix, "output file prefix");
    fe->add_option("--increment", fe_increment, "azimuth increment, degrees")
        ->check(CLI::PositiveNumber);
    fe->add_option("--size", fe_size, "output square size, pixels")
        ->check(CLI::PositiveNumber);

    // errmap --------------------------------------------------------------
    auto* em = app.add_subcommand("errmap", "signed luminance error map A - B");
    std::string em_a, em_b, em_out, em_stats;
    double em_clip = 3000.0, em_ka = 1.0, em_kb = 1.0;
    em->add_option("a", em_a, "first .hdr (A)")->required();
    em->add_option("b", em_b, "second .hdr (B)")->required();
    em->add_option("-o,--output", em_out, "output .png");
    em->add_option("--stats", em_stats, "stats JSON path (default stdout)");
    em->add_option("--clip", em_clip, "display clip, cd/m^2");
    em->add_option("--ka", em_ka, "calibration for A");
    em->add_option("--kb", em_kb, "calibration for B");

    // layout ---------------------------------------------------------------
    auto* lay = app.add_subcommand("layout",
                                   "reconstruct a scene from corner annotations");
    std::string lay_in, lay_out;
    double lay_camera = 0.0; // 0: use the value in the corner file
    double lay_wall = 0.5, lay_ceiling = 0.7, lay_floor = 0.2, lay_glass = 0.88;
    double lay_north = 0.0;
    bool lay_use_glass = false;
    lay->add_option("input", lay_in, "corner annotation JSON")->required();
    lay->add_option("-o,--output", lay_out, "output scene JSON")->required();
    lay->add_option("--camera-height", lay_camera, "camera height, meters");
    lay->add_option("--wall-reflectance", lay_wall, "wall reflectance");
    lay->add_option("--ceiling-reflectance", lay_ceiling, "ceiling reflectance");
    lay->add_option("--floor-reflectance", lay_floor, "floor reflectance");
    lay->add_flag("--glass", lay_use_glass, "glaze windows instead of leaving them open");
    lay->add_option("--glass-transmittance", lay_glass, "glazing transmittance");
    lay->add_option("--north", lay_north,
                    "compass heading of the room +z axis, degrees");

    // scene -----------------------------------------------------------------
    auto* sc = app.add_subcommand("scene", "export scene geometry");
    std::string sc_in, sc_rad, sc_obj;
    bool sc_tri = false;
    sc->add_option("input", sc_in, "scene JSON")->required();
    sc->add_option("--rad", sc_rad, "write Radiance scene text");
    sc->add_option("--obj", sc_obj, "write OBJ geometry");
    sc->add_flag("--triangulate", sc_tri, "triangulate OBJ faces");

    // render ------------------------------------------------------------------
    auto* rd = app.add_subcommand("render", "render a luminance map under a sky");
    std::string rd_scene, rd_epw, rd_out, rd_date, rd_mode = "panorama";
    std::string rd_sky = "clear", rd_vp;
    double rd_hour = 12.5, rd_view_az = 0.0;
    int rd_size = 256;
    SharedRenderFlags rd_flags;
    rd->add_option("scene", rd_scene, "scene JSON")->required();
    rd->add_option("weather", rd_epw, "EPW weather file")->required();
    rd->add_option("-o,--output", rd_out, "output .hdr")->required();
    rd->add_option("--date", rd_date, "MM-DD")->required();
    rd->add_option("--hour", rd_hour, "local decimal hour");
    rd->add_option("--sky", rd_sky, "clear|overcast");
    rd->add_option("--mode", rd_mode, "panorama|fisheye");
    rd->add_option("--view-az", rd_view_az, "fisheye view azimuth, degrees");
    rd->add_option("--size", rd_size,
                   "panorama width or fisheye diameter, pixels");
    rd->add_option("--vp", rd_vp, "viewpoint x,y,z (default camera position)");
    rd_flags.attach(rd);

    // dgp -------------------------------------------------------------------
    auto* dg = app.add_subcommand("dgp", "daylight glare probability of a fisheye map");
    std::string dg_in, dg_out;
    double dg_k = 1.0, dg_mult = 5.0, dg_abs = 0.0;
    dg->add_option("input", dg_in, "fisheye luminance .hdr")->required();
    dg->add_option("-o,--output", dg_out, "output JSON (default stdout)");
    dg->add_option("-k,--calibration", dg_k, "calibration factor");
    dg->add_option("--threshold-mult", dg_mult, "source threshold: multiple of mean");
    dg->add_option("--threshold-abs", dg_abs,
                   "absolute source threshold, cd/m^2 (overrides --threshold-mult)");

    // sweep --------------------------------------------------------------------
    auto* sw = app.add_subcommand("sweep", "hourly DGP table over dates and views");
    std::string sw_scene, sw_epw, sw_out, sw_sky = "clear", sw_vp;
    std::vector<std::string> sw_dates = {"03-21", "06-21", "09-21", "12-21"};
    std::vector<double> sw_hours = {8.5, 9.5, 10.5, 11.5, 12.5, 13.5, 14.5, 15.5, 16.5};
    int sw_size = 64, sw_views = 16;
    double sw_mult = 5.0, sw_abs = 0.0;
    SharedRenderFlags sw_flags;
    sw->add_option("scene", sw_scene, "scene JSON")->required();
    sw->add_option("weather", sw_epw, "EPW weather file")->required();
    sw->add_option("-o,--output", sw_out, "output CSV (default stdout)");
    sw->add_option("--dates", sw_dates, "comma-separated MM-DD list")->delimiter(',');
    sw->add_option("--hours", sw_hours, "comma-separated decimal hours")->delimiter(',');
    sw->add_option("--sky", sw_sky, "clear|overcast");
    sw->add_option("--size", sw_size, "fisheye diameter, pixels");
    sw->add_option("--views", sw_views, "view divisions over 360 degrees");
    sw->add_option("--vp", sw_vp, "viewpoint x,y,z (default camera position)");
    sw->add_option("--threshold-mult", sw_mult, "source threshold: multiple of mean");
    sw->add_option("--threshold-abs", sw_abs, "absolute source threshold, cd/m^2");
    sw_flags.attach(sw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // exit 0 for --help, 1 for any usage error
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (info->parsed()) {
        panolum::HdrImage img = panolum::read_hdr_file(info_in);
        panolum::LuminanceMap map = panolum::to_luminance_map(img, {info_k});
        double lo = 1e300, hi = -1e300, sum = 0.0;
        for (float v : map.values) {
            lo = std::min(lo, double(v));
            hi = std::max(hi, double(v));
            sum += v;
        }
        std::cout << "size: " << img.width << " x " << img.height << "\n"
                  << "exposure: " << img.exposure << "\n"
                  << "pixels: " << img.pixel_count() << "\n";
        for (const auto& line : img.header_lines)
            std::cout << "header: " << line << "\n";
        std::cout << "luminance min/mean/max (k=" << info_k << "): " << lo << " / "
                  << sum / double(map.values.size()) << " / " << hi << "\n";
    } else if (lum->parsed()) {
        panolum::HdrImage img = panolum::read_hdr_file(lum_in);
        panolum::LuminanceMap map = panolum::to_luminance_map(img, {lum_k});
        panolum::write_hdr_file(luminance_to_hdr(map), lum_out);
    } else if (fc->parsed()) {
        panolum::HdrImage img = panolum::read_hdr_file(fc_in);
        panolum::LuminanceMap map = panolum::to_luminance_map(img, {fc_k});
        panolum::FalseColorOptions opts;
        opts.lo = fc_min;
        opts.hi = fc_max;
        opts.scale = fc_log ? panolum::FalseColorScale::log10
                            : panolum::FalseColorScale::linear;
        panolum::write_raster_png(panolum::false_color_with_legend(map, opts), fc_out);
    } else if (fe->parsed()) {
        panolum::HdrImage pano = load_equirect(fe_in);
        int count = static_cast<int>(std::lround(360.0 / fe_increment));
        for (int i = 0; i < count; ++i) {
            double az = i * fe_increment * kPi / 180.0;
            panolum::HdrImage view = panolum::extract_fisheye(pano, az, fe_size);
            char name[512];
            std::snprintf(name, sizeof(name), "%s_%03d.hdr", fe_prefix.c_str(), i);
            panolum::write_hdr_file(view, name);
        }
        std::cout << "wrote " << count << " fisheye views\n";
    } else if (em->parsed()) {
        panolum::LuminanceMap a =
            panolum::to_luminance_map(panolum::read_hdr_file(em_a), {em_ka});
        panolum::LuminanceMap b =
            panolum::to_luminance_map(panolum::read_hdr_file(em_b), {em_kb});
        panolum::ErrorMap diff = panolum::error_map(a, b, em_clip);
        if (!em_out.empty())
            panolum::write_raster_png(panolum::error_map_raster(diff), em_out);
        json stats{{"mae", diff.stats.mae},
                   {"rmse", diff.stats.rmse},
                   {"bias", diff.stats.bias},
                   {"n_pixels", diff.stats.n_pixels},
                   {"clip", diff.clip}};
        if (em_stats.empty())
            std::cout << stats.dump(2) << "\n";
        else
            write_text_file(em_stats, stats.dump(2) + "\n");
    } else if (lay->parsed()) {
        panolum::CornerDoc doc = panolum::parse_corner_json(read_text_file(lay_in));
        double h_c = lay_camera > 0.0 ? lay_camera : doc.camera_height_m;
        panolum::SceneSpec spec;
        spec.room = panolum::reconstruct_room(doc.corners, h_c);
        for (const auto& w : doc.windows)
            spec.windows.push_back(panolum::project_window(
                w.quad, w.wall, spec.room, doc.corners.image_width,
                doc.corners.image_height));
        spec.materials.wall_reflectance = lay_wall;
        spec.materials.ceiling_reflectance = lay_ceiling;
        spec.materials.floor_reflectance = lay_floor;
        spec.materials.window_open = !lay_use_glass;
        spec.materials.glass_transmittance = lay_glass;
        spec.north_offset_deg = lay_north;
        write_text_file(lay_out, panolum::scene_spec_to_json(spec));
    } else if (sc->parsed()) {
        panolum::SceneSpec spec = panolum::scene_spec_from_json(read_text_file(sc_in));
        panolum::SceneModel scene = spec.build();
        if (sc_rad.empty() && sc_obj.empty())
            throw CLI::ValidationError("scene", "need --rad and/or --obj");
        if (!sc_rad.empty())
            write_text_file(sc_rad, panolum::export_rad(scene));
        if (!sc_obj.empty())
            write_text_file(sc_obj, panolum::export_obj(scene, sc_tri));
    } else if (rd->parsed()) {
        panolum::SceneSpec spec =
            panolum::scene_spec_from_json(read_text_file(rd_scene));
        panolum::SceneModel scene = spec.build();
        panolum::EpwFile epw = panolum::parse_epw_file(rd_epw);
        auto [month, day] = parse_date(rd_date);
        panolum::SkyModel sky = panolum::sky_from_epw(epw, month, day, rd_hour,
                                                      parse_condition(rd_sky));
        panolum::Viewpoint vp;
        vp.position = rd_vp.empty()
                          ? panolum::Vec3{0.0, spec.room.camera_height, 0.0}
                          : parse_vec3(rd_vp);
        vp.view_azimuth = rd_view_az * kPi / 180.0;
        panolum::LuminanceMap map;
        if (rd_mode == "panorama")
            map = panolum::render_panorama(scene, sky, vp, rd_size, rd_flags.params());
        else if (rd_mode == "fisheye")
            map = panolum::render_fisheye(scene, sky, vp, rd_size, rd_flags.params());
        else
            throw CLI::ValidationError("--mode", "expected panorama|fisheye");
        panolum::write_hdr_file(luminance_to_hdr(map), rd_out);
    } else if (dg->parsed()) {
        panolum::LuminanceMap map = load_fisheye_luminance(dg_in, dg_k);
        panolum::SourceDetection policy;
        policy.mean_multiplier = dg_mult;
        if (dg_abs > 0.0)
            policy.absolute_cdm2 = dg_abs;
        double ev = panolum::vertical_illuminance(map);
        panolum::GlareResult res =
            panolum::compute_dgp(ev, panolum::detect_sources(map, policy));
        std::string text = glare_result_json(res).dump(2) + "\n";
        if (dg_out.empty())
            std::cout << text;
        else
            write_text_file(dg_out, text);
    } else if (sw->parsed()) {
        panolum::SceneSpec spec =
            panolum::scene_spec_from_json(read_text_file(sw_scene));
        panolum::SceneModel scene = spec.build();
        panolum::EpwFile epw = panolum::parse_epw_file(sw_epw);
        panolum::SweepOptions options;
        options.dates.clear();
        for (const auto& d : sw_dates) {
            auto [month, day] = parse_date(d);
            options.dates.push_back({month, day});
        }
        options.hours = sw_hours;
        options.view_count = sw_views;
        options.fisheye_size = sw_size;
        options.condition = parse_condition(sw_sky);
        options.detection.mean_multiplier = sw_mult;
        if (sw_abs > 0.0)
            options.detection.absolute_cdm2 = sw_abs;
        panolum::Vec3 pos = sw_vp.empty()
                                ? panolum::Vec3{0.0, spec.room.camera_height, 0.0}
                                : parse_vec3(sw_vp);
        auto rows = panolum::dgp_sweep(scene, epw, pos, options, sw_flags.params());
        std::string csv = panolum::sweep_csv(rows);
        if (sw_out.empty())
            std::cout << csv;
        else
            write_text_file(sw_out, csv);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const panolum::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
