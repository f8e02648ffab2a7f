#ifndef RIS_SCENARIO_HPP
#define RIS_SCENARIO_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ris/csv.hpp"
#include "ris/fields.hpp"
#include "ris/link.hpp"
#include "ris/metasurface.hpp"
#include "ris/rays.hpp"
#include "ris/tracer.hpp"

namespace ris {

using nlohmann::json;

/// State-grid CSV of integer ids, one grid row per line.
inline void write_state_grid_csv(const StateGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    for (const auto& row : grid) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ",";
            out << row[c];
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline StateGrid read_state_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    StateGrid grid;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<int> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stoi(cell));
        grid.push_back(std::move(row));
    }
    return grid;
}

namespace cfg {

template <typename T>
T require(const json& j, const std::string& block, const std::string& key) {
    if (!j.contains(key))
        throw std::invalid_argument("config: missing field " + block + "." + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("config: invalid value for " + block + "." + key);
    }
}

template <typename T>
T get_or(const json& j, const std::string& block, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("config: invalid value for " + block + "." + key);
    }
}

inline Vec3 vec3(const json& j, const std::string& block, const std::string& key) {
    const auto v = require<std::vector<double>>(j, block, key);
    if (v.size() != 3)
        throw std::invalid_argument("config: " + block + "." + key + " needs 3 components");
    return {v[0], v[1], v[2]};
}

} // namespace cfg

struct ScenarioConfig {
    // design block
    std::size_t rows = 100;
    std::size_t cols = 100;
    double pitch_m = 0.5e-3;
    double f0_hz = 304e9;
    double theta_out_deg = 30.0;
    double theta_in_deg = 0.0;
    Codebook codebook = default_codebook();

    // excitation block
    std::vector<double> frequencies_hz{304e9};
    double incidence_deg = 0.0;

    // scene block
    Scene scene;
    int max_bounce_order = 1;
    bool has_scene = false;

    // link block
    double ptx_dbm = 0.0;
    double gtx_dbi = 0.0;
    double grx_dbi = 0.0;
    double link_sigma_dbsm = 15.6;
    std::vector<double> link_d1_m{5.0};
    std::vector<double> link_d2_m{5.0};

    // output block
    std::filesystem::path out_dir = "out";
    double angle_start_deg = -90.0;
    double angle_stop_deg = 90.0;
    double angle_step_deg = 0.05;
    std::vector<double> distances_m;

    RisDesign make_design() const {
        auto d = make_gradient_design(rows, cols, pitch_m, theta_out_deg, theta_in_deg,
                                      f0_hz, codebook);
        if (has_scene) {
            d.center_m = scene.ris.center_m;
            d.normal = scene.ris.normal;
            d.col_axis = scene.ris.col_axis;
            d.validate();
        }
        return d;
    }

    PlaneWave make_excitation(const RisDesign& design, double frequency_hz) const {
        const double t = deg2rad(incidence_deg);
        const Vec3 dir =
            (design.normal * std::cos(t) + design.col_axis * std::sin(t)) * -1.0;
        return PlaneWave{frequency_hz, dir, {1.0, 0.0}};
    }

    Scene make_scene() const {
        if (!has_scene)
            throw std::invalid_argument("config: scene block required for this command");
        Scene s = scene;
        s.ris = make_design();
        s.validate();
        return s;
    }
};

inline Codebook parse_codebook(const json& arr) {
    std::vector<UnitCellState> states;
    for (const auto& e : arr) {
        UnitCellState s;
        s.id = cfg::require<int>(e, "design.codebook[]", "id");
        s.phase_deg = cfg::require<double>(e, "design.codebook[]", "phase_deg");
        s.amplitude_db = cfg::get_or<double>(e, "design.codebook[]", "amplitude_db", -0.5);
        s.w_r_mm = cfg::get_or<double>(e, "design.codebook[]", "w_r_mm", 0.0);
        s.w_in_mm = cfg::get_or<double>(e, "design.codebook[]", "w_in_mm", 0.0);
        states.push_back(s);
    }
    return Codebook(std::move(states));
}

inline ScenarioConfig parse_scenario(const json& j) {
    ScenarioConfig c;

    if (j.contains("design")) {
        const auto& d = j.at("design");
        c.rows = cfg::require<std::size_t>(d, "design", "rows");
        c.cols = cfg::require<std::size_t>(d, "design", "cols");
        c.pitch_m = cfg::require<double>(d, "design", "pitch_m");
        c.f0_hz = cfg::require<double>(d, "design", "f0_hz");
        c.theta_out_deg = cfg::require<double>(d, "design", "theta_out_deg");
        c.theta_in_deg = cfg::get_or<double>(d, "design", "theta_in_deg", 0.0);
        if (d.contains("codebook")) c.codebook = parse_codebook(d.at("codebook"));
        else if (d.contains("codebook_amplitude_db"))
            c.codebook = default_codebook(d.at("codebook_amplitude_db").get<double>());
    }

    if (j.contains("excitation")) {
        const auto& e = j.at("excitation");
        c.frequencies_hz =
            cfg::require<std::vector<double>>(e, "excitation", "frequencies_hz");
        if (c.frequencies_hz.empty())
            throw std::invalid_argument("config: excitation.frequencies_hz must be non-empty");
        for (double f : c.frequencies_hz)
            if (f <= 0.0)
                throw std::invalid_argument("config: excitation.frequencies_hz must be positive");
        c.incidence_deg = cfg::get_or<double>(e, "excitation", "incidence_deg", 0.0);
    }

    if (j.contains("scene")) {
        const auto& s = j.at("scene");
        c.has_scene = true;
        c.scene.room.dimensions_m = cfg::vec3(s, "scene", "room_m");
        if (s.contains("wall_reflection")) {
            const auto& w = s.at("wall_reflection");
            const double mag = cfg::get_or<double>(w, "scene.wall_reflection", "magnitude", 0.3);
            const double ph =
                cfg::get_or<double>(w, "scene.wall_reflection", "phase_deg", 180.0);
            c.scene.room.wall_coefficients.fill(std::polar(mag, deg2rad(ph)));
        }
        if (s.contains("blockages")) {
            for (const auto& b : s.at("blockages")) {
                Box box;
                box.min_m = cfg::vec3(b, "scene.blockages[]", "min_m");
                box.max_m = cfg::vec3(b, "scene.blockages[]", "max_m");
                c.scene.room.blockages.push_back(box);
            }
        }
        c.scene.tx_m = cfg::vec3(s, "scene", "tx_m");
        c.scene.rx_m = cfg::vec3(s, "scene", "rx_m");
        c.scene.ris.center_m = cfg::vec3(s, "scene", "ris_center_m");
        c.scene.ris.normal = cfg::vec3(s, "scene", "ris_normal").normalized();
        c.scene.ris.col_axis = cfg::vec3(s, "scene", "ris_col_axis").normalized();
        c.scene.los_blocked = cfg::get_or<bool>(s, "scene", "los_blocked", false);
        const auto mode = cfg::get_or<std::string>(s, "scene", "mode", "full-pattern");
        if (mode == "full-pattern") c.scene.ris_mode = RisMode::full_pattern;
        else if (mode == "three-ray") c.scene.ris_mode = RisMode::three_ray;
        else throw std::invalid_argument("config: scene.mode must be full-pattern or three-ray");
        c.max_bounce_order = cfg::get_or<int>(s, "scene", "max_bounce_order", 1);
        c.scene.pattern_step_deg = cfg::get_or<double>(s, "scene", "pattern_step_deg", 0.05);
    }

    if (j.contains("link")) {
        const auto& l = j.at("link");
        c.ptx_dbm = cfg::get_or<double>(l, "link", "ptx_dbm", 0.0);
        c.gtx_dbi = cfg::get_or<double>(l, "link", "gtx_dbi", 0.0);
        c.grx_dbi = cfg::get_or<double>(l, "link", "grx_dbi", 0.0);
        c.link_sigma_dbsm = cfg::get_or<double>(l, "link", "sigma_dbsm", 15.6);
        c.link_d1_m = cfg::get_or<std::vector<double>>(l, "link", "d1_m", {5.0});
        c.link_d2_m = cfg::get_or<std::vector<double>>(l, "link", "d2_m", {5.0});
    }

    if (j.contains("output")) {
        const auto& o = j.at("output");
        c.out_dir = cfg::get_or<std::string>(o, "output", "directory", "out");
        c.angle_start_deg = cfg::get_or<double>(o, "output", "angle_start_deg", -90.0);
        c.angle_stop_deg = cfg::get_or<double>(o, "output", "angle_stop_deg", 90.0);
        c.angle_step_deg = cfg::get_or<double>(o, "output", "angle_step_deg", 0.05);
        c.distances_m = cfg::get_or<std::vector<double>>(o, "output", "distances_m", {});
    }

    return c;
}

/// Apply one `--set key=value` override; `key` is a dot path into the
/// config JSON, the value is parsed as JSON when possible.
inline void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must have the form key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw; // plain string
    }

    json* node = &j;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw std::invalid_argument("override key is empty");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
    (*node)[parts.back()] = value;
}

inline json load_scenario_json(const std::filesystem::path& path,
                               const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("config parse error in " + path.string() + ": " + e.what());
    }
    for (const auto& o : overrides) apply_override(j, o);
    return j;
}

namespace detail {

/// Frequency label used in output file names: 304e9 for 304 GHz.
inline std::string frequency_label(double f_hz) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%ge9", f_hz / 1e9);
    return buf;
}

struct PendingFile {
    std::filesystem::path path;
    std::string header;
    std::vector<std::vector<std::string>> rows;
};

/// Write all files only after every row has been computed, so a failure
/// mid-computation leaves no partial outputs.
inline std::vector<std::filesystem::path> flush(const std::vector<PendingFile>& files) {
    std::vector<std::filesystem::path> written;
    for (const auto& f : files) {
        if (!f.path.parent_path().empty())
            std::filesystem::create_directories(f.path.parent_path());
        CsvWriter w(f.path, f.header);
        for (const auto& row : f.rows) w.row(row);
        w.close();
        written.push_back(f.path);
    }
    return written;
}

} // namespace detail

inline std::vector<std::filesystem::path> run_rcs(const ScenarioConfig& c) {
    const auto design = c.make_design();
    const auto grid = uniform_angle_grid(c.angle_start_deg, c.angle_stop_deg, c.angle_step_deg);

    std::vector<detail::PendingFile> files;
    detail::PendingFile rays_file{c.out_dir / "rays.csv",
                                  "frequency_hz,tag,theta_deg,sigma_dbsm,phase_deg",
                                  {}};
    for (double f : c.frequencies_hz) {
        const auto pattern = rcs_pattern(design, c.make_excitation(design, f), grid);
        detail::PendingFile pf{c.out_dir / ("rcs_" + detail::frequency_label(f) + ".csv"),
                               "theta_deg,rcs_dbsm,phase_deg",
                               {}};
        for (std::size_t i = 0; i < pattern.size(); ++i)
            pf.rows.push_back({csv_number(pattern.angle_deg(i)),
                               csv_number(pattern.amplitude_dbsm(i)),
                               csv_number(pattern.phase_deg(i))});
        files.push_back(std::move(pf));

        RayExtractionOptions opts;
        opts.theta_out_deg = design.theta_out_deg;
        const auto model = extract_dominant_rays(pattern, opts, f);
        for (const auto& ray : model.rays)
            rays_file.rows.push_back({csv_number(f), to_string(ray.tag),
                                      csv_number(ray.theta_deg), csv_number(ray.sigma_dbsm),
                                      csv_number(ray.phase_deg)});
    }
    files.push_back(std::move(rays_file));
    return detail::flush(files);
}

inline std::vector<std::filesystem::path> run_nearfar(const ScenarioConfig& c) {
    const auto design = c.make_design();
    std::vector<double> distances = c.distances_m;
    if (distances.empty())
        for (int i = 0; i < 50; ++i) distances.push_back(2.0 + 8.0 * i / 49.0);

    const double f = c.frequencies_hz.front();
    const auto excitation = c.make_excitation(design, f);
    const double t = deg2rad(design.theta_out_deg);
    const Vec3 beam = design.col_axis * std::sin(t) + design.normal * std::cos(t);
    const auto deviations = near_far_deviation(design, excitation, beam, distances);

    detail::PendingFile pf{c.out_dir / "nearfar.csv", "distance_m,deviation_db", {}};
    for (std::size_t i = 0; i < distances.size(); ++i)
        pf.rows.push_back({csv_number(distances[i]), csv_number(deviations[i])});
    return detail::flush({pf});
}

inline std::vector<std::filesystem::path> run_squint(const ScenarioConfig& c) {
    detail::PendingFile pf{c.out_dir / "squint.csv",
                           "frequency_hz,theta_deg,delta_theta_deg", {}};
    for (double f : c.frequencies_hz) {
        const auto s = beam_squint(c.theta_out_deg, c.f0_hz, f);
        pf.rows.push_back({csv_number(f), csv_number(s.theta_deg), csv_number(s.delta_deg)});
    }
    return detail::flush({pf});
}

inline std::vector<std::filesystem::path> run_link(const ScenarioConfig& c) {
    detail::PendingFile pf{c.out_dir / "link.csv",
                           "d1_m,d2_m,frequency_hz,sigma_dbsm,path_gain_db,prx_dbm", {}};
    for (double f : c.frequencies_hz)
        for (double d1 : c.link_d1_m)
            for (double d2 : c.link_d2_m) {
                LinkBudgetInput in{c.ptx_dbm, c.gtx_dbi, c.grx_dbi, c.link_sigma_dbsm,
                                   f, d1, d2};
                const auto r = bistatic_received_power(in);
                pf.rows.push_back({csv_number(d1), csv_number(d2), csv_number(f),
                                   csv_number(c.link_sigma_dbsm),
                                   csv_number(r.path_gain_db), csv_number(r.prx_dbm)});
            }
    return detail::flush({pf});
}

inline std::vector<std::filesystem::path> run_trace(const ScenarioConfig& c) {
    const auto scene = c.make_scene();
    std::vector<detail::PendingFile> files;
    detail::PendingFile cir_file{c.out_dir / "cir.csv",
                                 "frequency_hz,delay_ns,gain_db,phase_deg", {}};
    for (double f : c.frequencies_hz) {
        const auto lookup = build_ris_lookup(scene, f);
        const auto paths = trace_paths(scene, c.max_bounce_order, f, &lookup);
        detail::PendingFile pf{c.out_dir / ("paths_" + detail::frequency_label(f) + ".csv"),
                               "kind,order_or_tag,length_m,delay_ns,gain_db,phase_deg",
                               {}};
        for (const auto& p : paths) {
            const std::string order_or_tag = p.kind == PathKind::wall_bounce
                                                 ? std::to_string(p.bounce_order)
                                                 : (p.kind == PathKind::ris
                                                        ? to_string(p.ray_tag)
                                                        : "0");
            pf.rows.push_back({to_string(p.kind), order_or_tag, csv_number(p.length_m),
                               csv_number(p.delay_s * 1e9),
                               csv_number(20.0 * std::log10(std::abs(p.gain))),
                               csv_number(rad2deg(std::arg(p.gain)))});
        }
        files.push_back(std::move(pf));

        const auto cir = channel_impulse_response(paths, f);
        for (const auto& [delay, gain] : cir.taps)
            cir_file.rows.push_back({csv_number(f), csv_number(delay * 1e9),
                                     csv_number(20.0 * std::log10(std::abs(gain))),
                                     csv_number(rad2deg(std::arg(gain)))});
    }
    files.push_back(std::move(cir_file));
    return detail::flush(files);
}

inline std::vector<std::filesystem::path> run_make_figures(const ScenarioConfig& c) {
    std::vector<std::filesystem::path> written;
    for (auto&& batch : {run_rcs(c), run_nearfar(c), run_squint(c), run_link(c), run_trace(c)})
        written.insert(written.end(), batch.begin(), batch.end());
    return written;
}

} // namespace ris

#endif
