#ifndef RIS_RAYS_HPP
#define RIS_RAYS_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ris/fields.hpp"
#include "ris/geometry.hpp"
#include "ris/metasurface.hpp"

namespace ris {

enum class RayTag { main, specular, spurious, other };

inline std::string to_string(RayTag tag) {
    switch (tag) {
        case RayTag::main: return "main";
        case RayTag::specular: return "specular";
        case RayTag::spurious: return "spurious";
        case RayTag::other: return "other";
    }
    return "other";
}

struct Ray {
    double theta_deg = 0.0;
    double sigma_dbsm = 0.0;
    double phase_deg = 0.0;
    RayTag tag = RayTag::other;
};

struct RayModel {
    double frequency_hz = 0.0;
    std::vector<Ray> rays; // sorted by sigma descending

    const Ray* find(RayTag tag) const {
        for (const auto& r : rays)
            if (r.tag == tag) return &r;
        return nullptr;
    }
};

struct RayExtractionOptions {
    std::size_t max_rays = 3;
    double min_prominence_db = 6.0;
    /// Design steering angle; when set, rays are picked from the 2 deg
    /// cones around +theta_out, 0 and -theta_out and tagged accordingly.
    std::optional<double> theta_out_deg;
    double tag_window_deg = 2.0;
    bool refine_subgrid = true;
};

namespace detail {

struct GridPeak {
    std::size_t index;
    double prominence_db;
};

inline std::vector<double> pattern_db(const RcsPattern& p) {
    std::vector<double> db(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) db[i] = p.amplitude_dbsm(i);
    return db;
}

/// Local maxima with prominence measured by walking to the nearest higher
/// sample on each side. The global maximum gets infinite prominence.
inline std::vector<GridPeak> local_maxima(const std::vector<double>& db) {
    std::vector<GridPeak> peaks;
    const std::size_t n = db.size();
    const std::size_t global = static_cast<std::size_t>(
        std::max_element(db.begin(), db.end()) - db.begin());
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(db[i] > db[i - 1] && db[i] >= db[i + 1])) continue;
        if (i == global) {
            peaks.push_back({i, 1e300});
            continue;
        }
        double lo = db[i];
        for (std::size_t j = i; j-- > 0;) {
            if (db[j] > db[i]) break;
            lo = std::min(lo, db[j]);
        }
        double side_left = db[i] - lo;
        lo = db[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (db[j] > db[i]) break;
            lo = std::min(lo, db[j]);
        }
        peaks.push_back({i, std::min(side_left, db[i] - lo)});
    }
    return peaks;
}

/// Quadratic fit through a grid peak and its neighbors (dB domain).
inline Ray refine_peak(const RcsPattern& p, std::size_t i, bool refine) {
    Ray ray;
    ray.theta_deg = p.angle_deg(i);
    ray.sigma_dbsm = p.amplitude_dbsm(i);
    ray.phase_deg = p.phase_deg(i);
    if (refine && i > 0 && i + 1 < p.size()) {
        const double ym = p.amplitude_dbsm(i - 1);
        const double y0 = p.amplitude_dbsm(i);
        const double yp = p.amplitude_dbsm(i + 1);
        const double denom = ym - 2.0 * y0 + yp;
        if (denom < 0.0) {
            const double shift = 0.5 * (ym - yp) / denom;
            if (std::fabs(shift) <= 0.5) {
                const double step = p.angle_deg(i + 1) - p.angle_deg(i);
                ray.theta_deg = p.angle_deg(i) + shift * step;
                ray.sigma_dbsm = y0 - 0.25 * (ym - yp) * shift;
                ray.phase_deg = rad2deg(std::arg(p.interpolate(ray.theta_deg)));
            }
        }
    }
    return ray;
}

} // namespace detail

/// Dominant-ray extraction. Without a design context, returns the
/// strongest prominent local maxima tagged `other`. With one, the rays
/// come from the cones around the three reflection directions of the
/// design and carry the main/specular/spurious tags.
inline RayModel extract_dominant_rays(const RcsPattern& pattern,
                                      const RayExtractionOptions& options = {},
                                      double frequency_hz = 0.0) {
    if (pattern.size() == 0)
        throw std::invalid_argument("cannot extract rays from an empty pattern");
    if (options.max_rays == 0)
        throw std::invalid_argument("max_rays must be at least 1");

    const auto db = detail::pattern_db(pattern);
    auto peaks = detail::local_maxima(db);
    std::sort(peaks.begin(), peaks.end(), [&](const auto& a, const auto& b) {
        return db[a.index] > db[b.index];
    });

    RayModel model;
    model.frequency_hz = frequency_hz;
    std::vector<std::size_t> used;

    if (options.theta_out_deg) {
        const double theta_out = *options.theta_out_deg;
        std::vector<std::pair<double, RayTag>> targets{{theta_out, RayTag::main},
                                                       {0.0, RayTag::specular},
                                                       {-theta_out, RayTag::spurious}};
        if (theta_out == 0.0) // mirror: the three directions coincide
            targets = {{0.0, RayTag::specular}};
        for (const auto& [angle, tag] : targets) {
            if (model.rays.size() >= options.max_rays) break;
            const detail::GridPeak* best = nullptr;
            for (const auto& pk : peaks) {
                if (std::fabs(pattern.angle_deg(pk.index) - angle) > options.tag_window_deg)
                    continue;
                if (std::find(used.begin(), used.end(), pk.index) != used.end()) continue;
                if (!best || db[pk.index] > db[best->index]) best = &pk;
            }
            if (!best) continue;
            used.push_back(best->index);
            Ray ray = detail::refine_peak(pattern, best->index, options.refine_subgrid);
            ray.tag = tag;
            model.rays.push_back(ray);
        }
    }

    for (const auto& pk : peaks) {
        if (model.rays.size() >= options.max_rays) break;
        if (pk.prominence_db < options.min_prominence_db) continue;
        if (std::find(used.begin(), used.end(), pk.index) != used.end()) continue;
        used.push_back(pk.index);
        Ray ray = detail::refine_peak(pattern, pk.index, options.refine_subgrid);
        ray.tag = RayTag::other;
        model.rays.push_back(ray);
    }

    std::sort(model.rays.begin(), model.rays.end(),
              [](const Ray& a, const Ray& b) { return a.sigma_dbsm > b.sigma_dbsm; });
    return model;
}

struct SquintResult {
    double theta_deg = 0.0; // beam direction at the operating frequency
    double delta_deg = 0.0; // theta(f) - theta_out
};

/// Phase-gradient dispersion theta(f) = arcsin((f0/f) * sin(theta_out)).
inline SquintResult beam_squint(double theta_out_deg, double f0_hz, double f_hz) {
    if (f0_hz <= 0.0 || f_hz <= 0.0)
        throw std::invalid_argument("frequencies must be positive");
    const double s = (f0_hz / f_hz) * std::sin(deg2rad(theta_out_deg));
    if (s < -1.0 || s > 1.0)
        throw std::domain_error("beam is evanescent at this frequency");
    const double theta = rad2deg(std::asin(s));
    return {theta, theta - theta_out_deg};
}

struct BandSweepOptions {
    double angle_start_deg = -90.0;
    double angle_stop_deg = 90.0;
    double angle_step_deg = 0.05;
    RayExtractionOptions extraction;
};

/// Recompute the RCS pattern and extract rays at each frequency, under
/// normal incidence. The steering context is taken from the design.
inline std::vector<RayModel> ray_model_over_band(const RisDesign& design,
                                                 const std::vector<double>& frequencies_hz,
                                                 BandSweepOptions options = {}) {
    if (!options.extraction.theta_out_deg)
        options.extraction.theta_out_deg = design.theta_out_deg;
    const auto grid = uniform_angle_grid(options.angle_start_deg, options.angle_stop_deg,
                                         options.angle_step_deg);
    std::vector<RayModel> models;
    models.reserve(frequencies_hz.size());
    for (double f : frequencies_hz) {
        if (f <= 0.0) throw std::invalid_argument("frequencies must be positive");
        const auto pattern = rcs_pattern(design, normal_incidence(design, f), grid);
        models.push_back(extract_dominant_rays(pattern, options.extraction, f));
    }
    return models;
}

} // namespace ris

#endif
