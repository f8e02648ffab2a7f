#ifndef RIS_TRACER_HPP
#define RIS_TRACER_HPP

#include <algorithm>
#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ris/fields.hpp"
#include "ris/geometry.hpp"
#include "ris/link.hpp"
#include "ris/metasurface.hpp"
#include "ris/rays.hpp"

namespace ris {

/// Axis-aligned blockage box; occludes any segment passing through it.
struct Box {
    Vec3 min_m;
    Vec3 max_m;

    bool intersects_segment(const Vec3& a, const Vec3& b) const {
        // slab test on the parametric segment a + t*(b-a), t in [0,1]
        double t0 = 0.0, t1 = 1.0;
        const std::array<double, 3> o{a.x, a.y, a.z};
        const std::array<double, 3> d{b.x - a.x, b.y - a.y, b.z - a.z};
        const std::array<double, 3> lo{min_m.x, min_m.y, min_m.z};
        const std::array<double, 3> hi{max_m.x, max_m.y, max_m.z};
        for (int i = 0; i < 3; ++i) {
            if (std::fabs(d[i]) < 1e-15) {
                if (o[i] < lo[i] || o[i] > hi[i]) return false;
                continue;
            }
            double ta = (lo[i] - o[i]) / d[i];
            double tb = (hi[i] - o[i]) / d[i];
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1) return false;
        }
        return true;
    }
};

/// Shoebox room spanning [0,Lx]x[0,Ly]x[0,Lz]. Wall order: x=0, x=Lx,
/// y=0, y=Ly, z=0, z=Lz.
struct Room {
    Vec3 dimensions_m{10.0, 10.0, 3.0};
    std::array<Complex, 6> wall_coefficients{
        Complex{-0.3, 0.0}, Complex{-0.3, 0.0}, Complex{-0.3, 0.0},
        Complex{-0.3, 0.0}, Complex{-0.3, 0.0}, Complex{-0.3, 0.0}};
    std::vector<Box> blockages;

    void validate() const {
        if (dimensions_m.x <= 0.0 || dimensions_m.y <= 0.0 || dimensions_m.z <= 0.0)
            throw std::invalid_argument("room dimensions must be positive");
        for (const auto& w : wall_coefficients)
            if (std::abs(w) > 1.0)
                throw std::invalid_argument("wall reflection magnitude must be <= 1");
    }

    bool contains(const Vec3& p) const {
        return p.x > 0.0 && p.x < dimensions_m.x && p.y > 0.0 && p.y < dimensions_m.y &&
               p.z > 0.0 && p.z < dimensions_m.z;
    }

    bool on_wall_plane(const Vec3& p, double tol = 1e-12) const {
        return std::fabs(p.x) < tol || std::fabs(p.x - dimensions_m.x) < tol ||
               std::fabs(p.y) < tol || std::fabs(p.y - dimensions_m.y) < tol ||
               std::fabs(p.z) < tol || std::fabs(p.z - dimensions_m.z) < tol;
    }

    bool occluded(const Vec3& a, const Vec3& b) const {
        return std::any_of(blockages.begin(), blockages.end(),
                           [&](const Box& box) { return box.intersects_segment(a, b); });
    }
};

enum class RisMode { full_pattern, three_ray };

struct Scene {
    Room room;
    Vec3 tx_m;
    Vec3 rx_m;
    RisDesign ris;
    bool los_blocked = false;
    RisMode ris_mode = RisMode::full_pattern;

    /// Pattern resolution used when the tracer computes RCS lookups.
    double pattern_step_deg = 0.05;
    /// Angular gate half-width in three-ray mode, as a multiple of HPBW.
    double three_ray_window_hpbw = 1.5;

    void validate() const {
        room.validate();
        ris.validate();
        if (!room.contains(tx_m) || !room.contains(rx_m))
            throw std::invalid_argument("TX and RX must lie strictly inside the room");
        if (room.on_wall_plane(tx_m, 1e-9) || room.on_wall_plane(rx_m, 1e-9))
            throw std::invalid_argument("TX/RX on a wall plane is degenerate");
        if (!room.on_wall_plane(ris.center_m, 1e-6))
            throw std::invalid_argument("RIS center must lie on a wall plane");
    }
};

enum class PathKind { los, wall_bounce, ris };

inline std::string to_string(PathKind kind) {
    switch (kind) {
        case PathKind::los: return "los";
        case PathKind::wall_bounce: return "wall";
        case PathKind::ris: return "ris";
    }
    return "?";
}

struct PropagationPath {
    PathKind kind = PathKind::los;
    int bounce_order = 0;              // wall-bounce paths
    RayTag ray_tag = RayTag::other;    // ris paths
    std::vector<Vec3> vertices;        // TX ... RX
    double length_m = 0.0;             // geometric length (d1+d2 for ris)
    double delay_s = 0.0;
    Complex gain{0.0, 0.0};            // linear amplitude, excludes carrier phase
};

struct ChannelImpulseResponse {
    double frequency_hz = 0.0;
    std::vector<std::pair<double, Complex>> taps; // (delay_s, complex gain)

    Complex aggregate_gain() const {
        Complex sum{0.0, 0.0};
        for (const auto& [delay, g] : taps) sum += g;
        return sum;
    }
    double aggregate_path_gain_db() const {
        return 20.0 * std::log10(std::abs(aggregate_gain()));
    }
};

namespace detail {

/// One shoebox image of a point source: per-axis (p, m) indices in the
/// Allen-Berkley lattice. Reflection count on an axis is |2m - p|.
struct ImageIndex {
    int px = 0, mx = 0, py = 0, my = 0, pz = 0, mz = 0;

    int order() const {
        return std::abs(2 * mx - px) + std::abs(2 * my - py) + std::abs(2 * mz - pz);
    }
};

inline double image_coordinate(double source, double length, int p, int m) {
    return (1 - 2 * p) * source + 2.0 * m * length;
}

inline Vec3 image_position(const Vec3& src, const Vec3& dims, const ImageIndex& idx) {
    return {image_coordinate(src.x, dims.x, idx.px, idx.mx),
            image_coordinate(src.y, dims.y, idx.py, idx.my),
            image_coordinate(src.z, dims.z, idx.pz, idx.mz)};
}

/// All images whose total reflection count is in [1, max_order].
inline std::vector<ImageIndex> enumerate_images(int max_order) {
    std::vector<ImageIndex> images;
    const int span = (max_order + 1) / 2 + 1;
    for (int px = 0; px <= 1; ++px)
        for (int mx = -span; mx <= span; ++mx)
            for (int py = 0; py <= 1; ++py)
                for (int my = -span; my <= span; ++my)
                    for (int pz = 0; pz <= 1; ++pz)
                        for (int mz = -span; mz <= span; ++mz) {
                            const ImageIndex idx{px, mx, py, my, pz, mz};
                            const int k = idx.order();
                            if (k >= 1 && k <= max_order) images.push_back(idx);
                        }
    return images;
}

/// Fold an unfolded coordinate back into [0, L].
inline double fold(double u, double length) {
    double r = std::fmod(u, 2.0 * length);
    if (r < 0.0) r += 2.0 * length;
    return r <= length ? r : 2.0 * length - r;
}

/// Wall index hit when the unfolded coordinate crosses n*L on an axis:
/// even multiples are the near wall (index 2*axis), odd the far one.
inline int crossing_wall(int axis, long long n) {
    return 2 * axis + (std::llabs(n) % 2 == 0 ? 0 : 1);
}

struct Crossing {
    double t;
    int wall;
};

/// Reflection points of the folded RX->image segment, with the wall hit
/// at each crossing, ordered from the RX end.
inline std::vector<Crossing> wall_crossings(const Vec3& rx, const Vec3& image,
                                            const Vec3& dims) {
    std::vector<Crossing> crossings;
    const std::array<double, 3> o{rx.x, rx.y, rx.z};
    const std::array<double, 3> e{image.x, image.y, image.z};
    const std::array<double, 3> L{dims.x, dims.y, dims.z};
    for (int axis = 0; axis < 3; ++axis) {
        const double d = e[axis] - o[axis];
        if (std::fabs(d) < 1e-15) continue;
        const long long n0 = static_cast<long long>(std::ceil(std::min(o[axis], e[axis]) / L[axis]));
        const long long n1 = static_cast<long long>(std::floor(std::max(o[axis], e[axis]) / L[axis]));
        for (long long n = n0; n <= n1; ++n) {
            const double t = (static_cast<double>(n) * L[axis] - o[axis]) / d;
            if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
            crossings.push_back({t, crossing_wall(axis, n)});
        }
    }
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
    return crossings;
}

/// Signed departure angle from the RIS toward a point, measured in the
/// steering plane (normal/col_axis).
inline double departure_angle_deg(const RisDesign& ris, const Vec3& point) {
    const Vec3 d = point - ris.center_m;
    return rad2deg(std::atan2(d.dot(ris.col_axis), d.dot(ris.normal)));
}

} // namespace detail

/// The RIS scattering context the tracer needs at one frequency: the RCS
/// cut for the actual TX incidence plus the extracted three-ray model.
struct RisLookup {
    RcsPattern pattern;
    RayModel ray_model;
    double hpbw_deg = 0.0;
};

inline RisLookup build_ris_lookup(const Scene& scene, double frequency_hz) {
    const Vec3 to_ris = (scene.ris.center_m - scene.tx_m).normalized();
    const PlaneWave incidence{frequency_hz, to_ris, {1.0, 0.0}};
    const auto grid = uniform_angle_grid(-90.0, 90.0, scene.pattern_step_deg);
    auto pattern = rcs_pattern(scene.ris, incidence, grid);
    RayExtractionOptions opts;
    opts.theta_out_deg = scene.ris.theta_out_deg;
    auto model = extract_dominant_rays(pattern, opts, frequency_hz);
    const double hpbw = pattern.main_lobe_hpbw_deg();
    return {std::move(pattern), std::move(model), hpbw};
}

inline std::vector<PropagationPath> trace_paths(const Scene& scene, int max_bounce_order,
                                                double frequency_hz,
                                                const RisLookup* lookup = nullptr) {
    if (max_bounce_order < 0)
        throw std::invalid_argument("max bounce order must be >= 0");
    if (frequency_hz <= 0.0)
        throw std::invalid_argument("frequency must be positive");
    scene.validate();

    const double lambda = wavelength(frequency_hz);
    std::vector<PropagationPath> paths;

    // LOS
    if (!scene.los_blocked && !scene.room.occluded(scene.tx_m, scene.rx_m)) {
        PropagationPath p;
        p.kind = PathKind::los;
        p.vertices = {scene.tx_m, scene.rx_m};
        p.length_m = distance(scene.tx_m, scene.rx_m);
        p.delay_s = p.length_m / speed_of_light;
        p.gain = Complex{lambda / (4.0 * pi * p.length_m), 0.0};
        paths.push_back(std::move(p));
    }

    // Wall bounces via the image method
    for (const auto& idx : detail::enumerate_images(max_bounce_order)) {
        const Vec3 image = detail::image_position(scene.tx_m, scene.room.dimensions_m, idx);
        const auto crossings = detail::wall_crossings(scene.rx_m, image, scene.room.dimensions_m);
        if (static_cast<int>(crossings.size()) != idx.order()) continue; // degenerate

        PropagationPath p;
        p.kind = PathKind::wall_bounce;
        p.bounce_order = idx.order();
        p.length_m = distance(scene.rx_m, image);
        p.delay_s = p.length_m / speed_of_light;

        Complex wall_product{1.0, 0.0};
        std::vector<Vec3> pts; // from RX toward TX
        pts.push_back(scene.rx_m);
        bool blocked = false;
        const Vec3 dir = image - scene.rx_m;
        for (const auto& c : crossings) {
            const Vec3 u = scene.rx_m + dir * c.t;
            const Vec3 folded{detail::fold(u.x, scene.room.dimensions_m.x),
                              detail::fold(u.y, scene.room.dimensions_m.y),
                              detail::fold(u.z, scene.room.dimensions_m.z)};
            if (scene.room.occluded(pts.back(), folded)) {
                blocked = true;
                break;
            }
            wall_product *= scene.room.wall_coefficients[static_cast<std::size_t>(c.wall)];
            pts.push_back(folded);
        }
        if (blocked || scene.room.occluded(pts.back(), scene.tx_m)) continue;
        pts.push_back(scene.tx_m);
        std::reverse(pts.begin(), pts.end());
        p.vertices = std::move(pts);
        p.gain = wall_product * (lambda / (4.0 * pi * p.length_m));
        if (std::abs(p.gain) == 0.0) continue;
        paths.push_back(std::move(p));
    }

    // RIS scattering
    if (!scene.room.occluded(scene.tx_m, scene.ris.center_m) &&
        !scene.room.occluded(scene.ris.center_m, scene.rx_m)) {
        std::optional<RisLookup> local;
        if (!lookup) {
            local.emplace(build_ris_lookup(scene, frequency_hz));
            lookup = &*local;
        }
        const double d1 = distance(scene.tx_m, scene.ris.center_m);
        const double d2 = distance(scene.ris.center_m, scene.rx_m);
        const double theta_rx = detail::departure_angle_deg(scene.ris, scene.rx_m);

        std::optional<Complex> rcs_value; // sqrt(sigma)*exp(j*phase)
        RayTag tag = RayTag::other;
        if (scene.ris_mode == RisMode::full_pattern) {
            rcs_value = lookup->pattern.interpolate(theta_rx);
        } else {
            const double window = scene.three_ray_window_hpbw * lookup->hpbw_deg;
            for (const auto& ray : lookup->ray_model.rays) {
                if (std::fabs(theta_rx - ray.theta_deg) <= window) {
                    rcs_value = std::polar(db_to_linear_amplitude(ray.sigma_dbsm),
                                           deg2rad(ray.phase_deg));
                    tag = ray.tag;
                    break;
                }
            }
        }

        if (rcs_value && std::abs(*rcs_value) > 0.0) {
            LinkBudgetInput in;
            in.sigma_dbsm = 20.0 * std::log10(std::abs(*rcs_value));
            in.frequency_hz = frequency_hz;
            in.d1_m = d1;
            in.d2_m = d2;
            const auto budget = bistatic_received_power(in);

            PropagationPath p;
            p.kind = PathKind::ris;
            p.ray_tag = scene.ris_mode == RisMode::full_pattern ? RayTag::other : tag;
            p.vertices = {scene.tx_m, scene.ris.center_m, scene.rx_m};
            p.length_m = d1 + d2;
            p.delay_s = p.length_m / speed_of_light;
            p.gain = std::polar(db_to_linear_amplitude(budget.path_gain_db),
                                std::arg(*rcs_value));
            paths.push_back(std::move(p));
        }
    }

    return paths;
}

/// One tap per path; the carrier phase exp(-j*2*pi*f*delay) multiplies
/// each path's complex gain. Taps sorted by delay, ties by kind.
inline ChannelImpulseResponse channel_impulse_response(const std::vector<PropagationPath>& paths,
                                                       double frequency_hz) {
    if (paths.empty())
        throw std::invalid_argument("cannot build a CIR from an empty path list");
    ChannelImpulseResponse cir;
    cir.frequency_hz = frequency_hz;
    std::vector<std::pair<const PropagationPath*, Complex>> taps;
    taps.reserve(paths.size());
    for (const auto& p : paths)
        taps.push_back({&p, p.gain * std::polar(1.0, -2.0 * pi * frequency_hz * p.delay_s)});
    std::sort(taps.begin(), taps.end(), [](const auto& a, const auto& b) {
        if (a.first->delay_s != b.first->delay_s) return a.first->delay_s < b.first->delay_s;
        return static_cast<int>(a.first->kind) < static_cast<int>(b.first->kind);
    });
    for (const auto& [p, g] : taps) cir.taps.push_back({p->delay_s, g});
    return cir;
}

/// Per-frequency trace + CIR. The RIS lookup is rebuilt per frequency;
/// wall-bounce geometry is frequency independent.
inline std::vector<ChannelImpulseResponse> frequency_sweep(const Scene& scene,
                                                           const std::vector<double>& frequencies_hz,
                                                           int max_bounce_order) {
    std::vector<ChannelImpulseResponse> out;
    out.reserve(frequencies_hz.size());
    for (double f : frequencies_hz) {
        const auto lookup = build_ris_lookup(scene, f);
        const auto paths = trace_paths(scene, max_bounce_order, f, &lookup);
        out.push_back(channel_impulse_response(paths, f));
    }
    return out;
}

} // namespace ris

#endif
