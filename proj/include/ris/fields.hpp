#ifndef RIS_FIELDS_HPP
#define RIS_FIELDS_HPP

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ris/geometry.hpp"
#include "ris/metasurface.hpp"

namespace ris {

using Complex = std::complex<double>;

struct PlaneWave {
    double frequency_hz = 0.0;
    Vec3 direction{0.0, 0.0, -1.0}; // propagation direction, toward the surface
    Complex amplitude{1.0, 0.0};

    void validate(const RisDesign& design) const {
        if (frequency_hz <= 0.0)
            throw std::invalid_argument("plane wave frequency must be positive");
        if (std::fabs(direction.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("plane wave direction must be unit length");
        if (direction.dot(design.normal) >= 0.0)
            throw std::invalid_argument("plane wave must propagate toward the surface");
    }
};

struct SphericalSource {
    double frequency_hz = 0.0;
    Vec3 position_m{0.0, 0.0, 1.0};
    Complex amplitude{1.0, 0.0};

    void validate(const RisDesign& design) const {
        if (frequency_hz <= 0.0)
            throw std::invalid_argument("source frequency must be positive");
        if ((position_m - design.center_m).dot(design.normal) <= 0.0)
            throw std::invalid_argument("source must lie strictly in front of the aperture");
    }
};

using Excitation = std::variant<PlaneWave, SphericalSource>;

inline double excitation_frequency(const Excitation& e) {
    return std::visit([](const auto& x) { return x.frequency_hz; }, e);
}

/// Normal plane wave impinging on a design (propagation along -normal).
inline PlaneWave normal_incidence(const RisDesign& design, double frequency_hz) {
    return PlaneWave{frequency_hz, design.normal * -1.0, {1.0, 0.0}};
}

/// Element factor cos(theta), zero behind the surface.
inline double element_factor(double cos_theta) { return std::max(cos_theta, 0.0); }

namespace detail {

struct ElementGrid {
    std::vector<Vec3> positions;          // row-major
    std::vector<Complex> coefficients;    // row-major
    std::size_t rows = 0, cols = 0;

    explicit ElementGrid(const RisDesign& design) : rows(design.rows), cols(design.cols) {
        const auto gamma = reflection_coefficients(design);
        const Vec3 row_axis = design.normal.cross(design.col_axis);
        positions.reserve(rows * cols);
        coefficients.reserve(rows * cols);
        for (std::size_t r = 0; r < rows; ++r) {
            const double y = RisDesign::element_coordinate(r, rows, design.pitch_m);
            for (std::size_t c = 0; c < cols; ++c) {
                const double x = RisDesign::element_coordinate(c, cols, design.pitch_m);
                positions.push_back(design.center_m + design.col_axis * x + row_axis * y);
                coefficients.push_back(gamma[r][c]);
            }
        }
    }
};

} // namespace detail

/// Exact per-element field at an observation point in front of the
/// aperture. Includes the pitch^2/lambda aperture normalization so that
/// the value converges to scattered_field_far(...)/r at large range.
inline Complex scattered_field_near(const RisDesign& design, const Excitation& excitation,
                                    const Vec3& observation_point_m) {
    design.validate();
    std::visit([&](const auto& x) { x.validate(design); }, excitation);
    if ((observation_point_m - design.center_m).dot(design.normal) <= 0.0)
        throw std::domain_error("observation point must be strictly in front of the aperture");

    const double f = excitation_frequency(excitation);
    const double k = wavenumber(f);
    const detail::ElementGrid grid(design);

    Complex sum{0.0, 0.0};
    for (std::size_t i = 0; i < grid.positions.size(); ++i) {
        const Vec3& p = grid.positions[i];

        double in_path = 0.0;   // phase path only for plane waves
        double f_in = 1.0;
        Complex a_in{1.0, 0.0};
        if (const auto* pw = std::get_if<PlaneWave>(&excitation)) {
            in_path = pw->direction.dot(p - design.center_m);
            f_in = element_factor(-pw->direction.dot(design.normal));
            a_in = pw->amplitude;
        } else {
            const auto& src = std::get<SphericalSource>(excitation);
            const Vec3 d = p - src.position_m;
            const double r_in = d.norm();
            in_path = r_in;
            f_in = element_factor(-d.dot(design.normal) / r_in);
            a_in = src.amplitude / r_in;
        }

        const Vec3 out = observation_point_m - p;
        const double r_out = out.norm();
        const double f_out = element_factor(out.dot(design.normal) / r_out);

        sum += grid.coefficients[i] * (a_in * f_in * f_out / r_out) *
               std::polar(1.0, -k * (in_path + r_out));
    }
    return sum * (design.pitch_m * design.pitch_m / wavelength(f));
}

namespace detail {

/// Far-field sum with precomputed coefficients; phase k*(out - d_in).p is
/// separable in the row/column lattice axes.
inline Complex far_sum(const RisDesign& design,
                       const std::vector<std::vector<Complex>>& gamma,
                       const PlaneWave& excitation, const Vec3& out_direction) {
    const double cos_out = out_direction.dot(design.normal);
    if (cos_out <= 0.0)
        throw std::domain_error("out direction must point into the front hemisphere");

    const double f = excitation.frequency_hz;
    const double k = wavenumber(f);
    const double f_in = element_factor(-excitation.direction.dot(design.normal));
    const double f_out = element_factor(cos_out);

    const Vec3 row_axis = design.normal.cross(design.col_axis);
    const Vec3 steer = out_direction - excitation.direction;
    const double a_col = k * steer.dot(design.col_axis) * design.pitch_m;
    const double a_row = k * steer.dot(row_axis) * design.pitch_m;

    std::vector<Complex> col_phase(design.cols);
    for (std::size_t c = 0; c < design.cols; ++c) {
        const double xc = static_cast<double>(c) - (static_cast<double>(design.cols) - 1.0) / 2.0;
        col_phase[c] = std::polar(1.0, a_col * xc);
    }

    Complex sum{0.0, 0.0};
    for (std::size_t r = 0; r < design.rows; ++r) {
        const double yr = static_cast<double>(r) - (static_cast<double>(design.rows) - 1.0) / 2.0;
        Complex row_sum{0.0, 0.0};
        for (std::size_t c = 0; c < design.cols; ++c)
            row_sum += gamma[r][c] * col_phase[c];
        sum += std::polar(1.0, a_row * yr) * row_sum;
    }
    return sum * excitation.amplitude * f_in * f_out *
           (design.pitch_m * design.pitch_m / wavelength(f));
}

} // namespace detail

/// Far-field coefficient such that E(r) ~ coeff * exp(-j*k*r)/r along
/// out_direction, for plane-wave illumination.
inline Complex scattered_field_far(const RisDesign& design, const PlaneWave& excitation,
                                   const Vec3& out_direction) {
    design.validate();
    excitation.validate(design);
    if (std::fabs(out_direction.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("out direction must be unit length");
    return detail::far_sum(design, reflection_coefficients(design), excitation, out_direction);
}

/// Angular cut of complex RCS values. |value|^2 is sigma in m^2.
class RcsPattern {
public:
    RcsPattern(std::vector<double> angles_deg, std::vector<Complex> values)
        : angles_deg_(std::move(angles_deg)), values_(std::move(values)) {
        if (angles_deg_.empty() || angles_deg_.size() != values_.size())
            throw std::invalid_argument("pattern needs matching non-empty angle/value lists");
        for (std::size_t i = 1; i < angles_deg_.size(); ++i)
            if (angles_deg_[i] <= angles_deg_[i - 1])
                throw std::invalid_argument("pattern angle grid must be strictly increasing");
    }

    std::size_t size() const { return angles_deg_.size(); }
    const std::vector<double>& angles_deg() const { return angles_deg_; }
    const std::vector<Complex>& values() const { return values_; }

    double angle_deg(std::size_t i) const { return angles_deg_.at(i); }
    Complex value(std::size_t i) const { return values_.at(i); }

    double amplitude_dbsm(std::size_t i) const {
        return 20.0 * std::log10(std::abs(values_.at(i)));
    }
    double phase_deg(std::size_t i) const { return rad2deg(std::arg(values_.at(i))); }

    std::size_t peak_index() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < values_.size(); ++i)
            if (std::abs(values_[i]) > std::abs(values_[best])) best = i;
        return best;
    }

    /// Linear interpolation of the complex value (amplitude in linear
    /// scale, phase along the shorter arc). Out-of-range angles clamp.
    Complex interpolate(double theta_deg) const {
        if (theta_deg <= angles_deg_.front()) return values_.front();
        if (theta_deg >= angles_deg_.back()) return values_.back();
        const auto it = std::upper_bound(angles_deg_.begin(), angles_deg_.end(), theta_deg);
        const std::size_t hi = static_cast<std::size_t>(it - angles_deg_.begin());
        const std::size_t lo = hi - 1;
        const double t = (theta_deg - angles_deg_[lo]) / (angles_deg_[hi] - angles_deg_[lo]);
        const double a0 = std::abs(values_[lo]), a1 = std::abs(values_[hi]);
        const double p0 = std::arg(values_[lo]);
        double p1 = std::arg(values_[hi]);
        while (p1 - p0 > pi) p1 -= 2.0 * pi;
        while (p1 - p0 < -pi) p1 += 2.0 * pi;
        return std::polar(a0 + t * (a1 - a0), p0 + t * (p1 - p0));
    }

    /// Half-power beamwidth of the lobe containing the global peak, by
    /// linear interpolation of the -3 dB crossings, in degrees.
    double main_lobe_hpbw_deg() const {
        const std::size_t pk = peak_index();
        const double half = std::abs(values_[pk]) / std::sqrt(2.0);
        auto cross = [&](int step) {
            std::size_t i = pk;
            while (true) {
                const std::size_t next = i + static_cast<std::size_t>(step);
                if (next >= values_.size()) return angles_deg_[i];
                if (std::abs(values_[next]) < half) {
                    const double a0 = std::abs(values_[i]), a1 = std::abs(values_[next]);
                    const double t = (a0 - half) / (a0 - a1);
                    return angles_deg_[i] + t * (angles_deg_[next] - angles_deg_[i]);
                }
                i = next;
            }
        };
        return cross(+1) - cross(-1);
    }

private:
    std::vector<double> angles_deg_;
    std::vector<Complex> values_;
};

/// RCS cut in the plane spanned by the surface normal and the steering
/// axis. sigma(theta) = 4*pi*|far coefficient|^2 / |E_i|^2, so a perfect
/// in-phase aperture of area A gives the flat-plate value 4*pi*A^2/lambda^2.
inline RcsPattern rcs_pattern(const RisDesign& design, const PlaneWave& excitation,
                              const std::vector<double>& angle_grid_deg) {
    if (angle_grid_deg.empty())
        throw std::invalid_argument("angle grid must be non-empty");
    design.validate();
    excitation.validate(design);
    const auto gamma = reflection_coefficients(design);
    const double norm = std::sqrt(4.0 * pi) / std::abs(excitation.amplitude);
    std::vector<Complex> values;
    values.reserve(angle_grid_deg.size());
    for (double theta : angle_grid_deg) {
        const double t = deg2rad(theta);
        const Vec3 dir = design.col_axis * std::sin(t) + design.normal * std::cos(t);
        values.push_back(norm * detail::far_sum(design, gamma, excitation, dir));
    }
    return RcsPattern(angle_grid_deg, std::move(values));
}

inline std::vector<double> uniform_angle_grid(double start_deg, double stop_deg,
                                              double step_deg) {
    if (step_deg <= 0.0 || stop_deg <= start_deg)
        throw std::invalid_argument("angle grid requires positive step and span");
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::llround((stop_deg - start_deg) / step_deg));
    grid.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(start_deg + static_cast<double>(i) * step_deg);
    return grid;
}

/// Fraunhofer distance 2*D^2/lambda with D the aperture diagonal, at the
/// design frequency.
inline double far_field_distance(const RisDesign& design) {
    const double d = std::hypot(design.aperture_width_m(), design.aperture_height_m());
    return 2.0 * d * d / wavelength(design.frequency_design_hz);
}

/// dB ratio of the exact field to the far-field approximation coeff/d,
/// per distance along out_direction from the aperture center.
inline std::vector<double> near_far_deviation(const RisDesign& design,
                                              const PlaneWave& excitation,
                                              const Vec3& out_direction,
                                              const std::vector<double>& distances_m) {
    if (distances_m.empty())
        throw std::invalid_argument("distance list must be non-empty");
    for (std::size_t i = 0; i < distances_m.size(); ++i) {
        if (distances_m[i] <= 0.0)
            throw std::invalid_argument("distances must be positive");
        if (i > 0 && distances_m[i] <= distances_m[i - 1])
            throw std::invalid_argument("distances must be increasing");
    }
    const double far_amp = std::abs(scattered_field_far(design, excitation, out_direction));
    std::vector<double> deviations;
    deviations.reserve(distances_m.size());
    for (double d : distances_m) {
        const Vec3 point = design.center_m + out_direction * d;
        const double near_amp = std::abs(scattered_field_near(design, excitation, point));
        deviations.push_back(20.0 * std::log10(near_amp * d / far_amp));
    }
    return deviations;
}

} // namespace ris

#endif
