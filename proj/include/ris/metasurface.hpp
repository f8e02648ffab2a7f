#ifndef RIS_METASURFACE_HPP
#define RIS_METASURFACE_HPP

#include <algorithm>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ris/geometry.hpp"

namespace ris {

/// One reflection state of a unit cell. The cell dimensions are metadata
/// only; the scattering model consumes phase and amplitude.
struct UnitCellState {
    int id = 0;
    double phase_deg = 0.0;   // [0, 360)
    double amplitude_db = 0.0; // <= 0
    double w_r_mm = 0.0;
    double w_in_mm = 0.0;
};

class Codebook {
public:
    explicit Codebook(std::vector<UnitCellState> states) : states_(std::move(states)) {
        if (states_.empty())
            throw std::invalid_argument("codebook must be non-empty");
        for (std::size_t i = 0; i < states_.size(); ++i) {
            const auto& s = states_[i];
            if (s.phase_deg < 0.0 || s.phase_deg >= 360.0)
                throw std::invalid_argument("state phase must be in [0, 360)");
            if (s.amplitude_db > 0.0)
                throw std::invalid_argument("state amplitude must be <= 0 dB");
            for (std::size_t j = 0; j < i; ++j) {
                if (states_[j].id == s.id)
                    throw std::invalid_argument("duplicate state id " + std::to_string(s.id));
                if (circular_distance_deg(states_[j].phase_deg, s.phase_deg) == 0.0)
                    throw std::invalid_argument("codebook phases must be distinct modulo 360");
            }
        }
    }

    const std::vector<UnitCellState>& states() const { return states_; }

    const UnitCellState& state_by_id(int id) const {
        for (const auto& s : states_)
            if (s.id == id) return s;
        throw std::runtime_error("unknown unit-cell state id " + std::to_string(id));
    }

    bool has_id(int id) const {
        return std::any_of(states_.begin(), states_.end(),
                           [id](const UnitCellState& s) { return s.id == id; });
    }

private:
    std::vector<UnitCellState> states_;
};

/// The measured 2-bit codebook: four states, phases {0, 96, 184, 273} deg.
/// Amplitude is the -0.5 dB worst-case bound, applied uniformly.
inline Codebook default_codebook(double amplitude_db = -0.5) {
    return Codebook({
        {1, 0.0, amplitude_db, 0.08, 0.17},
        {2, 96.0, amplitude_db, 0.08, 0.13},
        {3, 184.0, amplitude_db, 0.08, 0.0},
        {4, 273.0, amplitude_db, 0.0, 0.0}, // all metal
    });
}

/// A perfect mirror: single state, full reflection, zero phase.
inline Codebook mirror_codebook() {
    return Codebook({{1, 0.0, 0.0, 0.0, 0.0}});
}

/// rows x cols grid of continuous phases in [0, 2*pi).
class PhaseProfile {
public:
    PhaseProfile(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("phase profile dimensions must be positive");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

using StateGrid = std::vector<std::vector<int>>; // rows x cols of state ids

struct RisDesign {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double pitch_m = 0.0;
    Codebook codebook = default_codebook();
    StateGrid state_grid;
    Vec3 center_m{0.0, 0.0, 0.0};
    Vec3 normal{0.0, 0.0, 1.0};
    Vec3 col_axis{1.0, 0.0, 0.0}; // steering (phase-gradient) axis, in the aperture plane
    double frequency_design_hz = 0.0;
    double theta_out_deg = 0.0; // designed anomalous-reflection angle, 0 for a mirror

    void validate() const {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("design dimensions must be positive");
        if (pitch_m <= 0.0)
            throw std::invalid_argument("pitch must be positive");
        if (frequency_design_hz <= 0.0)
            throw std::invalid_argument("design frequency must be positive");
        if (std::fabs(normal.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("design normal must be unit length");
        if (std::fabs(col_axis.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("design col_axis must be unit length");
        if (std::fabs(col_axis.dot(normal)) > 1e-9)
            throw std::invalid_argument("col_axis must lie in the aperture plane");
        if (state_grid.size() != rows)
            throw std::invalid_argument("state grid row count mismatch");
        for (const auto& row : state_grid) {
            if (row.size() != cols)
                throw std::invalid_argument("state grid column count mismatch");
            for (int id : row)
                if (!codebook.has_id(id))
                    throw std::runtime_error("state grid references unknown id " +
                                             std::to_string(id));
        }
    }

    double aperture_width_m() const { return static_cast<double>(cols) * pitch_m; }
    double aperture_height_m() const { return static_cast<double>(rows) * pitch_m; }

    /// Element-center coordinate along an axis with n in [0, count).
    static double element_coordinate(std::size_t n, std::size_t count, double pitch) {
        return (static_cast<double>(n) - (static_cast<double>(count) - 1.0) / 2.0) * pitch;
    }
};

/// Linear phase-gradient profile steering theta_in to theta_out, gradient
/// along columns. Entry (m, n) = mod(-k * x_n * (sin th_out - sin th_in), 2*pi)
/// with x_n measured from the aperture center.
inline PhaseProfile ideal_phase_profile(std::size_t rows, std::size_t cols, double pitch_m,
                                        double theta_out_rad, double theta_in_rad,
                                        double frequency_hz) {
    if (rows == 0 || cols == 0 || pitch_m <= 0.0)
        throw std::invalid_argument("profile dimensions and pitch must be positive");
    if (frequency_hz <= 0.0)
        throw std::invalid_argument("frequency must be positive");
    if (std::fabs(theta_out_rad) >= pi / 2.0 || std::fabs(theta_in_rad) >= pi / 2.0)
        throw std::invalid_argument("steering angles must lie in (-90, 90) degrees");

    const double k = wavenumber(frequency_hz);
    const double gradient = std::sin(theta_out_rad) - std::sin(theta_in_rad);
    PhaseProfile profile(rows, cols);
    for (std::size_t c = 0; c < cols; ++c) {
        const double x = RisDesign::element_coordinate(c, cols, pitch_m);
        const double phase = wrap_2pi(-k * x * gradient);
        for (std::size_t r = 0; r < rows; ++r)
            profile.at(r, c) = phase;
    }
    return profile;
}

/// Nearest codebook state by circular phase distance; ties go to the
/// lowest state id.
inline int quantize_phase(double phase_rad, const Codebook& codebook) {
    const double target_deg = rad2deg(wrap_2pi(phase_rad));
    int best_id = 0;
    double best_dist = 1e300;
    for (const auto& s : codebook.states()) {
        const double d = circular_distance_deg(target_deg, s.phase_deg);
        if (d < best_dist || (d == best_dist && s.id < best_id)) {
            best_dist = d;
            best_id = s.id;
        }
    }
    return best_id;
}

inline StateGrid quantize_profile(const PhaseProfile& profile, const Codebook& codebook) {
    StateGrid grid(profile.rows(), std::vector<int>(profile.cols()));
    for (std::size_t r = 0; r < profile.rows(); ++r)
        for (std::size_t c = 0; c < profile.cols(); ++c)
            grid[r][c] = quantize_phase(profile.at(r, c), codebook);
    return grid;
}

/// Per-element complex reflection coefficient 10^(A/20) * exp(j*phase).
inline std::vector<std::vector<std::complex<double>>>
reflection_coefficients(const RisDesign& design) {
    design.validate();
    std::vector<std::vector<std::complex<double>>> coeffs(
        design.rows, std::vector<std::complex<double>>(design.cols));
    for (std::size_t r = 0; r < design.rows; ++r) {
        for (std::size_t c = 0; c < design.cols; ++c) {
            const auto& s = design.codebook.state_by_id(design.state_grid[r][c]);
            const double amp = db_to_linear_amplitude(s.amplitude_db);
            coeffs[r][c] = std::polar(amp, deg2rad(s.phase_deg));
        }
    }
    return coeffs;
}

/// Convenience constructor for the anomalous-reflection designs used
/// throughout: quantized linear gradient along columns, normal at +z.
inline RisDesign make_gradient_design(std::size_t rows, std::size_t cols, double pitch_m,
                                      double theta_out_deg, double theta_in_deg,
                                      double frequency_hz,
                                      Codebook codebook = default_codebook()) {
    RisDesign d;
    d.rows = rows;
    d.cols = cols;
    d.pitch_m = pitch_m;
    d.codebook = std::move(codebook);
    d.frequency_design_hz = frequency_hz;
    d.theta_out_deg = theta_out_deg;
    const auto profile = ideal_phase_profile(rows, cols, pitch_m, deg2rad(theta_out_deg),
                                             deg2rad(theta_in_deg), frequency_hz);
    d.state_grid = quantize_profile(profile, d.codebook);
    d.validate();
    return d;
}

} // namespace ris

#endif
