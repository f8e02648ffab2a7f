#ifndef RIS_LINK_HPP
#define RIS_LINK_HPP

#include <cmath>
#include <stdexcept>

#include "ris/geometry.hpp"

namespace ris {

struct LinkBudgetInput {
    double ptx_dbm = 0.0;
    double gtx_dbi = 0.0;
    double grx_dbi = 0.0;
    double sigma_dbsm = 0.0;
    double frequency_hz = 0.0;
    double d1_m = 0.0; // TX to scatterer
    double d2_m = 0.0; // scatterer to RX

    void validate() const {
        if (frequency_hz <= 0.0)
            throw std::invalid_argument("link frequency must be positive");
        if (d1_m <= 0.0 || d2_m <= 0.0)
            throw std::invalid_argument("link distances must be positive");
    }
};

struct LinkBudgetResult {
    double path_gain_db = 0.0;
    double prx_dbm = 0.0;
};

/// Bistatic radar equation:
/// PG = G_TX + G_RX + sigma + 10*log10( (1/(4*pi)^3) * (lambda/(d1*d2))^2 ).
inline LinkBudgetResult bistatic_received_power(const LinkBudgetInput& in) {
    in.validate();
    const double lambda = wavelength(in.frequency_hz);
    const double spreading =
        10.0 * std::log10(std::pow(lambda / (in.d1_m * in.d2_m), 2) /
                          std::pow(4.0 * pi, 3));
    const double path_gain = in.gtx_dbi + in.grx_dbi + in.sigma_dbsm + spreading;
    return {path_gain, in.ptx_dbm + path_gain};
}

/// Friis free-space gain 20*log10(lambda/(4*pi*d)).
inline double free_space_path_gain(double frequency_hz, double d_m) {
    if (frequency_hz <= 0.0 || d_m <= 0.0)
        throw std::invalid_argument("frequency and distance must be positive");
    return 20.0 * std::log10(wavelength(frequency_hz) / (4.0 * pi * d_m));
}

} // namespace ris

#endif
