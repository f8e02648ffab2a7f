#ifndef RIS_GEOMETRY_HPP
#define RIS_GEOMETRY_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ris {

inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double pi = std::numbers::pi;

inline double deg2rad(double d) { return d * pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / pi; }

inline double wavelength(double frequency_hz) {
    if (frequency_hz <= 0.0)
        throw std::invalid_argument("frequency must be positive");
    return speed_of_light / frequency_hz;
}

inline double wavenumber(double frequency_hz) {
    return 2.0 * pi / wavelength(frequency_hz);
}

inline double db_to_linear_amplitude(double db) { return std::pow(10.0, db / 20.0); }
inline double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_power_to_db(double p) { return 10.0 * std::log10(p); }
inline double linear_amplitude_to_db(double a) { return 20.0 * std::log10(a); }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }

    Vec3 normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
        return *this / n;
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Wrap an angle into [0, 2*pi).
inline double wrap_2pi(double rad) {
    double r = std::fmod(rad, 2.0 * pi);
    if (r < 0.0) r += 2.0 * pi;
    // fmod of a value just below 2*pi can round back up to 2*pi
    if (r >= 2.0 * pi) r = 0.0;
    return r;
}

/// Circular distance between two angles in degrees, result in [0, 180].
inline double circular_distance_deg(double a_deg, double b_deg) {
    double d = std::fmod(std::fabs(a_deg - b_deg), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

} // namespace ris

#endif
