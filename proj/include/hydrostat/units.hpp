#pragma once

namespace hydrostat {

inline constexpr double kGravity = 9.8;  // m/s^2, value used throughout the GRF analysis
inline constexpr double kPi = 3.14159265358979323846;

namespace units {
inline constexpr double mL = 1e-6;     // m^3
inline constexpr double mm = 1e-3;     // m
inline constexpr double mm2 = 1e-6;    // m^2
inline constexpr double kPa = 1e3;     // Pa
inline constexpr double MPa = 1e6;     // Pa
inline constexpr double bar = 1e5;     // Pa
inline constexpr double ms = 1e-3;     // s
}  // namespace units

}  // namespace hydrostat
