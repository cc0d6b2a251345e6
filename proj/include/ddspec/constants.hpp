#pragma once

#include <numbers>

namespace ddspec {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace si {
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double boltzmann = 1.380649e-23;     // J / K
inline constexpr double speed_of_light = 299792458.0; // m / s
inline constexpr double rb87_mass = 1.443160648e-25;  // kg
}  // namespace si

/// Normalization constants of the overlap integral.
///
/// | constant            | value | meaning                                          |
/// |---------------------|-------|--------------------------------------------------|
/// | kDefaultAlpha       | 1/4   | equal-superposition initial state                |
/// | kOverlapFoldFactor  | 2     | folds the two-sided frequency integral onto f>=0 |
///
/// With these values R = (2 alpha / t) * 2 * int_0^inf G F df reduces to
/// R = (1/t) int_0^inf G F df, the exact decay rate of a Gaussian phase
/// process. The acceptance suite checks this against the Kubo line shape
/// of Ornstein-Uhlenbeck noise and against R = G(f0)/4 for a long
/// continuous drive.
inline constexpr double kDefaultAlpha = 0.25;
inline constexpr double kOverlapFoldFactor = 2.0;

}  // namespace ddspec
