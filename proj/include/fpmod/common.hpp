#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>

namespace fpmod {

/// Planar point in pixel coordinates, x + i*y with y pointing down the raster.
using Point = std::complex<double>;
using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Malformed or unreadable input. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fpmod
