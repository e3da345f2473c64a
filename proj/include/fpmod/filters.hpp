#pragma once

#include <complex>
#include <vector>

namespace fpmod::filters {

/// Normalized Gaussian taps, radius ceil(3*sigma). sigma <= 0 yields {1}.
std::vector<double> gaussian_kernel(double sigma);

/// Separable convolution with weights renormalized over in-raster taps,
/// so a constant raster maps to itself (up to rounding).
template <class T>
std::vector<T> gaussian_blur(const std::vector<T>& src, int width, int height, double sigma);

struct Gradients {
    std::vector<double> gx;
    std::vector<double> gy;
};

/// 3x3 Sobel, replicated borders.
Gradients sobel(const std::vector<double>& src, int width, int height);

}  // namespace fpmod::filters
