#include "fpmod/filters.hpp"

#include <algorithm>
#include <cmath>

namespace fpmod::filters {

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0)) {
        return {1.0};
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        taps[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += taps[i + radius];
    }
    for (double& t : taps) {
        t /= sum;
    }
    return taps;
}

template <class T>
std::vector<T> gaussian_blur(const std::vector<T>& src, int width, int height, double sigma) {
    const auto taps = gaussian_kernel(sigma);
    if (taps.size() == 1) {
        return src;
    }
    const int radius = static_cast<int>(taps.size() / 2);
    std::vector<T> tmp(src.size());
    std::vector<T> out(src.size());
    for (int y = 0; y < height; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            T acc{};
            double wsum = 0.0;
            const int lo = std::max(-radius, -x);
            const int hi = std::min(radius, width - 1 - x);
            for (int k = lo; k <= hi; ++k) {
                acc += taps[k + radius] * src[row + x + k];
                wsum += taps[k + radius];
            }
            tmp[row + x] = acc / wsum;
        }
    }
    for (int y = 0; y < height; ++y) {
        const int lo = std::max(-radius, -y);
        const int hi = std::min(radius, height - 1 - y);
        for (int x = 0; x < width; ++x) {
            T acc{};
            double wsum = 0.0;
            for (int k = lo; k <= hi; ++k) {
                acc += taps[k + radius] * tmp[static_cast<std::size_t>(y + k) * width + x];
                wsum += taps[k + radius];
            }
            out[static_cast<std::size_t>(y) * width + x] = acc / wsum;
        }
    }
    return out;
}

template std::vector<double> gaussian_blur(const std::vector<double>&, int, int, double);
template std::vector<std::complex<double>> gaussian_blur(const std::vector<std::complex<double>>&, int, int, double);

Gradients sobel(const std::vector<double>& src, int width, int height) {
    Gradients g{std::vector<double>(src.size()), std::vector<double>(src.size())};
    auto px = [&](int x, int y) {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return src[static_cast<std::size_t>(y) * width + x];
    };
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            g.gx[static_cast<std::size_t>(y) * width + x] = gx / 8.0;
            g.gy[static_cast<std::size_t>(y) * width + x] = gy / 8.0;
        }
    }
    return g;
}

}  // namespace fpmod::filters
