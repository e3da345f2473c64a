#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fpmod/imgio.hpp"

namespace fpmod {

/// Foreground (region of interest) mask. An all-false mask is the "empty" state.
struct RegionMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> inside;

    RegionMask() = default;
    RegionMask(int w, int h, bool fill = false)
        : width(w), height(h), inside(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill ? 1 : 0) {}

    bool contains(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height && inside[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool v) { inside[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }

    friend bool operator==(const RegionMask&, const RegionMask&) = default;
};

struct SegmentConfig {
    int block_size = 16;
    double min_stddev = 0.06;     // gray-value standard deviation, [0,1] scale
    double min_coherence = 0.25;  // structure-tensor coherence
    int closing_radius = 2;       // in blocks
};

/// Block-wise variance/coherence segmentation, closed and reduced to the
/// largest 4-connected component, expanded back to pixel resolution.
RegionMask segment(const GrayImage& image, const SegmentConfig& cfg = {});

enum class StructuringElement { Disc, Square };

/// Erosion with outside-the-raster treated as background. margin 0 is the identity.
RegionMask erode_mask(const RegionMask& mask, int margin, StructuringElement element = StructuringElement::Disc);

/// 0 = background, 255 = foreground.
void write_mask_pgm(const RegionMask& mask, const std::filesystem::path& path);
RegionMask read_mask_pgm(const std::filesystem::path& path);

}  // namespace fpmod
