#pragma once

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fpmod/imgio.hpp"

namespace fpmod {

// Histogram axes: conformality index over [-0.33, 0.33] with both end bins
// absorbing anything beyond; curvature over [0, 2.6] with the last bin
// absorbing anything beyond. With an even bin count, 0 conformality falls on
// the shared edge of the two middle bins and is assigned to the upper one.
inline constexpr double kConformalityLimit = 0.33;
inline constexpr double kCurvatureLimit = 2.6;

/// Joint (conformality, curvature) counts; conformality is axis 0.
struct Histogram2D {
    int bins = 0;
    std::vector<double> counts;  // bins x bins, conformality-major
    double total = 0.0;

    Histogram2D() = default;
    /// Throws std::invalid_argument unless bins is 10 or 20.
    explicit Histogram2D(int bins);

    double& at(int conf_bin, int curv_bin) { return counts[static_cast<std::size_t>(conf_bin) * bins + curv_bin]; }
    double at(int conf_bin, int curv_bin) const {
        return counts[static_cast<std::size_t>(conf_bin) * bins + curv_bin];
    }
};

/// Bin indices (conformality, curvature) under the clamping rules above.
std::pair<int, int> bin_of(double conformality, double curvature, int bins);

/// Counts every cell valid in both fields. Throws InputError on size mismatch.
Histogram2D hist2d(const ScalarField& conformality, const ScalarField& curvature, int bins);

/// Normalized, flattened histogram.
struct FeatureVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// counts / total; an empty histogram yields a zero vector.
FeatureVector normalize(const Histogram2D& hist);

/// Mean of the normalized masses, as a histogram with total 1.
/// Throws std::invalid_argument on an empty list or mixed bin counts.
Histogram2D average(std::span<const Histogram2D> hists);

/// {bins, conf_range, curv_range, masses, total}; masses[i][j] = counts / total
/// with i the conformality bin.
nlohmann::ordered_json to_json(const Histogram2D& hist);
Histogram2D histogram_from_json(const nlohmann::json& j);
void write_histogram_json(const Histogram2D& hist, const std::filesystem::path& path);
Histogram2D read_histogram_json(const std::filesystem::path& path);

/// Single line, comma separated.
void write_feature_csv(const FeatureVector& features, const std::filesystem::path& path);

}  // namespace fpmod
