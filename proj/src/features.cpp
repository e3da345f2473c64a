#include "fpmod/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fpmod {

namespace {

int clamp_bin(double v, double lo, double hi, int bins) {
    const double pos = (v - lo) / (hi - lo) * bins;
    if (!(pos >= 0.0)) {
        return 0;
    }
    if (pos >= bins) {
        return bins - 1;
    }
    return static_cast<int>(pos);
}

}  // namespace

Histogram2D::Histogram2D(int b) : bins(b), counts(static_cast<std::size_t>(b) * b, 0.0) {
    if (b != 10 && b != 20) {
        throw std::invalid_argument("Histogram2D: bins must be 10 or 20");
    }
}

std::pair<int, int> bin_of(double conformality, double curvature, int bins) {
    return {clamp_bin(conformality, -kConformalityLimit, kConformalityLimit, bins),
            clamp_bin(curvature, 0.0, kCurvatureLimit, bins)};
}

Histogram2D hist2d(const ScalarField& conformality, const ScalarField& curvature, int bins) {
    if (conformality.width != curvature.width || conformality.height != curvature.height) {
        throw InputError("input: conformality and curvature fields differ in size");
    }
    Histogram2D h(bins);
    for (std::size_t i = 0; i < conformality.values.size(); ++i) {
        if (!conformality.valid[i] || !curvature.valid[i]) {
            continue;
        }
        const auto [ci, ki] = bin_of(conformality.values[i], curvature.values[i], bins);
        h.at(ci, ki) += 1.0;
        h.total += 1.0;
    }
    return h;
}

FeatureVector normalize(const Histogram2D& hist) {
    FeatureVector f{std::vector<double>(hist.counts.size(), 0.0)};
    if (hist.total > 0.0) {
        std::transform(hist.counts.begin(), hist.counts.end(), f.values.begin(),
                       [&](double c) { return c / hist.total; });
    }
    return f;
}

Histogram2D average(std::span<const Histogram2D> hists) {
    if (hists.empty()) {
        throw std::invalid_argument("average: empty histogram list");
    }
    Histogram2D out(hists.front().bins);
    for (const auto& h : hists) {
        if (h.bins != out.bins) {
            throw std::invalid_argument("average: bin counts differ");
        }
        const auto masses = normalize(h);
        for (std::size_t i = 0; i < masses.values.size(); ++i) {
            out.counts[i] += masses.values[i];
        }
    }
    const double n = static_cast<double>(hists.size());
    double total = 0.0;
    for (double& c : out.counts) {
        c /= n;
        total += c;
    }
    out.total = total > 0.0 ? 1.0 : 0.0;
    return out;
}

nlohmann::ordered_json to_json(const Histogram2D& hist) {
    const auto masses = normalize(hist);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < hist.bins; ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int j = 0; j < hist.bins; ++j) {
            row.push_back(masses.values[static_cast<std::size_t>(i) * hist.bins + j]);
        }
        rows.push_back(std::move(row));
    }
    nlohmann::ordered_json j;
    j["bins"] = hist.bins;
    j["conf_range"] = {-kConformalityLimit, kConformalityLimit};
    j["curv_range"] = {0.0, kCurvatureLimit};
    j["masses"] = std::move(rows);
    j["total"] = hist.total;
    return j;
}

Histogram2D histogram_from_json(const nlohmann::json& j) {
    try {
        Histogram2D h(j.at("bins").get<int>());
        const auto& rows = j.at("masses");
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(h.bins)) {
            throw InputError("input: histogram masses have the wrong shape");
        }
        const double total = j.at("total").get<double>();
        double mass_sum = 0.0;
        for (int i = 0; i < h.bins; ++i) {
            if (rows[i].size() != static_cast<std::size_t>(h.bins)) {
                throw InputError("input: histogram masses have the wrong shape");
            }
            for (int k = 0; k < h.bins; ++k) {
                h.at(i, k) = rows[i][k].get<double>();
                mass_sum += h.at(i, k);
            }
        }
        // masses are stored normalized; re-scale to counts
        if (total > 0.0 && mass_sum > 0.0) {
            for (double& c : h.counts) {
                c *= total;
            }
        }
        h.total = total;
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("input: malformed histogram JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("input: ") + e.what());
    }
}

void write_histogram_json(const Histogram2D& hist, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("output: cannot open " + path.string());
    }
    out << to_json(hist).dump() << '\n';
}

Histogram2D read_histogram_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("input: unreadable");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("input: malformed histogram JSON: ") + e.what());
    }
    return histogram_from_json(j);
}

void write_feature_csv(const FeatureVector& features, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("output: cannot open " + path.string());
    }
    char buf[32];
    for (std::size_t i = 0; i < features.values.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out.write(buf, std::to_chars(buf, buf + sizeof(buf), features.values[i]).ptr - buf);
    }
    out << '\n';
}

}  // namespace fpmod
