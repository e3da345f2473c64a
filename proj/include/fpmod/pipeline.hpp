#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fpmod/classify.hpp"
#include "fpmod/features.hpp"
#include "fpmod/orient.hpp"
#include "fpmod/segment.hpp"
#include "fpmod/trace.hpp"

namespace fpmod {

struct PipelineConfig {
    double c = 40.0;
    int bins = 20;
    double sigma = 7.0;
    SegmentConfig segmentation{};
    std::uint64_t seed = 1;
    double svm_c = 1.0;
    int threads = 0;

    /// Throws InputError unless c > 0, bins is 10 or 20 and sigma > 0.
    void validate() const;
};

struct Analysis {
    RegionMask mask;
    OrientationField field;
    TqlMaps maps;
    Histogram2D hist;
};

Analysis analyze_field(const OrientationField& field, const PipelineConfig& cfg);
Analysis analyze_image(const GrayImage& image, const PipelineConfig& cfg);

/// Image (PGM/PNG) or orientation CSV, chosen by extension.
Analysis analyze_path(const std::filesystem::path& input, const PipelineConfig& cfg);

/// mask.pgm, orientation.csv, conformality.csv, curvature.csv, failures.json,
/// hist.json, hist.png, conformality.png, curvature.png
void write_analysis(const Analysis& analysis, const std::filesystem::path& out_dir);

struct ManifestEntry {
    std::filesystem::path path;  // resolved against the manifest directory
    Label label = Label::Real;
    std::string finger;
    std::string impression;
};

/// CSV with header path,label,finger,impression. Labels are real/synthetic
/// (or +1/-1). Throws InputError on malformed rows.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);

enum class HistogramMode { PerImpression, PerFinger };

/// One example per entry, or one per (label, finger) with the impression
/// histograms averaged. Entries may point at hist.json files, orientation
/// CSVs or images.
std::vector<LabeledExample> load_examples(const std::vector<ManifestEntry>& entries, HistogramMode mode,
                                          const PipelineConfig& cfg);

/// The commands print one "kind: message" line on stderr on failure and
/// return 0 (ok), 2 (input error) or 3 (internal error).
int cmd_analyze(const std::filesystem::path& input, const std::filesystem::path& out_dir, const PipelineConfig& cfg);
int cmd_synth(const std::filesystem::path& spec, const std::filesystem::path& out_dir, const PipelineConfig& cfg);
int cmd_train(const std::filesystem::path& manifest, const std::filesystem::path& out_dir, HistogramMode mode,
              const PipelineConfig& cfg);
int cmd_eval(const std::filesystem::path& manifest, const std::filesystem::path& model,
             const std::filesystem::path& out_dir, HistogramMode mode, const PipelineConfig& cfg);
/// Scalar field CSV -> heatmap PNG, hist.json -> histogram PNG,
/// orientation CSV -> orientation heatmap PNG.
int cmd_render(const std::filesystem::path& input, const std::filesystem::path& output, double lo, double hi);
/// Seeded desk-scale corpus of orientation CSVs with train/test manifests.
int cmd_corpus(const std::filesystem::path& out_dir, int fingers_per_class, int train_fingers,
               const PipelineConfig& cfg);

}  // namespace fpmod
