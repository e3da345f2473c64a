#include "fpmod/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fpmod/imgio.hpp"
#include "fpmod/qdsim.hpp"

namespace fpmod {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
    if (!(c > 0.0)) {
        throw InputError("input: c must be positive");
    }
    if (bins != 10 && bins != 20) {
        throw InputError("input: bins must be 10 or 20");
    }
    if (!(sigma > 0.0)) {
        throw InputError("input: sigma must be positive");
    }
    if (!(svm_c > 0.0)) {
        throw InputError("input: C must be positive");
    }
}

namespace {

TqlMapConfig map_config(const PipelineConfig& cfg) {
    TqlMapConfig m;
    m.tql.c = cfg.c;
    m.threads = cfg.threads;
    return m;
}

bool has_extension(const fs::path& p, std::initializer_list<const char*> exts) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return std::any_of(exts.begin(), exts.end(), [&](const char* x) { return e == x; });
}

std::string first_lines(const fs::path& p, int n) {
    std::ifstream in(p);
    std::string out;
    std::string line;
    for (int i = 0; i < n && std::getline(in, line); ++i) {
        out += line;
        out += '\n';
    }
    return out;
}

template <class F>
int guarded(F&& body) {
    try {
        body();
        return 0;
    } catch (const InputError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "internal: " << msg << '\n';
        return 3;
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw InputError("input: cannot create output directory " + dir.string());
    }
}

}  // namespace

Analysis analyze_field(const OrientationField& field, const PipelineConfig& cfg) {
    cfg.validate();
    Analysis a;
    a.mask = field.mask;
    a.field = field;
    a.maps = tql_map(field, map_config(cfg));
    a.hist = hist2d(a.maps.conformality, a.maps.curvature, cfg.bins);
    return a;
}

Analysis analyze_image(const GrayImage& image, const PipelineConfig& cfg) {
    cfg.validate();
    const RegionMask mask = segment(image, cfg.segmentation);
    OrientConfig oc;
    oc.sigma = cfg.sigma;
    return analyze_field(estimate_orientation(image, mask, oc), cfg);
}

Analysis analyze_path(const fs::path& input, const PipelineConfig& cfg) {
    if (!fs::is_regular_file(input)) {
        throw InputError("input: unreadable");
    }
    if (has_extension(input, {".csv"})) {
        return analyze_field(read_orientation_csv(input), cfg);
    }
    return analyze_image(load_gray(input), cfg);
}

void write_analysis(const Analysis& a, const fs::path& out_dir) {
    ensure_dir(out_dir);
    write_mask_pgm(a.mask, out_dir / "mask.pgm");
    write_orientation_csv(a.field, out_dir / "orientation.csv");
    write_scalar_field(a.maps.conformality, out_dir / "conformality.csv");
    write_scalar_field(a.maps.curvature, out_dir / "curvature.csv");
    write_failure_summary(a.maps.failures, out_dir / "failures.json");
    write_histogram_json(a.hist, out_dir / "hist.json");
    render_histogram(a.hist, out_dir / "hist.png");
    render_heatmap(a.maps.conformality, -kConformalityLimit, kConformalityLimit, out_dir / "conformality.png",
                   ColorRamp::Diverging);
    render_heatmap(a.maps.curvature, 0.0, kCurvatureLimit, out_dir / "curvature.png", ColorRamp::Sequential);
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("input: unreadable");
    }
    std::vector<ManifestEntry> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (lineno == 1 && !cells.empty() && cells[0] == "path") {
            continue;
        }
        if (cells.size() != 4 || cells[0].empty() || cells[2].empty()) {
            throw InputError("input: malformed manifest row " + std::to_string(lineno));
        }
        ManifestEntry e;
        e.path = fs::path(cells[0]).is_absolute() ? fs::path(cells[0]) : path.parent_path() / cells[0];
        if (cells[1] == "real" || cells[1] == "1" || cells[1] == "+1") {
            e.label = Label::Real;
        } else if (cells[1] == "synthetic" || cells[1] == "-1") {
            e.label = Label::Synthetic;
        } else {
            throw InputError("input: unknown label '" + cells[1] + "' in manifest row " + std::to_string(lineno));
        }
        e.finger = cells[2];
        e.impression = cells[3];
        out.push_back(std::move(e));
    }
    if (out.empty()) {
        throw InputError("input: empty manifest");
    }
    return out;
}

void write_manifest(const std::vector<ManifestEntry>& entries, const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("output: cannot open " + path.string());
    }
    out << "path,label,finger,impression\n";
    for (const auto& e : entries) {
        out << e.path.generic_string() << ',' << (e.label == Label::Real ? "real" : "synthetic") << ',' << e.finger
            << ',' << e.impression << '\n';
    }
}

std::vector<LabeledExample> load_examples(const std::vector<ManifestEntry>& entries, HistogramMode mode,
                                          const PipelineConfig& cfg) {
    std::vector<Histogram2D> hists;
    hists.reserve(entries.size());
    for (const auto& e : entries) {
        Histogram2D h = has_extension(e.path, {".json"}) ? read_histogram_json(e.path) : analyze_path(e.path, cfg).hist;
        if (!hists.empty() && h.bins != hists.front().bins) {
            throw InputError("input: feature length mismatch in " + e.path.string());
        }
        hists.push_back(std::move(h));
    }

    std::vector<LabeledExample> out;
    if (mode == HistogramMode::PerImpression) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            out.push_back({normalize(hists[i]), entries[i].label, entries[i].path.generic_string(), entries[i].finger});
        }
        return out;
    }
    // group by (label, finger) in order of first appearance
    std::map<std::pair<int, std::string>, std::size_t> slot;
    std::vector<std::vector<Histogram2D>> groups;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto key = std::pair{static_cast<int>(entries[i].label), entries[i].finger};
        auto [it, fresh] = slot.try_emplace(key, groups.size());
        if (fresh) {
            groups.emplace_back();
            out.push_back({{}, entries[i].label, "finger:" + entries[i].finger, entries[i].finger});
        }
        groups[it->second].push_back(hists[i]);
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        out[g].features = normalize(average(groups[g]));
    }
    return out;
}

int cmd_analyze(const fs::path& input, const fs::path& out_dir, const PipelineConfig& cfg) {
    return guarded([&] {
        cfg.validate();
        const Analysis a = analyze_path(input, cfg);
        write_analysis(a, out_dir);
    });
}

namespace {

Point point_of(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InputError("input: malformed spec: points are [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Point> points_of(const nlohmann::json& spec, const char* single, const char* many) {
    std::vector<Point> out;
    if (spec.contains(single)) {
        out.push_back(point_of(spec.at(single)));
    }
    if (spec.contains(many)) {
        if (!spec.at(many).is_array()) {
            throw InputError(std::string("input: malformed spec: ") + many + " must be a list");
        }
        for (const auto& p : spec.at(many)) {
            out.push_back(point_of(p));
        }
    }
    return out;
}

nlohmann::ordered_json json_point(Point p) { return nlohmann::ordered_json::array({p.real(), p.imag()}); }

}  // namespace

int cmd_synth(const fs::path& spec_path, const fs::path& out_dir, const PipelineConfig& cfg) {
    return guarded([&] {
        cfg.validate();
        std::ifstream in(spec_path);
        if (!in) {
            throw InputError("input: unreadable");
        }
        nlohmann::json spec;
        try {
            in >> spec;
        } catch (const nlohmann::json::exception&) {
            throw InputError("input: malformed spec: not JSON");
        }
        if (!spec.is_object() || !spec.contains("type") || !spec.at("type").is_string()) {
            throw InputError("input: malformed spec: missing type");
        }
        try {
            const std::string type = spec.at("type").get<std::string>();
            RasterFrame frame;
            frame.width = spec.value("width", 256);
            frame.height = spec.value("height", 256);
            if (frame.width <= 0 || frame.height <= 0) {
                throw InputError("input: malformed spec: width and height must be positive");
            }
            const double rotation = spec.value("rotation", 0.0);

            nlohmann::ordered_json meta;
            meta["type"] = type;
            meta["width"] = frame.width;
            meta["height"] = frame.height;
            meta["seed"] = cfg.seed;

            OrientationField field;
            if (type == "qd") {
                QdField q;
                if (spec.contains("scale")) {
                    q.scale = point_of(spec.at("scale"));
                }
                if (q.scale == Complex{}) {
                    throw InputError("input: malformed spec: scale must be nonzero");
                }
                auto loci = [&](const char* key, std::vector<WeightedLocus>& dst) {
                    if (!spec.contains(key)) {
                        return;
                    }
                    for (const auto& l : spec.at(key)) {
                        if (!l.is_array() || l.size() < 2 || l.size() > 3) {
                            throw InputError(std::string("input: malformed spec: ") + key + " entries are [x, y, m]");
                        }
                        const int m = l.size() == 3 ? l[2].get<int>() : 1;
                        if (m < 1) {
                            throw InputError("input: malformed spec: multiplicity must be positive");
                        }
                        dst.push_back({{l[0].get<double>(), l[1].get<double>()}, m});
                    }
                };
                loci("zeros", q.zeros);
                loci("poles", q.poles);
                field = rasterize(q, frame);
                meta["scale"] = json_point(q.scale);
                auto dump = [](const std::vector<WeightedLocus>& v) {
                    nlohmann::ordered_json a = nlohmann::ordered_json::array();
                    for (const auto& l : v) {
                        a.push_back({l.where.real(), l.where.imag(), l.multiplicity});
                    }
                    return a;
                };
                meta["zeros"] = dump(q.zeros);
                meta["poles"] = dump(q.poles);
            } else {
                ZeroPoleModel m;
                m.rotation = rotation;
                const auto cores = points_of(spec, "core", "cores");
                const auto deltas = points_of(spec, "delta", "deltas");
                if (type == "parallel") {
                    m.rotation = spec.value("angle", rotation);
                    if (!cores.empty() || !deltas.empty()) {
                        throw InputError("input: malformed spec: parallel fields have no loci");
                    }
                } else if (type == "whorl") {
                    if (cores.size() != 1 || !deltas.empty()) {
                        throw InputError("input: malformed spec: whorl needs exactly one core");
                    }
                    m.cores = {cores[0], cores[0]};
                    // a doubled core alone gives radial lines; a quarter turn makes circles
                    m.rotation = spec.value("rotation", kPi / 2);
                } else if (type == "loop" || type == "arch-pair") {
                    if (cores.size() != 1 || deltas.size() != 1) {
                        throw InputError("input: malformed spec: " + type + " needs one core and one delta");
                    }
                    m.cores = cores;
                    m.deltas = deltas;
                } else {
                    throw InputError("input: malformed spec: unknown type '" + type + "'");
                }
                field = rasterize(m, frame);
                meta["rotation"] = m.rotation;
                nlohmann::ordered_json c = nlohmann::ordered_json::array();
                nlohmann::ordered_json d = nlohmann::ordered_json::array();
                for (const Point& p : m.cores) {
                    c.push_back(json_point(p));
                }
                for (const Point& p : m.deltas) {
                    d.push_back(json_point(p));
                }
                meta["cores"] = c;
                meta["deltas"] = d;
            }

            std::vector<Perturbation> perturbations;
            if (spec.contains("perturbations")) {
                for (const auto& p : spec.at("perturbations")) {
                    perturbations.push_back(
                        {p.at("amplitude").get<double>(), point_of(p.at("locus")), p.at("radius").get<double>()});
                }
            }
            if (spec.contains("random_perturbations")) {
                // seeded draws: uniform loci inside the frame
                const auto& r = spec.at("random_perturbations");
                SeededRandom rng(cfg.seed);
                const int count = r.value("count", 1);
                const auto amp = r.value("amplitude", std::vector<double>{0.25, 0.40});
                const auto rad = r.value("radius", std::vector<double>{40.0, 60.0});
                if (count < 0 || amp.size() != 2 || rad.size() != 2) {
                    throw InputError("input: malformed spec: random_perturbations");
                }
                for (int k = 0; k < count; ++k) {
                    const double a = rng.uniform(amp[0], amp[1]);
                    const double rr = rng.uniform(rad[0], rad[1]);
                    const Point at(rng.uniform(0.0, frame.width - 1.0), rng.uniform(0.0, frame.height - 1.0));
                    perturbations.push_back({a, at, rr});
                }
            }
            for (const auto& p : perturbations) {
                if (p.amplitude < 0.0 || !(p.radius > 0.0)) {
                    throw InputError("input: malformed spec: perturbation amplitude >= 0 and radius > 0 required");
                }
            }
            field = apply_perturbations(std::move(field), perturbations);
            nlohmann::ordered_json pj = nlohmann::ordered_json::array();
            for (const auto& p : perturbations) {
                pj.push_back({{"amplitude", p.amplitude}, {"locus", json_point(p.locus)}, {"radius", p.radius}});
            }
            meta["perturbations"] = pj;

            ensure_dir(out_dir);
            write_orientation_csv(field, out_dir / "orientation.csv");
            std::ofstream mo(out_dir / "synth.json");
            if (!mo) {
                throw std::runtime_error("output: cannot open synth.json");
            }
            mo << meta.dump(2) << '\n';
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("input: malformed spec: ") + e.what());
        }
    });
}

int cmd_train(const fs::path& manifest, const fs::path& out_dir, HistogramMode mode, const PipelineConfig& cfg) {
    return guarded([&] {
        cfg.validate();
        const auto examples = load_examples(read_manifest(manifest), mode, cfg);
        SvmOptions opt;
        opt.C = cfg.svm_c;
        const LinearModel model = train(examples, opt);
        ensure_dir(out_dir);
        write_model_json(model, out_dir / "model.json");
    });
}

int cmd_eval(const fs::path& manifest, const fs::path& model_path, const fs::path& out_dir, HistogramMode mode,
             const PipelineConfig& cfg) {
    return guarded([&] {
        cfg.validate();
        const LinearModel model = read_model_json(model_path);
        const auto examples = load_examples(read_manifest(manifest), mode, cfg);
        const Evaluation eval = evaluate(model, examples);
        ensure_dir(out_dir);
        std::ofstream out(out_dir / "report.json");
        if (!out) {
            throw std::runtime_error("output: cannot open report.json");
        }
        out << to_json(eval).dump(2) << '\n';
    });
}

int cmd_render(const fs::path& input, const fs::path& output, double lo, double hi) {
    return guarded([&] {
        if (!fs::is_regular_file(input)) {
            throw InputError("input: unreadable");
        }
        if (!(lo < hi)) {
            throw InputError("input: render range needs lo < hi");
        }
        if (has_extension(input, {".json"})) {
            render_histogram(read_histogram_json(input), output);
            return;
        }
        const std::string head = first_lines(input, 3);
        if (head.find("theta_radians") != std::string::npos) {
            const OrientationField f = read_orientation_csv(input);
            ScalarField theta(f.width, f.height);
            for (int y = 0; y < f.height; ++y) {
                for (int x = 0; x < f.width; ++x) {
                    if (f.mask.contains(x, y) && f.coherence(x, y) > 0.0) {
                        theta.set(x, y, f.theta(x, y));
                    }
                }
            }
            render_heatmap(theta, -kPi / 2, kPi / 2, output, ColorRamp::Diverging);
            return;
        }
        const ScalarField field = read_scalar_field(input);
        render_heatmap(field, lo, hi, output, lo < 0.0 ? ColorRamp::Diverging : ColorRamp::Sequential);
    });
}

int cmd_corpus(const fs::path& out_dir, int fingers_per_class, int train_fingers, const PipelineConfig& cfg) {
    return guarded([&] {
        if (fingers_per_class < 2 || train_fingers < 1 || train_fingers >= fingers_per_class) {
            throw InputError("input: need 1 <= train fingers < fingers per class");
        }
        CorpusConfig cc;
        cc.fingers_per_class = fingers_per_class;
        cc.seed = cfg.seed;
        const auto corpus = make_corpus(cc);
        ensure_dir(out_dir / "fields");
        RasterFrame frame;
        frame.width = cc.width;
        frame.height = cc.height;

        std::vector<LabeledExample> stubs;
        std::vector<ManifestEntry> entries;
        for (const auto& f : corpus) {
            char name[64];
            std::snprintf(name, sizeof(name), "fields/%s_%03d.csv", f.real_like ? "real" : "model", f.finger);
            write_orientation_csv(render(f, frame), out_dir / name);
            ManifestEntry e{name, f.real_like ? Label::Real : Label::Synthetic, std::to_string(f.finger), "1"};
            stubs.push_back({{}, e.label, name, e.finger});
            entries.push_back(std::move(e));
        }
        const auto [train_set, test_set] = split_by_finger(stubs, train_fingers, cfg.seed);
        auto pick = [&](const std::vector<LabeledExample>& side) {
            std::vector<ManifestEntry> out;
            for (const auto& s : side) {
                for (const auto& e : entries) {
                    if (e.path.generic_string() == s.provenance) {
                        out.push_back(e);
                    }
                }
            }
            return out;
        };
        write_manifest(pick(train_set), out_dir / "train.csv");
        write_manifest(pick(test_set), out_dir / "test.csv");
    });
}

}  // namespace fpmod
