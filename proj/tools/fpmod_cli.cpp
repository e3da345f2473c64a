#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fpmod/pipeline.hpp"

int main(int argc, char** argv) {
    fpmod::PipelineConfig cfg;
    std::string out = ".";

    CLI::App app{"Conformality analysis of fingerprint orientation fields"};
    app.require_subcommand(1);
    auto common = [&](CLI::App* sub) {
        sub->add_option("--c", cfg.c, "TQL arm length in pixels")->capture_default_str();
        sub->add_option("--bins", cfg.bins, "histogram bins per axis (10 or 20)")->capture_default_str();
        sub->add_option("--sigma", cfg.sigma, "structure tensor window in pixels")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--threads", cfg.threads, "worker threads, 0 for all cores")->capture_default_str();
    };

    std::string input;
    auto* analyze = app.add_subcommand("analyze", "image or orientation CSV -> maps, histogram, renders");
    analyze->add_option("input", input, "PGM/PNG image or orientation CSV")->required();
    common(analyze);

    std::string spec;
    auto* synth = app.add_subcommand("synth", "JSON model spec -> orientation CSV + metadata");
    synth->add_option("spec", spec, "model spec JSON")->required();
    common(synth);

    std::string manifest;
    std::string mode = "impression";
    double svm_c = 1.0;
    auto* train = app.add_subcommand("train", "manifest -> model.json");
    train->add_option("manifest", manifest, "CSV path,label,finger,impression")->required();
    train->add_option("--mode", mode, "impression or finger")
        ->check(CLI::IsMember({"impression", "finger"}))
        ->capture_default_str();
    train->add_option("--svm-c", svm_c, "SVM regularization")->capture_default_str();
    common(train);

    std::string model;
    auto* eval = app.add_subcommand("eval", "manifest + model -> report.json");
    eval->add_option("manifest", manifest, "CSV path,label,finger,impression")->required();
    eval->add_option("--model", model, "model.json")->required();
    eval->add_option("--mode", mode, "impression or finger")
        ->check(CLI::IsMember({"impression", "finger"}))
        ->capture_default_str();
    common(eval);

    std::string output;
    double lo = -fpmod::kConformalityLimit;
    double hi = fpmod::kConformalityLimit;
    auto* render = app.add_subcommand("render", "scalar field CSV, orientation CSV or hist.json -> PNG");
    render->add_option("input", input, "file to render")->required();
    render->add_option("output", output, "PNG path")->required();
    render->add_option("--lo", lo, "low end of the color range")->capture_default_str();
    render->add_option("--hi", hi, "high end of the color range")->capture_default_str();

    int fingers = 40;
    int train_fingers = 24;
    auto* corpus = app.add_subcommand("corpus", "seeded synthetic corpus with train/test manifests");
    corpus->add_option("--fingers", fingers, "fingers per class")->capture_default_str();
    corpus->add_option("--train-fingers", train_fingers, "training fingers per class")->capture_default_str();
    common(corpus);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "input: " << e.what() << '\n';
        return 2;
    }

    cfg.svm_c = svm_c;
    const auto hmode = mode == "finger" ? fpmod::HistogramMode::PerFinger : fpmod::HistogramMode::PerImpression;
    if (*analyze) {
        return fpmod::cmd_analyze(input, out, cfg);
    }
    if (*synth) {
        return fpmod::cmd_synth(spec, out, cfg);
    }
    if (*train) {
        return fpmod::cmd_train(manifest, out, hmode, cfg);
    }
    if (*eval) {
        return fpmod::cmd_eval(manifest, model, out, hmode, cfg);
    }
    if (*render) {
        return fpmod::cmd_render(input, output, lo, hi);
    }
    return fpmod::cmd_corpus(out, fingers, train_fingers, cfg);
}
