#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "meal/config.hpp"
#include "meal/harness.hpp"
#include "meal/pnm_io.hpp"
#include "meal/synthetic.hpp"

namespace {

int cmd_synth(uint64_t seed, int images, int width, int height, int classes, int shapes,
              double noise, double rare_weight, const std::string& out_dir) {
    meal::SceneSpec spec;
    spec.width = width;
    spec.height = height;
    spec.num_classes = classes;
    spec.shapes_per_image = shapes;
    spec.noise_level = noise;
    if (rare_weight >= 0.0) {
        if (classes < 2) throw meal::ConfigError("--classes must be >= 2");
        spec.shape_class_weights.assign(static_cast<size_t>(classes - 1), 1.0);
        spec.shape_class_weights.back() = rare_weight;
    }

    std::vector<meal::ImageSample> samples;
    try {
        samples = meal::generate_synthetic(seed, images, spec);
    } catch (const std::invalid_argument& e) {
        throw meal::ConfigError(e.what());
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream manifest(std::filesystem::path(out_dir) / "manifest.tsv", std::ios::trunc);
    if (!manifest) throw std::runtime_error("cannot write manifest in " + out_dir);

    for (const meal::ImageSample& s : samples) {
        std::vector<uint8_t> rgb(s.pixels.size());
        for (size_t i = 0; i < s.pixels.size(); ++i) {
            rgb[i] = static_cast<uint8_t>(std::lround(s.pixels[i] * 255.0f));
        }
        const std::string img_name = s.id + ".ppm";
        const std::string lab_name = s.id + ".pgm";
        meal::write_ppm((std::filesystem::path(out_dir) / img_name).string(), s.w, s.h, rgb);
        meal::write_pgm((std::filesystem::path(out_dir) / lab_name).string(), s.w, s.h,
                        s.label_map);
        manifest << img_name << '\t' << lab_name << '\n';
    }
    if (!manifest) throw std::runtime_error("manifest write failed in " + out_dir);
    std::printf("wrote %zu images, %zu labels, 1 manifest to %s\n", samples.size(),
                samples.size(), out_dir.c_str());
    return 0;
}

int env_threads() {
    const char* v = std::getenv("MEAL_THREADS");
    if (v == nullptr || *v == '\0') return 0;
    try {
        const int t = std::stoi(v);
        return t < 0 ? 0 : t;
    } catch (const std::exception&) {
        throw meal::ConfigError(std::string("bad MEAL_THREADS value '") + v + "'");
    }
}

int cmd_run(const std::string& config_path, const std::string& out_path) {
    meal::ExperimentConfig cfg = meal::parse_config_file(config_path);
    cfg.threads = env_threads();
    const auto records = meal::run_experiment(cfg);
    meal::write_csv(out_path, records);
    std::printf("wrote %zu records to %s\n", records.size(), out_path.c_str());
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& out_path) {
    const auto records = meal::read_csv(in_path);
    if (records.empty()) throw std::runtime_error(in_path + ": no records");
    const auto rows = meal::summarize(records);
    meal::write_summary(out_path, rows);
    const std::string curves = out_path + ".curves.csv";
    meal::write_curves_csv(curves, rows);
    std::printf("wrote summary to %s and curves to %s\n", out_path.c_str(), curves.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patch-wise active learning for semantic segmentation"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    uint64_t seed = 0;
    int images = 20, width = 160, height = 120, classes = 5, shapes = 7;
    double noise = 0.06, rare_weight = -1.0;
    std::string out_dir;
    synth->add_option("--seed", seed, "Generator seed");
    synth->add_option("--images", images, "Number of images");
    synth->add_option("--width", width, "Image width");
    synth->add_option("--height", height, "Image height");
    synth->add_option("--classes", classes, "Class count including background");
    synth->add_option("--shapes", shapes, "Shapes per image");
    synth->add_option("--noise", noise, "Pixel noise level");
    synth->add_option("--rare-weight", rare_weight, "Weight of the last (rare) shape class");
    synth->add_option("--out", out_dir, "Output directory")->required();

    auto* run = app.add_subcommand("run", "Run an active-learning experiment");
    std::string config_path, run_out;
    run->add_option("--config", config_path, "Experiment config file")->required();
    run->add_option("--out", run_out, "Results CSV path")->required();

    auto* report = app.add_subcommand("report", "Summarize a results CSV");
    std::string report_in, report_out;
    report->add_option("--in", report_in, "Results CSV path")->required();
    report->add_option("--out", report_out, "Summary output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(seed, images, width, height, classes, shapes, noise, rare_weight,
                             out_dir);
        }
        if (run->parsed()) return cmd_run(config_path, run_out);
        if (report->parsed()) return cmd_report(report_in, report_out);
    } catch (const meal::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
