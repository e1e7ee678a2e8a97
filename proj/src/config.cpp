#include "meal/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace meal {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

long long parse_int(const std::string& key, const std::string& value) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("bad integer for key '" + key + "': '" + value + "'");
    }
    return v;
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        size_t consumed = 0;
        const double v = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad real for key '" + key + "': '" + value + "'");
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    double rare_weight = -1.0;

    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key or value");
        }

        if (key == "strategy") {
            try {
                cfg.al.strategy = strategy_from_name(value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        } else if (key == "seeds") {
            cfg.seeds.clear();
            std::istringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                tok = trim(tok);
                if (tok.empty()) throw ConfigError("empty entry in 'seeds'");
                cfg.seeds.push_back(static_cast<uint64_t>(parse_int("seeds", tok)));
            }
        } else if (key == "grid.rows") {
            cfg.grid.rows = static_cast<int>(parse_int(key, value));
        } else if (key == "grid.cols") {
            cfg.grid.cols = static_cast<int>(parse_int(key, value));
        } else if (key == "al.query_size") {
            cfg.al.query_size = static_cast<int>(parse_int(key, value));
        } else if (key == "al.informative_size") {
            cfg.al.informative_size = static_cast<int>(parse_int(key, value));
        } else if (key == "al.steps") {
            cfg.al.steps = static_cast<int>(parse_int(key, value));
        } else if (key == "al.init_patches") {
            cfg.al.init_patches = static_cast<int>(parse_int(key, value));
        } else if (key == "train.epochs") {
            cfg.train.epochs = static_cast<int>(parse_int(key, value));
        } else if (key == "train.batch_size") {
            cfg.train.batch_size = static_cast<int>(parse_int(key, value));
        } else if (key == "train.learning_rate") {
            cfg.train.learning_rate = parse_real(key, value);
        } else if (key == "umap.n_neighbors") {
            cfg.umap.n_neighbors = static_cast<int>(parse_int(key, value));
        } else if (key == "umap.out_dim") {
            cfg.umap.out_dim = static_cast<int>(parse_int(key, value));
        } else if (key == "umap.min_dist") {
            cfg.umap.min_dist = parse_real(key, value);
        } else if (key == "umap.n_epochs") {
            cfg.umap.n_epochs = static_cast<int>(parse_int(key, value));
        } else if (key == "umap.negative_samples") {
            cfg.umap.negative_samples = static_cast<int>(parse_int(key, value));
        } else if (key == "umap.learning_rate") {
            cfg.umap.learning_rate = parse_real(key, value);
        } else if (key == "data.manifest") {
            cfg.data.synthetic = false;
            cfg.data.manifest = value;
        } else if (key == "data.classes") {
            cfg.data.num_classes = static_cast<int>(parse_int(key, value));
            cfg.data.scene.num_classes = cfg.data.num_classes;
        } else if (key == "data.seed") {
            cfg.data.data_seed = static_cast<uint64_t>(parse_int(key, value));
        } else if (key == "data.images") {
            cfg.data.images = static_cast<int>(parse_int(key, value));
        } else if (key == "data.width") {
            cfg.data.scene.width = static_cast<int>(parse_int(key, value));
        } else if (key == "data.height") {
            cfg.data.scene.height = static_cast<int>(parse_int(key, value));
        } else if (key == "data.shapes") {
            cfg.data.scene.shapes_per_image = static_cast<int>(parse_int(key, value));
        } else if (key == "data.noise") {
            cfg.data.scene.noise_level = parse_real(key, value);
        } else if (key == "data.rare_weight") {
            rare_weight = parse_real(key, value);
        } else if (key == "data.val_fraction") {
            cfg.data.val_fraction = parse_real(key, value);
        } else {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" + key +
                              "'");
        }
    }

    if (rare_weight >= 0.0) {
        if (cfg.data.scene.num_classes < 2) throw ConfigError("data.classes must be >= 2");
        cfg.data.scene.shape_class_weights.assign(
            static_cast<size_t>(cfg.data.scene.num_classes - 1), 1.0);
        cfg.data.scene.shape_class_weights.back() = rare_weight;
    }

    validate_config(cfg);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (cfg.seeds.empty()) fail("seeds must list at least one seed");
    if (cfg.grid.rows < 1 || cfg.grid.cols < 1) fail("grid.rows/grid.cols must be >= 1");
    if (cfg.al.query_size < 1) fail("al.query_size must be >= 1");
    if (cfg.al.steps < 1) fail("al.steps must be >= 1");
    if (cfg.al.init_patches < 1) fail("al.init_patches must be >= 1");
    if ((cfg.al.strategy == Strategy::meal || cfg.al.strategy == Strategy::meal_ft) &&
        cfg.al.query_size > cfg.al.informative_size) {
        fail("al.query_size must be <= al.informative_size for meal/meal_ft");
    }
    if (cfg.al.informative_size < 1) fail("al.informative_size must be >= 1");
    if (cfg.train.epochs < 1) fail("train.epochs must be >= 1");
    if (cfg.train.batch_size < 1) fail("train.batch_size must be >= 1");
    if (cfg.train.learning_rate <= 0.0) fail("train.learning_rate must be > 0");
    if (cfg.umap.n_neighbors < 2) fail("umap.n_neighbors must be >= 2");
    if (cfg.umap.out_dim < 1) fail("umap.out_dim must be >= 1");
    if (cfg.umap.min_dist <= 0.0) fail("umap.min_dist must be > 0");
    if (cfg.umap.n_epochs < 1) fail("umap.n_epochs must be >= 1");
    if (cfg.umap.negative_samples < 1) fail("umap.negative_samples must be >= 1");
    if (cfg.umap.learning_rate <= 0.0) fail("umap.learning_rate must be > 0");
    if (cfg.data.synthetic) {
        if (cfg.data.images < 2) fail("data.images must be >= 2");
        if (cfg.data.scene.num_classes < 2) fail("data.classes must be >= 2");
        if (cfg.data.scene.width < 4 || cfg.data.scene.height < 4) {
            fail("data.width/data.height must be >= 4");
        }
        if (cfg.data.scene.noise_level < 0.0) fail("data.noise must be >= 0");
        if (cfg.data.scene.shapes_per_image < 0) fail("data.shapes must be >= 0");
    } else {
        if (cfg.data.manifest.empty()) fail("data.manifest must name a file");
        if (cfg.data.num_classes < 2) fail("data.classes must be >= 2");
    }
    if (cfg.data.val_fraction <= 0.0 || cfg.data.val_fraction >= 1.0) {
        fail("data.val_fraction must be in (0, 1)");
    }
}

}  // namespace meal
