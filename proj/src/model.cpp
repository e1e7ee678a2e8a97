#include "meal/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "meal/rng.hpp"

namespace meal {

LinearSegModel::LinearSegModel(int num_classes, int image_channels)
    : num_classes_(num_classes),
      image_channels_(image_channels),
      weights_(static_cast<size_t>(num_classes) * (feature_count(image_channels) + 1), 0.0) {
    if (num_classes < 2) throw std::invalid_argument("need at least 2 classes");
    if (image_channels < 1) throw std::invalid_argument("need at least 1 image channel");
}

void LinearSegModel::init_uniform(uint64_t seed, double radius) {
    auto rng = fork_stream(seed, "model-init");
    for (double& w : weights_) w = uniform_real(rng, -radius, radius);
}

std::vector<float> compute_pixel_features(const ImageSample& image) {
    const int ch = image.channels;
    const int fcount = LinearSegModel::feature_count(ch);
    std::vector<float> feats(static_cast<size_t>(image.h) * image.w * fcount);

    for (int y = 0; y < image.h; ++y) {
        for (int x = 0; x < image.w; ++x) {
            float* f = &feats[(static_cast<size_t>(y) * image.w + x) * fcount];
            for (int c = 0; c < ch; ++c) f[c] = image.pix(y, x, c);
            // 3x3 window stats with clamped borders
            for (int c = 0; c < ch; ++c) {
                double sum = 0.0, sum2 = 0.0;
                for (int dy = -1; dy <= 1; ++dy) {
                    const int yy = std::clamp(y + dy, 0, image.h - 1);
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int xx = std::clamp(x + dx, 0, image.w - 1);
                        const double v = image.pix(yy, xx, c);
                        sum += v;
                        sum2 += v * v;
                    }
                }
                const double mean = sum / 9.0;
                const double var = std::max(0.0, sum2 / 9.0 - mean * mean);
                f[ch + c] = static_cast<float>(mean);
                f[2 * ch + c] = static_cast<float>(std::sqrt(var));
            }
            f[3 * ch] = static_cast<float>(static_cast<double>(y) / image.h);
            f[3 * ch + 1] = static_cast<float>(static_cast<double>(x) / image.w);
        }
    }
    return feats;
}

namespace {

// Softmax of w . [f;1] into out[0..C).
inline void pixel_probs(const std::vector<double>& weights, int num_classes, int fcount,
                        const float* f, double* out) {
    double maxlogit = -1e300;
    for (int c = 0; c < num_classes; ++c) {
        const double* wrow = &weights[static_cast<size_t>(c) * (fcount + 1)];
        double z = wrow[fcount];
        for (int k = 0; k < fcount; ++k) z += wrow[k] * f[k];
        out[c] = z;
        maxlogit = std::max(maxlogit, z);
    }
    double total = 0.0;
    for (int c = 0; c < num_classes; ++c) {
        out[c] = std::exp(out[c] - maxlogit);
        total += out[c];
    }
    for (int c = 0; c < num_classes; ++c) out[c] /= total;
}

}  // namespace

ProbabilityMap LinearSegModel::predict_probs(const ImageSample& image) const {
    if (image.channels != image_channels_) {
        throw std::invalid_argument("image '" + image.id + "' has " +
                                    std::to_string(image.channels) + " channels, model expects " +
                                    std::to_string(image_channels_));
    }
    const int fcount = feature_count(image_channels_);
    const std::vector<float> feats = compute_pixel_features(image);

    ProbabilityMap map;
    map.image_id = image.id;
    map.h = image.h;
    map.w = image.w;
    map.num_classes = num_classes_;
    map.values.resize(static_cast<size_t>(image.h) * image.w * num_classes_);

    std::vector<double> p(static_cast<size_t>(num_classes_));
    for (size_t px = 0; px < static_cast<size_t>(image.h) * image.w; ++px) {
        pixel_probs(weights_, num_classes_, fcount, &feats[px * fcount], p.data());
        for (int c = 0; c < num_classes_; ++c) {
            map.values[px * num_classes_ + c] = static_cast<float>(p[c]);
        }
    }
    return map;
}

namespace {

struct FeatureCache {
    const Dataset& dataset;
    std::unordered_map<std::string, std::vector<float>> planes;

    explicit FeatureCache(const Dataset& ds) : dataset(ds) {}

    const std::vector<float>& get(const std::string& image_id) {
        auto it = planes.find(image_id);
        if (it != planes.end()) return it->second;
        return planes.emplace(image_id, compute_pixel_features(dataset.image(image_id)))
            .first->second;
    }
};

}  // namespace

LinearSegModel train_from_scratch(const Dataset& dataset, const Pool& pool,
                                  const TrainConfig& cfg) {
    if (pool.labeled.empty()) throw std::invalid_argument("labeled pool is empty");
    if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (cfg.learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be > 0");

    const int channels = dataset.images.front().channels;
    const int C = dataset.num_classes;
    const int fcount = LinearSegModel::feature_count(channels);

    std::vector<PatchRef> patches(pool.labeled.begin(), pool.labeled.end());
    size_t trainable_px = 0;
    for (const PatchRef& pr : patches) {
        const ImageSample& img = dataset.image(pr.image_id);
        if (!img.has_labels()) {
            throw std::invalid_argument("image '" + pr.image_id + "' has no labels");
        }
        for (int y = pr.top; y < pr.top + pr.height; ++y) {
            for (int x = pr.left; x < pr.left + pr.width; ++x) {
                if (img.label(y, x) != kIgnoreLabel) ++trainable_px;
            }
        }
    }
    if (trainable_px == 0) {
        throw std::invalid_argument("every pixel in the labeled pool carries the ignore label");
    }

    FeatureCache cache(dataset);
    LinearSegModel model(C, channels);
    model.init_uniform(cfg.seed);

    std::vector<double>& w = model.weights();
    const size_t nparams = w.size();
    std::vector<double> grad(nparams), m(nparams, 0.0), v(nparams, 0.0);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;

    std::vector<double> p(static_cast<size_t>(C));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto rng = fork_stream(cfg.seed, "train-epoch-" + std::to_string(epoch));
        std::vector<size_t> order(patches.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[uniform_index(rng, i)]);
        }

        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t end = std::min(order.size(), start + cfg.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            size_t npx = 0;
            for (size_t bi = start; bi < end; ++bi) {
                const PatchRef& pr = patches[order[bi]];
                const ImageSample& img = dataset.image(pr.image_id);
                const std::vector<float>& feats = cache.get(pr.image_id);
                for (int y = pr.top; y < pr.top + pr.height; ++y) {
                    for (int x = pr.left; x < pr.left + pr.width; ++x) {
                        const uint8_t label = img.label(y, x);
                        if (label == kIgnoreLabel) continue;
                        const float* f = &feats[(static_cast<size_t>(y) * img.w + x) * fcount];
                        pixel_probs(w, C, fcount, f, p.data());
                        for (int c = 0; c < C; ++c) {
                            const double g = p[c] - (c == label ? 1.0 : 0.0);
                            double* grow = &grad[static_cast<size_t>(c) * (fcount + 1)];
                            for (int k = 0; k < fcount; ++k) grow[k] += g * f[k];
                            grow[fcount] += g;
                        }
                        ++npx;
                    }
                }
            }
            if (npx == 0) continue;

            ++step;
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (size_t i = 0; i < nparams; ++i) {
                const double g = grad[i] / static_cast<double>(npx);
                m[i] = beta1 * m[i] + (1.0 - beta1) * g;
                v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
                w[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
            }
        }
    }
    return model;
}

double masked_loss(const LinearSegModel& model, const Dataset& dataset,
                   const std::set<PatchRef>& patches) {
    const int C = model.num_classes();
    const int fcount = LinearSegModel::feature_count(model.image_channels());
    FeatureCache cache(dataset);
    double total = 0.0;
    size_t npx = 0;
    std::vector<double> p(static_cast<size_t>(C));
    for (const PatchRef& pr : patches) {
        const ImageSample& img = dataset.image(pr.image_id);
        const std::vector<float>& feats = cache.get(pr.image_id);
        for (int y = pr.top; y < pr.top + pr.height; ++y) {
            for (int x = pr.left; x < pr.left + pr.width; ++x) {
                const uint8_t label = img.label(y, x);
                if (label == kIgnoreLabel) continue;
                const float* f = &feats[(static_cast<size_t>(y) * img.w + x) * fcount];
                pixel_probs(model.weights(), C, fcount, f, p.data());
                total += -std::log(std::max(p[label], 1e-300));
                ++npx;
            }
        }
    }
    if (npx == 0) throw std::invalid_argument("no unmasked pixels in the given patches");
    return total / static_cast<double>(npx);
}

FeatureVector extract_features(const ImageSample& image, const PatchRef& patch) {
    if (patch.top < 0 || patch.left < 0 || patch.top + patch.height > image.h ||
        patch.left + patch.width > image.w || patch.height < 1 || patch.width < 1) {
        throw std::invalid_argument("patch rect lies outside image '" + image.id + "'");
    }
    const int ch = image.channels;
    constexpr int kBins = 8;
    FeatureVector fv;
    fv.patch = patch;
    fv.values.assign(static_cast<size_t>(ch) * 10, 0.0);

    const double npx = static_cast<double>(patch.height) * patch.width;
    for (int c = 0; c < ch; ++c) {
        double sum = 0.0, sum2 = 0.0;
        double* hist = &fv.values[static_cast<size_t>(ch) * 2 + static_cast<size_t>(c) * kBins];
        for (int y = patch.top; y < patch.top + patch.height; ++y) {
            for (int x = patch.left; x < patch.left + patch.width; ++x) {
                const double v = image.pix(y, x, c);
                sum += v;
                sum2 += v * v;
                const int bin = std::min(kBins - 1, static_cast<int>(v * kBins));
                hist[bin] += 1.0;
            }
        }
        const double mean = sum / npx;
        fv.values[c] = mean;
        fv.values[ch + c] = std::sqrt(std::max(0.0, sum2 / npx - mean * mean));
        for (int b = 0; b < kBins; ++b) hist[b] /= npx;
    }
    return fv;
}

namespace {
constexpr uint32_t kModelMagic = 0x4d534731;  // "MSG1"
constexpr uint32_t kModelVersion = 1;
}  // namespace

void save_checkpoint(const LinearSegModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    const uint32_t header[4] = {kModelMagic, kModelVersion,
                                static_cast<uint32_t>(LinearSegModel::feature_count(model.image_channels())),
                                static_cast<uint32_t>(model.num_classes())};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(model.weights().data()),
              static_cast<std::streamsize>(model.weights().size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed for " + path);
}

LinearSegModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    uint32_t header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || header[0] != kModelMagic) throw std::runtime_error(path + ": not a model checkpoint");
    if (header[1] != kModelVersion) throw std::runtime_error(path + ": unsupported checkpoint version");
    const int fcount = static_cast<int>(header[2]);
    const int C = static_cast<int>(header[3]);
    if ((fcount - 2) % 3 != 0 || fcount < 5 || C < 2) {
        throw std::runtime_error(path + ": corrupt checkpoint header");
    }
    LinearSegModel model(C, (fcount - 2) / 3);
    in.read(reinterpret_cast<char*>(model.weights().data()),
            static_cast<std::streamsize>(model.weights().size() * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated checkpoint");
    return model;
}

}  // namespace meal
