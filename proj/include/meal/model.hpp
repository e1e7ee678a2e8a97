#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "meal/data_pool.hpp"
#include "meal/image.hpp"

namespace meal {

struct TrainConfig {
    int epochs = 25;
    int batch_size = 8;           // patches per minibatch
    double learning_rate = 0.001;
    uint64_t seed = 0;
};

// Per-pixel class probabilities, h*w*C interleaved. Every pixel's class
// vector sums to 1 within 1e-6.
struct ProbabilityMap {
    std::string image_id;
    int h = 0;
    int w = 0;
    int num_classes = 0;
    std::vector<float> values;

    float at(int y, int x, int c) const {
        return values[(static_cast<size_t>(y) * w + x) * num_classes + c];
    }
    float& at(int y, int x, int c) {
        return values[(static_cast<size_t>(y) * w + x) * num_classes + c];
    }
};

// Fixed patch descriptor used as the input space of the manifold map.
struct FeatureVector {
    std::vector<double> values;
    PatchRef patch;
};

// Segmentation model interface; strategies depend only on this.
class SegModel {
public:
    virtual ~SegModel() = default;
    virtual ProbabilityMap predict_probs(const ImageSample& image) const = 0;
    virtual int num_classes() const = 0;
};

// Reference model: multinomial logistic regression per pixel over local
// features (raw channels, 3x3 window mean and std per channel, normalized
// row/col coordinates). Weights are C x (F+1), last column the bias.
class LinearSegModel final : public SegModel {
public:
    LinearSegModel() = default;
    LinearSegModel(int num_classes, int image_channels);  // zero-initialized

    static int feature_count(int image_channels) { return 3 * image_channels + 2; }

    ProbabilityMap predict_probs(const ImageSample& image) const override;
    int num_classes() const override { return num_classes_; }
    int image_channels() const { return image_channels_; }

    void init_uniform(uint64_t seed, double radius = 0.01);

    std::vector<double>& weights() { return weights_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    int num_classes_ = 0;
    int image_channels_ = 0;
    std::vector<double> weights_;  // num_classes * (feature_count + 1)
};

// Per-pixel feature planes for one image, row-major, stride feature_count.
std::vector<float> compute_pixel_features(const ImageSample& image);

// Trains a fresh LinearSegModel on the labeled patches of the pool with
// minibatch updates (Adam step rule) on cross-entropy; pixels outside labeled
// patches and ignore-labeled pixels contribute nothing. Deterministic given
// cfg.seed. Throws std::invalid_argument on an empty labeled pool or when
// every labeled pixel is ignored.
LinearSegModel train_from_scratch(const Dataset& dataset, const Pool& pool,
                                  const TrainConfig& cfg);

// Mean cross-entropy of the model over the non-ignored pixels of the given
// patches. Used by training diagnostics and tests.
double masked_loss(const LinearSegModel& model, const Dataset& dataset,
                   const std::set<PatchRef>& patches);

// Patch descriptor: per-channel mean, per-channel std, and an 8-bin
// per-channel intensity histogram (each channel's bins sum to 1), giving
// d = channels * 10. Independent of any trained model.
FeatureVector extract_features(const ImageSample& image, const PatchRef& patch);

// Flat binary checkpoint: 16-byte header (magic, version, feature count,
// class count) followed by the weight matrix.
void save_checkpoint(const LinearSegModel& model, const std::string& path);
LinearSegModel load_checkpoint(const std::string& path);

}  // namespace meal
