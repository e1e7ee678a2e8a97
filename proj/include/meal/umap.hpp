#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "meal/matrix.hpp"
#include "meal/model.hpp"

namespace meal {

struct UmapConfig {
    int n_neighbors = 15;
    int out_dim = 2;
    double min_dist = 0.1;
    int n_epochs = 200;
    int negative_samples = 5;
    double learning_rate = 1.0;
    uint64_t seed = 0;
    // 1 = deterministic single-threaded layout optimization (the default and
    // the only mode used by tests); >1 = asynchronous per-edge updates that
    // give up bitwise reproducibility.
    int threads = 1;
};

struct EmbeddingPoint {
    std::vector<double> values;
    PatchRef patch;
};

// Undirected fuzzy-union edge; endpoints a < b, weight in (0,1].
struct UmapEdge {
    int a = 0;
    int b = 0;
    double weight = 0.0;
};

// The fitted manifold map: kNN graph, local scaling, fuzzy weights, and the
// optimized low-dimensional layout. transform() embeds new points against the
// frozen training layout.
struct UmapModel {
    Matrix train_features;  // n x d
    int n_neighbors = 0;    // effective value after clamping to n-1
    std::vector<std::vector<int>> knn_ids;
    std::vector<std::vector<double>> knn_dists;
    std::vector<double> rho;
    std::vector<double> sigma;
    std::vector<UmapEdge> edges;
    Matrix layout;  // n x out_dim
    double curve_a = 0.0;
    double curve_b = 0.0;
    double objective_epoch0 = 0.0;
    double objective_final = 0.0;
    UmapConfig config;

    // Symmetrized membership weight, 0 when the pair is not a retained edge.
    double fuzzy_weight(int i, int j) const;
};

// Fits the map on an n x d feature matrix. Requires n >= 3 and finite
// features; n_neighbors is clamped to n-1. Deterministic given cfg.seed when
// cfg.threads == 1.
UmapModel umap_fit(const Matrix& features, const UmapConfig& cfg);

// Embeds query rows against the frozen training layout. Each query starts at
// the membership-weighted mean of its nearest training points and is refined
// for n_epochs/4 rounds. Deterministic given (model, seed).
Matrix umap_transform(const UmapModel& model, const Matrix& queries);

// Fit on exactly the given features; returned matrix is the fitted layout.
std::pair<UmapModel, Matrix> umap_fit_transform(const Matrix& features, const UmapConfig& cfg);

// Wrappers carrying PatchRefs through.
UmapModel fit(const std::vector<FeatureVector>& features, const UmapConfig& cfg);
std::vector<EmbeddingPoint> transform(const UmapModel& model,
                                      const std::vector<FeatureVector>& features);
std::pair<UmapModel, std::vector<EmbeddingPoint>> fit_transform(
    const std::vector<FeatureVector>& features, const UmapConfig& cfg);

// Least-squares fit of the low-dimensional membership curve 1/(1 + a x^(2b))
// to the min_dist target curve over 300 sampled distances in [0, 3].
std::pair<double, double> fit_curve_params(double min_dist);

// Binary persistence so the step-0 fit can be cached across runs.
void save_umap(const UmapModel& model, const std::string& path);
UmapModel load_umap(const std::string& path);

}  // namespace meal
