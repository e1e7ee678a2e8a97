#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "meal/matrix.hpp"
#include "meal/umap.hpp"

namespace meal {

// Result of a k-means++ seeding pass: the chosen input points in selection
// order. The seeds themselves are the selected samples; no Lloyd refinement
// is run, so every "centroid" is an actual labelable point.
struct SeedSelection {
    std::vector<EmbeddingPoint> chosen;
    uint64_t rng_seed = 0;
};

// D^2 seeding over row vectors: first index uniform, each next drawn with
// probability proportional to the squared distance to the nearest already
// chosen row. Zero-distance rows carry zero probability; when every remaining
// distance is zero the draw falls back to uniform over the unchosen rows.
// Sampling is by inverse-CDF over the input order, so it is deterministic
// given the stream and scale-equivariant.
std::vector<size_t> kmeanspp_indices(const Matrix& points, size_t n_select,
                                     std::mt19937_64& rng);

// EmbeddingPoint front end; n_select >= |points| returns all points.
// Throws std::invalid_argument on empty input or n_select == 0.
SeedSelection kmeanspp_select(const std::vector<EmbeddingPoint>& points, size_t n_select,
                              uint64_t seed);

}  // namespace meal
