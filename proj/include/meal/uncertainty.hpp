#pragma once

#include <string>
#include <vector>

#include "meal/data_pool.hpp"
#include "meal/model.hpp"

namespace meal {

// Per-pixel Shannon entropy of a probability map, natural log. Values lie in
// [0, ln C].
struct EntropyMap {
    std::string image_id;
    int h = 0;
    int w = 0;
    std::vector<double> values;  // h*w

    double at(int y, int x) const { return values[static_cast<size_t>(y) * w + x]; }
};

struct PatchScore {
    PatchRef patch;
    double score = 0.0;  // mean pixel entropy of the patch
};

// H = -sum_c p_c ln p_c with 0 ln 0 := 0. Throws std::invalid_argument on
// NaN or negative probabilities.
EntropyMap entropy_map(const ProbabilityMap& probs);

// Mean pixel entropy per grid patch. The grid must tile the map exactly.
std::vector<PatchScore> score_patches(const EntropyMap& emap, const PatchGrid& grid);

// The n highest-scoring patches in descending score order, ties broken by
// (image_id, row, col). Returns everything when n exceeds the input size;
// throws std::invalid_argument when n is zero.
std::vector<PatchRef> select_top_informative(std::vector<PatchScore> scores, size_t n);

}  // namespace meal
