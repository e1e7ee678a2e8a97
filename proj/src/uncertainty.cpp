#include "meal/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meal {

EntropyMap entropy_map(const ProbabilityMap& probs) {
    const int C = probs.num_classes;
    if (C < 1) throw std::invalid_argument("probability map has no classes");
    const double max_entropy = std::log(static_cast<double>(C));

    EntropyMap emap;
    emap.image_id = probs.image_id;
    emap.h = probs.h;
    emap.w = probs.w;
    emap.values.resize(static_cast<size_t>(probs.h) * probs.w);

    const size_t npx = emap.values.size();
    for (size_t px = 0; px < npx; ++px) {
        double h = 0.0;
        double sum = 0.0;
        for (int c = 0; c < C; ++c) {
            const double p = probs.values[px * C + c];
            if (std::isnan(p) || p < 0.0) {
                throw std::invalid_argument("probability map for '" + probs.image_id +
                                            "' contains NaN or negative entries");
            }
            sum += p;
            if (p > 0.0) h -= p * std::log(p);
        }
        if (std::abs(sum - 1.0) > 1e-4) {
            throw std::invalid_argument("probability map for '" + probs.image_id +
                                        "' violates the simplex constraint");
        }
        emap.values[px] = std::clamp(h, 0.0, max_entropy);
    }
    return emap;
}

std::vector<PatchScore> score_patches(const EntropyMap& emap, const PatchGrid& grid) {
    if (grid.rows < 1 || grid.cols < 1 || emap.h % grid.rows != 0 || emap.w % grid.cols != 0) {
        throw std::invalid_argument("grid does not tile entropy map for '" + emap.image_id + "'");
    }
    const int ph = emap.h / grid.rows;
    const int pw = emap.w / grid.cols;
    if ((grid.patch_h != 0 && grid.patch_h != ph) || (grid.patch_w != 0 && grid.patch_w != pw)) {
        throw std::invalid_argument("entropy map shape disagrees with grid patch dims");
    }

    std::vector<PatchScore> scores;
    scores.reserve(static_cast<size_t>(grid.rows) * grid.cols);
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            double sum = 0.0;
            for (int y = r * ph; y < (r + 1) * ph; ++y) {
                for (int x = c * pw; x < (c + 1) * pw; ++x) {
                    sum += emap.at(y, x);
                }
            }
            scores.push_back(PatchScore{PatchRef{emap.image_id, r, c, r * ph, c * pw, ph, pw},
                                        sum / (static_cast<double>(ph) * pw)});
        }
    }
    return scores;
}

std::vector<PatchRef> select_top_informative(std::vector<PatchScore> scores, size_t n) {
    if (n == 0) throw std::invalid_argument("n_informative must be >= 1");
    std::sort(scores.begin(), scores.end(), [](const PatchScore& a, const PatchScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.patch < b.patch;
    });
    const size_t take = std::min(n, scores.size());
    std::vector<PatchRef> out;
    out.reserve(take);
    for (size_t i = 0; i < take; ++i) out.push_back(scores[i].patch);
    return out;
}

}  // namespace meal
