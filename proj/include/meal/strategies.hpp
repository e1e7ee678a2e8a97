#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "meal/data_pool.hpp"
#include "meal/model.hpp"
#include "meal/uncertainty.hpp"
#include "meal/umap.hpp"

namespace meal {

enum class Strategy { random, entropy, meal, meal_ft, full };

Strategy strategy_from_name(const std::string& name);
std::string strategy_name(Strategy s);

struct AcquisitionConfig {
    Strategy strategy = Strategy::meal;
    int query_size = 32;        // N
    int informative_size = 200; // N_I
    int steps = 5;              // K
    int init_patches = 32;
    uint64_t seed = 0;
};

// n unlabeled patches drawn uniformly without replacement (all if fewer
// remain). Deterministic given seed, independent of any model state.
std::set<PatchRef> acquire_random(const Pool& pool, size_t n, uint64_t seed);

// Entropy scores over the unlabeled pool for every image that still has
// unlabeled patches, in descending-score tie-broken order.
std::vector<PatchScore> score_unlabeled(const SegModel& model, const Dataset& dataset,
                                        const Pool& pool);

// Pure exploitation: the n unlabeled patches with highest mean entropy.
std::set<PatchRef> acquire_entropy(const SegModel& model, const Dataset& dataset,
                                   const Pool& pool, size_t n);

// Exploration-exploitation: top n_informative entropy patches, embedded with
// the step-0 manifold map, then n picked by k-means++ seeding.
std::set<PatchRef> acquire_meal(const SegModel& model, const Dataset& dataset, const Pool& pool,
                                const UmapModel& phi, size_t n, size_t n_informative,
                                uint64_t seed);

// Ablation: the manifold map is refit per step on the informative samples
// only; no step-0 model is used.
std::set<PatchRef> acquire_meal_ft(const SegModel& model, const Dataset& dataset,
                                   const Pool& pool, size_t n, size_t n_informative,
                                   UmapConfig umap_cfg, uint64_t seed);

}  // namespace meal
