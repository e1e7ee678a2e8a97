#include "meal/strategies.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "meal/kmeanspp.hpp"
#include "meal/rng.hpp"

namespace meal {

Strategy strategy_from_name(const std::string& name) {
    if (name == "random") return Strategy::random;
    if (name == "entropy") return Strategy::entropy;
    if (name == "meal") return Strategy::meal;
    if (name == "meal_ft") return Strategy::meal_ft;
    if (name == "full") return Strategy::full;
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::random: return "random";
        case Strategy::entropy: return "entropy";
        case Strategy::meal: return "meal";
        case Strategy::meal_ft: return "meal_ft";
        case Strategy::full: return "full";
    }
    return "?";
}

std::set<PatchRef> acquire_random(const Pool& pool, size_t n, uint64_t seed) {
    if (pool.unlabeled.empty()) throw std::invalid_argument("unlabeled pool is empty");
    std::vector<PatchRef> all(pool.unlabeled.begin(), pool.unlabeled.end());
    const size_t take = std::min(n, all.size());
    auto rng = fork_stream(seed, "acquire-random");
    // Partial Fisher-Yates over the sorted pool.
    for (size_t i = 0; i < take; ++i) {
        const size_t j = i + uniform_index(rng, all.size() - i);
        std::swap(all[i], all[j]);
    }
    return {all.begin(), all.begin() + take};
}

std::vector<PatchScore> score_unlabeled(const SegModel& model, const Dataset& dataset,
                                        const Pool& pool) {
    if (pool.unlabeled.empty()) throw std::invalid_argument("unlabeled pool is empty");
    std::unordered_set<std::string> image_ids;
    for (const PatchRef& p : pool.unlabeled) image_ids.insert(p.image_id);

    std::vector<PatchScore> scores;
    scores.reserve(pool.unlabeled.size());
    // Iterate images in dataset order to keep scoring deterministic.
    for (const ImageSample& img : dataset.images) {
        if (!image_ids.contains(img.id)) continue;
        const EntropyMap emap = entropy_map(model.predict_probs(img));
        for (PatchScore& ps : score_patches(emap, dataset.grid)) {
            if (pool.unlabeled.contains(ps.patch)) scores.push_back(std::move(ps));
        }
    }
    return scores;
}

std::set<PatchRef> acquire_entropy(const SegModel& model, const Dataset& dataset,
                                   const Pool& pool, size_t n) {
    const auto top = select_top_informative(score_unlabeled(model, dataset, pool), n);
    return {top.begin(), top.end()};
}

namespace {

std::vector<FeatureVector> informative_features(const SegModel& model, const Dataset& dataset,
                                                const Pool& pool, size_t n_informative) {
    const auto top =
        select_top_informative(score_unlabeled(model, dataset, pool), n_informative);
    std::vector<FeatureVector> feats;
    feats.reserve(top.size());
    for (const PatchRef& p : top) {
        feats.push_back(extract_features(dataset.image(p.image_id), p));
    }
    return feats;
}

std::set<PatchRef> pick_representative(const std::vector<EmbeddingPoint>& embedded, size_t n,
                                       uint64_t seed) {
    std::set<PatchRef> out;
    for (const EmbeddingPoint& pt : kmeanspp_select(embedded, n, seed).chosen) {
        out.insert(pt.patch);
    }
    return out;
}

}  // namespace

std::set<PatchRef> acquire_meal(const SegModel& model, const Dataset& dataset, const Pool& pool,
                                const UmapModel& phi, size_t n, size_t n_informative,
                                uint64_t seed) {
    const auto feats = informative_features(model, dataset, pool, n_informative);
    const auto embedded = transform(phi, feats);
    return pick_representative(embedded, std::min(n, embedded.size()), seed);
}

std::set<PatchRef> acquire_meal_ft(const SegModel& model, const Dataset& dataset,
                                   const Pool& pool, size_t n, size_t n_informative,
                                   UmapConfig umap_cfg, uint64_t seed) {
    const auto feats = informative_features(model, dataset, pool, n_informative);
    if (feats.size() < 3) {
        throw std::invalid_argument("meal_ft needs at least 3 informative patches to fit a map");
    }
    umap_cfg.seed = fork_seed(seed, "meal-ft-umap");
    const auto [phi, embedded] = fit_transform(feats, umap_cfg);
    return pick_representative(embedded, std::min(n, embedded.size()), seed);
}

}  // namespace meal
