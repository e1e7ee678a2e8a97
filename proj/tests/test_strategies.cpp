#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <map>

#include "meal/harness.hpp"
#include "meal/kmeanspp.hpp"
#include "meal/rng.hpp"
#include "meal/strategies.hpp"
#include "meal/synthetic.hpp"
#include "test_util.hpp"

using namespace meal;

namespace {

// Deterministic stand-in model: per-image random simplex probabilities.
class RandomModel final : public SegModel {
public:
    RandomModel(int num_classes, uint64_t seed) : C_(num_classes), seed_(seed) {}

    ProbabilityMap predict_probs(const ImageSample& image) const override {
        auto rng = fork_stream(seed_, "planted-" + image.id);
        ProbabilityMap m;
        m.image_id = image.id;
        m.h = image.h;
        m.w = image.w;
        m.num_classes = C_;
        m.values.resize(static_cast<size_t>(image.h) * image.w * C_);
        for (size_t px = 0; px < static_cast<size_t>(image.h) * image.w; ++px) {
            double total = 0.0;
            std::vector<double> p(C_);
            for (int c = 0; c < C_; ++c) {
                p[c] = 0.05 + uniform_real(rng);
                total += p[c];
            }
            float fsum = 0.0f;
            for (int c = 0; c < C_; ++c) {
                m.values[px * C_ + c] = static_cast<float>(p[c] / total);
                fsum += m.values[px * C_ + c];
            }
            m.values[px * C_] += 1.0f - fsum;  // keep the float sum exact
        }
        return m;
    }
    int num_classes() const override { return C_; }

private:
    int C_;
    uint64_t seed_;
};

// Uniform-probability model: every patch scores identically.
class UniformModel final : public SegModel {
public:
    explicit UniformModel(int num_classes) : C_(num_classes) {}
    ProbabilityMap predict_probs(const ImageSample& image) const override {
        ProbabilityMap m;
        m.image_id = image.id;
        m.h = image.h;
        m.w = image.w;
        m.num_classes = C_;
        m.values.assign(static_cast<size_t>(image.h) * image.w * C_, 1.0f / C_);
        return m;
    }
    int num_classes() const override { return C_; }

private:
    int C_;
};

Dataset small_dataset(int n_images, uint64_t seed) {
    SceneSpec spec;
    spec.width = 64;
    spec.height = 64;
    Dataset ds;
    ds.grid = PatchGrid{4, 4, 0, 0};
    ds.num_classes = spec.num_classes;
    for (ImageSample& img : generate_synthetic(seed, n_images, spec)) {
        ds.images.push_back(std::move(img));
    }
    ds.rebuild_index();
    return ds;
}

UmapModel fit_phi(const Dataset& ds, const Pool& pool, uint64_t seed) {
    std::vector<FeatureVector> feats;
    auto collect = [&](const std::set<PatchRef>& refs) {
        for (const PatchRef& p : refs) feats.push_back(extract_features(ds.image(p.image_id), p));
    };
    collect(pool.labeled);
    collect(pool.unlabeled);
    UmapConfig cfg;
    cfg.n_epochs = 60;
    cfg.seed = seed;
    return fit(feats, cfg);
}

}  // namespace

TEST_CASE("acquire_random: clamp, determinism, and uniformity") {
    Dataset ds = small_dataset(2, 5);
    Pool pool = make_pool(ds);
    REQUIRE(pool.unlabeled.size() == 32);

    SUBCASE("n >= pool returns the whole pool") {
        CHECK(acquire_random(pool, 100, 1) == pool.unlabeled);
    }
    SUBCASE("same seed, same selection") {
        CHECK(acquire_random(pool, 5, 99) == acquire_random(pool, 5, 99));
    }
    SUBCASE("empty pool is rejected") {
        Pool empty;
        CHECK_THROWS_AS(acquire_random(empty, 1, 0), std::invalid_argument);
    }
    SUBCASE("n=1 draws are uniform within 3 standard errors") {
        // Reduce to 5 patches so the uniform probabilities are exactly 1/5.
        std::set<PatchRef> keep;
        auto it = pool.unlabeled.begin();
        for (int i = 0; i < 5; ++i) keep.insert(*it++);
        Pool five;
        five.unlabeled = keep;

        std::map<PatchRef, int> counts;
        const int trials = 10000;
        for (int t = 0; t < trials; ++t) {
            const auto sel = acquire_random(five, 1, static_cast<uint64_t>(t));
            ++counts[*sel.begin()];
        }
        const double se = std::sqrt(trials * 0.2 * 0.8);  // ~40
        for (const auto& [patch, c] : counts) {
            CHECK(std::abs(c - trials / 5.0) <= 3.0 * se);
        }
    }
}

TEST_CASE("acquire_entropy with a uniform model picks the tie-break prefix") {
    Dataset ds = small_dataset(2, 6);
    Pool pool = make_pool(ds);
    const UniformModel model(5);
    const auto sel = acquire_entropy(model, ds, pool, 4);
    auto expect = pool.unlabeled.begin();
    for (const PatchRef& p : sel) {
        CHECK(p == *expect);  // sets iterate in the same lexicographic order
        ++expect;
    }
}

TEST_CASE("a planted high-entropy patch is selected first") {
    Dataset ds = small_dataset(1, 7);
    Pool pool = make_pool(ds);

    // Near one-hot everywhere except one mixed-class patch.
    class PlantedModel final : public SegModel {
    public:
        ProbabilityMap predict_probs(const ImageSample& image) const override {
            ProbabilityMap m;
            m.image_id = image.id;
            m.h = image.h;
            m.w = image.w;
            m.num_classes = 5;
            m.values.assign(static_cast<size_t>(image.h) * image.w * 5, 0.0f);
            for (int y = 0; y < image.h; ++y) {
                for (int x = 0; x < image.w; ++x) {
                    const bool hot = y >= 16 && y < 32 && x >= 32 && x < 48;  // patch (1,2)
                    for (int c = 0; c < 5; ++c) {
                        m.at(y, x, c) = hot ? 0.2f : (c == 0 ? 0.96f : 0.01f);
                    }
                }
            }
            return m;
        }
        int num_classes() const override { return 5; }
    } model;

    const auto sel = acquire_entropy(model, ds, pool, 1);
    REQUIRE(sel.size() == 1);
    CHECK(sel.begin()->row == 1);
    CHECK(sel.begin()->col == 2);
}

TEST_CASE("strategy invariants: subset of unlabeled with clamped size") {
    Dataset ds = small_dataset(3, 8);
    Pool pool = make_pool(ds);
    pool = reveal_labels(pool, acquire_random(pool, 10, 3));
    const RandomModel model(5, 11);
    const UmapModel phi = fit_phi(ds, pool, 2);

    for (size_t n : {size_t{1}, size_t{5}, size_t{100}}) {
        for (int variant = 0; variant < 4; ++variant) {
            std::set<PatchRef> sel;
            switch (variant) {
                case 0: sel = acquire_random(pool, n, 4); break;
                case 1: sel = acquire_entropy(model, ds, pool, n); break;
                case 2: sel = acquire_meal(model, ds, pool, phi, n, std::max(n, size_t{8}), 4); break;
                case 3:
                    sel = acquire_meal_ft(model, ds, pool, n, std::max(n, size_t{8}),
                                          UmapConfig{.n_epochs = 40}, 4);
                    break;
            }
            CHECK(sel.size() == std::min(n, pool.unlabeled.size()));
            for (const PatchRef& p : sel) CHECK(pool.unlabeled.contains(p));
        }
    }
}

TEST_CASE("meal and meal_ft collapse to entropy when N_I = N (20 random states)") {
    for (uint64_t trial = 0; trial < 20; ++trial) {
        Dataset ds = small_dataset(3, 100 + trial);
        Pool pool = make_pool(ds);
        auto trng = fork_stream(trial, "t");
        const size_t labeled = 4 + uniform_index(trng, 10);
        const auto init = acquire_random(pool, labeled, trial);
        pool = reveal_labels(pool, init);

        const RandomModel model(5, 500 + trial);
        const UmapModel phi = fit_phi(ds, pool, trial);
        const size_t n = 3 + trial % 6;

        const auto entropy_sel = acquire_entropy(model, ds, pool, n);
        const auto meal_sel = acquire_meal(model, ds, pool, phi, n, n, trial);
        CHECK(meal_sel == entropy_sel);

        const auto ft_sel = acquire_meal_ft(model, ds, pool, n, n,
                                            UmapConfig{.n_epochs = 40}, trial);
        CHECK(ft_sel == entropy_sel);
    }
}

TEST_CASE("meal_ft is deterministic and rejects tiny informative sets") {
    Dataset ds = small_dataset(2, 9);
    Pool pool = make_pool(ds);
    const RandomModel model(5, 1);

    const auto a = acquire_meal_ft(model, ds, pool, 4, 12, UmapConfig{.n_epochs = 40}, 77);
    const auto b = acquire_meal_ft(model, ds, pool, 4, 12, UmapConfig{.n_epochs = 40}, 77);
    CHECK(a == b);

    CHECK_THROWS_AS(acquire_meal_ft(model, ds, pool, 1, 2, UmapConfig{}, 0),
                    std::invalid_argument);
}

TEST_CASE("meal_ft differs from meal on a benchmark-style state") {
    Dataset ds = small_dataset(8, 40);
    Pool pool = make_pool(ds);
    pool = reveal_labels(pool, acquire_random(pool, 8, 1));
    const RandomModel model(5, 2);
    const UmapModel phi = fit_phi(ds, pool, 3);

    bool any_diff = false;
    for (uint64_t seed = 0; seed < 5 && !any_diff; ++seed) {
        const auto meal_sel = acquire_meal(model, ds, pool, phi, 8, 60, seed);
        const auto ft_sel =
            acquire_meal_ft(model, ds, pool, 8, 60, UmapConfig{.n_epochs = 60}, seed);
        any_diff = meal_sel != ft_sel;
    }
    CHECK(any_diff);
}

TEST_CASE("degenerate pool of identical patches still yields a deterministic selection") {
    Dataset ds;
    ds.grid = PatchGrid{2, 2, 0, 0};
    ds.num_classes = 2;
    ds.images.push_back(test_util::flat_image("flat-a", 8, 8, 0.5f, 0));
    ds.images.push_back(test_util::flat_image("flat-b", 8, 8, 0.5f, 0));
    ds.rebuild_index();
    Pool pool = make_pool(ds);

    const UniformModel model(2);
    const UmapModel phi = fit_phi(ds, pool, 1);
    const auto a = acquire_meal(model, ds, pool, phi, 3, 8, 9);
    const auto b = acquire_meal(model, ds, pool, phi, 3, 8, 9);
    CHECK(a == b);
    CHECK(a.size() == 3);
}

TEST_CASE("two-cluster embedding geometry: k-means++ picks one seed per cluster") {
    // Planted geometry standing in for the informative-patch embeddings: two
    // tight clusters far apart. The D^2 chain makes a split pick overwhelming.
    auto rng = fork_stream(77, "planted");
    std::vector<EmbeddingPoint> pts;
    for (int i = 0; i < 20; ++i) {
        EmbeddingPoint p;
        const double base = i < 10 ? 0.0 : 100.0;
        p.values = {base + normal(rng), base + normal(rng)};
        p.patch = PatchRef{"p" + std::to_string(i), 0, 0, 0, 0, 1, 1};
        pts.push_back(std::move(p));
    }
    int split = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const SeedSelection sel = kmeanspp_select(pts, 2, static_cast<uint64_t>(t));
        const bool a_low = sel.chosen[0].values[0] < 50.0;
        const bool b_low = sel.chosen[1].values[0] < 50.0;
        split += (a_low != b_low) ? 1 : 0;
    }
    CHECK(split >= 950);
}

TEST_CASE("rank-based selection is invariant under monotone score rescaling") {
    auto rng = fork_stream(13, "mono");
    std::vector<PatchScore> scores;
    for (int i = 0; i < 40; ++i) {
        scores.push_back(
            PatchScore{PatchRef{"i" + std::to_string(i), 0, 0, 0, 0, 1, 1}, uniform_real(rng)});
    }
    auto rescaled = scores;
    for (PatchScore& s : rescaled) s.score = std::exp(3.0 * s.score) + 1.0;
    CHECK(select_top_informative(scores, 12) == select_top_informative(rescaled, 12));
}
