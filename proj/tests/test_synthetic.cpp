#include <doctest.h>

#include <stdexcept>

#include "meal/synthetic.hpp"

using namespace meal;

TEST_CASE("generator is byte-deterministic for a fixed seed") {
    SceneSpec spec;
    const auto a = generate_synthetic(17, 3, spec);
    const auto b = generate_synthetic(17, 3, spec);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].pixels == b[i].pixels);
        CHECK(a[i].label_map == b[i].label_map);
    }
}

TEST_CASE("different seeds give different images") {
    SceneSpec spec;
    const auto a = generate_synthetic(17, 1, spec);
    const auto b = generate_synthetic(18, 1, spec);
    CHECK(a[0].pixels != b[0].pixels);
}

TEST_CASE("zero rarity weight removes the class entirely") {
    SceneSpec spec;
    spec.num_classes = 5;
    spec.shape_class_weights = {1.0, 1.0, 0.0, 1.0};  // class 3 never drawn
    for (const ImageSample& img : generate_synthetic(23, 20, spec)) {
        for (uint8_t v : img.label_map) CHECK(v != 3);
    }
}

TEST_CASE("generator rejects bad specs") {
    SceneSpec spec;
    SUBCASE("too few classes") {
        spec.num_classes = 1;
        CHECK_THROWS_AS(generate_synthetic(1, 1, spec), std::invalid_argument);
    }
    SUBCASE("dims not divisible by the default grid") {
        spec.width = 162;
        CHECK_THROWS_AS(generate_synthetic(1, 1, spec), std::invalid_argument);
    }
    SUBCASE("wrong weight count") {
        spec.shape_class_weights = {1.0};
        CHECK_THROWS_AS(generate_synthetic(1, 1, spec), std::invalid_argument);
    }
}

TEST_CASE("labels stay in range and every class can appear") {
    SceneSpec spec;
    spec.shape_class_weights = {1.0, 1.0, 1.0, 1.0};
    bool seen[5] = {false, false, false, false, false};
    for (const ImageSample& img : generate_synthetic(31, 10, spec)) {
        for (uint8_t v : img.label_map) {
            REQUIRE(v < 5);
            seen[v] = true;
        }
        for (float p : img.pixels) {
            REQUIRE(p >= 0.0f);
            REQUIRE(p <= 1.0f);
        }
    }
    for (bool s : seen) CHECK(s);
}

// Band pinned from a 10-seed measurement of the default spec (see the
// rare-fraction target estimate in SceneSpec): the measured mean frequency
// must stay within +-50% of the analytic target.
TEST_CASE("rare class pixel frequency stays near its configured target") {
    SceneSpec spec;
    const int rare = spec.rare_class();
    const double target = spec.rare_pixel_fraction_target();
    REQUIRE(target > 0.0);

    double total_px = 0.0, rare_px = 0.0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        for (const ImageSample& img : generate_synthetic(seed, 100, spec)) {
            total_px += static_cast<double>(img.label_map.size());
            for (uint8_t v : img.label_map) rare_px += (v == rare) ? 1.0 : 0.0;
        }
    }
    const double freq = rare_px / total_px;
    CHECK(freq > 0.5 * target);
    CHECK(freq < 1.5 * target);
}
