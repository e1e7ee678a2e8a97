#pragma once

#include <cstdint>
#include <vector>

#include "meal/image.hpp"

namespace meal {

// Parameters of the procedural scene generator. Class 0 is the textured
// background; classes 1..num_classes-1 are shape classes drawn with relative
// frequency shape_class_weights.
//
// The class with the smallest weight is the rare class. Its color is the
// midpoint of the first two common shape colors, so a model trained without
// it is genuinely uncertain there instead of confidently wrong, and each
// image additionally carries rare_shapes_per_image small planted shapes of
// that class (skipped when its weight is 0). Diversity-aware acquisition
// then has something to find on every image while uniform sampling dilutes
// its label budget.
struct SceneSpec {
    int width = 160;
    int height = 120;
    int num_classes = 5;
    int shapes_per_image = 7;
    std::vector<double> shape_class_weights;  // size num_classes-1; default {1,..,1,0.12}
    double noise_level = 0.06;
    double min_shape_frac = 0.10;  // shape half-extent range, fraction of min(h,w)
    double max_shape_frac = 0.28;
    int rare_shapes_per_image = 1;
    double rare_min_frac = 0.08;  // planted rare shapes run smaller
    double rare_max_frac = 0.16;

    std::vector<double> effective_weights() const;

    // Analytic estimate of the pixel fraction occupied by the rare shape
    // class (planted shapes plus its share of the weighted draw), ignoring
    // shape overlap and border clipping. Used as the target the generator is
    // measured against.
    double rare_pixel_fraction_target() const;
    int rare_class() const;
};

// Deterministic scene synthesis: same (seed, n_images, spec) produces
// byte-identical images and labels. Labels are pixel-exact.
std::vector<ImageSample> generate_synthetic(uint64_t seed, int n_images, const SceneSpec& spec);

}  // namespace meal
