#include "meal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meal/rng.hpp"

namespace meal {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Rgb {
    double r, g, b;
};

// Fixed, well-separated palette for the background and common shape classes.
Rgb base_color(int c) {
    static const Rgb palette[] = {
        {0.45, 0.47, 0.43},  // 0 background
        {0.80, 0.16, 0.16},  // 1 red
        {0.15, 0.68, 0.22},  // 2 green
        {0.16, 0.22, 0.82},  // 3 blue
        {0.84, 0.78, 0.12},  // 4 yellow
        {0.75, 0.15, 0.72},  // 5 magenta
        {0.10, 0.70, 0.72},  // 6 cyan
        {0.88, 0.52, 0.10},  // 7 orange
    };
    if (c < 8) return palette[c];
    const double hue = std::fmod(0.61803398875 * c, 1.0) * 2.0 * kPi;
    return {0.5 + 0.4 * std::cos(hue), 0.5 + 0.4 * std::cos(hue - 2.0),
            0.5 + 0.4 * std::cos(hue + 2.0)};
}

// The rare class is colored at the midpoint of the first two common shape
// colors: any linear decision between those two classes is ambivalent there,
// which keeps unseen rare pixels high-entropy rather than confidently wrong.
Rgb class_color(int c, int rare) {
    if (c == rare && rare >= 1) {
        const Rgb a = base_color(1 == rare ? 2 : 1);
        const Rgb b = base_color(2 == rare ? 3 : (1 == rare ? 3 : 2));
        return {0.5 * (a.r + b.r), 0.5 * (a.g + b.g), 0.5 * (a.b + b.b)};
    }
    return base_color(c);
}

int sample_weighted(std::mt19937_64& rng, const std::vector<double>& weights, double total) {
    const double target = uniform_real(rng) * total;
    double cum = 0.0;
    int last_positive = -1;
    for (size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i];
        if (weights[i] > 0.0) {
            last_positive = static_cast<int>(i);
            if (cum > target) return static_cast<int>(i);
        }
    }
    return last_positive;  // fp slack at the top of the CDF
}

struct ShapeDraw {
    int cls = 0;
    bool ellipse = false;
    double cx = 0, cy = 0, ax = 0, ay = 0;
    Rgb color{};
};

void draw_shape(ImageSample& img, const ShapeDraw& s) {
    const int y0 = std::max(0, static_cast<int>(std::floor(s.cy - s.ay)));
    const int y1 = std::min(img.h - 1, static_cast<int>(std::ceil(s.cy + s.ay)));
    const int x0 = std::max(0, static_cast<int>(std::floor(s.cx - s.ax)));
    const int x1 = std::min(img.w - 1, static_cast<int>(std::ceil(s.cx + s.ax)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = (x + 0.5 - s.cx) / s.ax;
            const double dy = (y + 0.5 - s.cy) / s.ay;
            const bool inside = s.ellipse ? (dx * dx + dy * dy <= 1.0)
                                          : (std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0);
            if (!inside) continue;
            img.pix(y, x, 0) = static_cast<float>(s.color.r);
            img.pix(y, x, 1) = static_cast<float>(s.color.g);
            img.pix(y, x, 2) = static_cast<float>(s.color.b);
            img.label_map[static_cast<size_t>(y) * img.w + x] = static_cast<uint8_t>(s.cls);
        }
    }
}

}  // namespace

std::vector<double> SceneSpec::effective_weights() const {
    if (!shape_class_weights.empty()) {
        if (static_cast<int>(shape_class_weights.size()) != num_classes - 1) {
            throw std::invalid_argument("shape_class_weights must have num_classes-1 entries");
        }
        for (double w : shape_class_weights) {
            if (w < 0.0) throw std::invalid_argument("shape class weights must be >= 0");
        }
        return shape_class_weights;
    }
    std::vector<double> w(static_cast<size_t>(num_classes - 1), 1.0);
    if (w.size() > 1) w.back() = 0.12;
    return w;
}

int SceneSpec::rare_class() const {
    const auto w = effective_weights();
    size_t best = 0;
    for (size_t i = 1; i < w.size(); ++i) {
        if (w[i] < w[best]) best = i;
    }
    return static_cast<int>(best) + 1;
}

double SceneSpec::rare_pixel_fraction_target() const {
    const auto w = effective_weights();
    double total = 0.0;
    for (double v : w) total += v;
    const double w_rare = w[static_cast<size_t>(rare_class()) - 1];
    if (w_rare <= 0.0) return 0.0;

    const double img_area = static_cast<double>(width) * static_cast<double>(height);
    auto mean_area = [&](double lo, double hi) {
        const double half = 0.5 * (lo + hi) * 0.5 * std::min(width, height);
        return 0.5 * (4.0 + kPi) * half * half;  // rects and ellipses equally likely
    };
    const double drawn = total > 0.0
                             ? (w_rare / total) * shapes_per_image *
                                   mean_area(min_shape_frac, max_shape_frac)
                             : 0.0;
    const double planted = rare_shapes_per_image * mean_area(rare_min_frac, rare_max_frac);
    return (drawn + planted) / img_area;
}

std::vector<ImageSample> generate_synthetic(uint64_t seed, int n_images, const SceneSpec& spec) {
    if (spec.num_classes < 2) throw std::invalid_argument("need at least 2 classes");
    if (spec.width % 4 != 0 || spec.height % 4 != 0) {
        throw std::invalid_argument("scene dims must be divisible by the default 4x4 grid");
    }
    if (spec.min_shape_frac <= 0.0 || spec.max_shape_frac < spec.min_shape_frac ||
        spec.rare_min_frac <= 0.0 || spec.rare_max_frac < spec.rare_min_frac) {
        throw std::invalid_argument("bad shape size range");
    }
    const std::vector<double> weights = spec.effective_weights();
    double total_weight = 0.0;
    for (double v : weights) total_weight += v;
    const int rare = spec.rare_class();
    const bool rare_enabled = weights[static_cast<size_t>(rare) - 1] > 0.0;

    std::vector<ImageSample> images;
    images.reserve(static_cast<size_t>(n_images));

    for (int i = 0; i < n_images; ++i) {
        auto rng = fork_stream(seed, "synth-image-" + std::to_string(i));

        ImageSample img;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "synth-%04d", i);
        img.id = buf;
        img.h = spec.height;
        img.w = spec.width;
        img.channels = 3;
        img.pixels.resize(static_cast<size_t>(img.h) * img.w * 3);
        img.label_map.assign(static_cast<size_t>(img.h) * img.w, 0);

        // Textured background: base color plus two low-frequency waves.
        const Rgb base = base_color(0);
        const double fx = 1.0 + uniform_index(rng, 3);
        const double fy = 1.0 + uniform_index(rng, 3);
        const double phx = uniform_real(rng) * 2.0 * kPi;
        const double phy = uniform_real(rng) * 2.0 * kPi;
        for (int y = 0; y < img.h; ++y) {
            for (int x = 0; x < img.w; ++x) {
                const double t = 0.05 * std::sin(2.0 * kPi * fx * x / img.w + phx) *
                                 std::sin(2.0 * kPi * fy * y / img.h + phy);
                img.pix(y, x, 0) = static_cast<float>(base.r + t);
                img.pix(y, x, 1) = static_cast<float>(base.g + t);
                img.pix(y, x, 2) = static_cast<float>(base.b + t);
            }
        }

        auto random_shape = [&](int cls, double lo_frac, double hi_frac) {
            const double half_lo = lo_frac * 0.5 * std::min(img.w, img.h);
            const double half_hi = hi_frac * 0.5 * std::min(img.w, img.h);
            ShapeDraw s;
            s.cls = cls;
            s.ellipse = uniform_real(rng) < 0.5;
            s.cx = uniform_real(rng) * img.w;
            s.cy = uniform_real(rng) * img.h;
            s.ax = uniform_real(rng, half_lo, half_hi);
            s.ay = uniform_real(rng, half_lo, half_hi);
            const Rgb c0 = class_color(cls, rare);
            s.color = {c0.r + uniform_real(rng, -0.08, 0.08),
                       c0.g + uniform_real(rng, -0.08, 0.08),
                       c0.b + uniform_real(rng, -0.08, 0.08)};
            return s;
        };

        // Common shapes, later ones drawn on top.
        for (int s = 0; s < spec.shapes_per_image; ++s) {
            if (total_weight <= 0.0) break;
            const int cls = 1 + sample_weighted(rng, weights, total_weight);
            draw_shape(img, random_shape(cls, spec.min_shape_frac, spec.max_shape_frac));
        }
        // Planted rare shapes, drawn last so they are never fully occluded.
        if (rare_enabled) {
            for (int s = 0; s < spec.rare_shapes_per_image; ++s) {
                draw_shape(img, random_shape(rare, spec.rare_min_frac, spec.rare_max_frac));
            }
        }

        // Per-pixel noise over everything; labels stay exact.
        for (float& v : img.pixels) {
            v = static_cast<float>(std::clamp(
                static_cast<double>(v) + uniform_real(rng, -spec.noise_level, spec.noise_level),
                0.0, 1.0));
        }

        images.push_back(std::move(img));
    }
    return images;
}

}  // namespace meal
