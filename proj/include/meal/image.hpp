#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace meal {

// Label value marking pixels excluded from training loss and from evaluation.
inline constexpr uint8_t kIgnoreLabel = 255;

// One image with an optional per-pixel label map. Pixels are row-major,
// channel-interleaved, values in [0,1].
struct ImageSample {
    std::string id;
    int h = 0;
    int w = 0;
    int channels = 0;
    std::vector<float> pixels;      // h*w*channels
    std::vector<uint8_t> label_map; // empty, or h*w class indices (kIgnoreLabel allowed)

    bool has_labels() const { return !label_map.empty(); }

    float pix(int y, int x, int c) const {
        return pixels[(static_cast<size_t>(y) * w + x) * channels + c];
    }
    float& pix(int y, int x, int c) {
        return pixels[(static_cast<size_t>(y) * w + x) * channels + c];
    }
    uint8_t label(int y, int x) const {
        return label_map[static_cast<size_t>(y) * w + x];
    }
};

}  // namespace meal
