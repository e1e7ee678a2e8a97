#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace meal {

// Raw 8-bit portable anymap. channels is 1 (P5 graymap) or 3 (P6 pixmap).
struct PnmImage {
    int w = 0;
    int h = 0;
    int channels = 0;
    std::vector<uint8_t> data;  // h*w*channels, row-major, interleaved
};

// Reads a binary P5/P6 file with maxval 255. Throws std::runtime_error on
// missing file or malformed header.
PnmImage read_pnm(const std::string& path);

void write_ppm(const std::string& path, int w, int h, const std::vector<uint8_t>& rgb);
void write_pgm(const std::string& path, int w, int h, const std::vector<uint8_t>& gray);

}  // namespace meal
