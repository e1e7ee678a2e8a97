#pragma once

#include <compare>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "meal/image.hpp"

namespace meal {

// One grid tile of one image. Identity is (image_id, row, col); the pixel
// rect is carried along so consumers never re-derive geometry.
struct PatchRef {
    std::string image_id;
    int row = 0;
    int col = 0;
    int top = 0;
    int left = 0;
    int height = 0;
    int width = 0;

    friend bool operator==(const PatchRef& a, const PatchRef& b) {
        return a.image_id == b.image_id && a.row == b.row && a.col == b.col;
    }
    // Lexicographic (image_id, row, col): the deterministic tie-break order
    // used everywhere selections need reproducible ordering.
    friend bool operator<(const PatchRef& a, const PatchRef& b) {
        if (int c = a.image_id.compare(b.image_id); c != 0) return c < 0;
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    }
};

// Fixed tiling grid for one experiment. patch_h/patch_w are filled when the
// first image is tiled and every later image must agree, so patch scores stay
// comparable across the whole pool.
struct PatchGrid {
    int rows = 4;
    int cols = 4;
    int patch_h = 0;
    int patch_w = 0;
};

// Tiles an image into rows*cols patches. Throws std::invalid_argument when
// the image dimensions are not divisible by the grid or disagree with the
// patch dimensions already locked into the grid.
std::vector<PatchRef> tile_image(const ImageSample& image, PatchGrid& grid);

// Disjoint labeled / unlabeled partition of all patches plus the most recent
// query set.
struct Pool {
    std::set<PatchRef> labeled;
    std::set<PatchRef> unlabeled;
    std::set<PatchRef> query;

    size_t total() const { return labeled.size() + unlabeled.size(); }
};

// Images plus the grid and class count they were loaded under.
struct Dataset {
    std::vector<ImageSample> images;
    PatchGrid grid;
    int num_classes = 0;
    std::unordered_map<std::string, size_t> index;  // image_id -> position

    const ImageSample& image(const std::string& id) const;
    void rebuild_index();
};

// Reads a manifest of image<TAB>label lines (paths relative to the manifest's
// directory unless absolute). Images are binary P6 pixmaps, labels binary P5
// graymaps whose pixel value is the class index (255 = ignore). Every image
// is tiled into grid.rows*grid.cols patches, all initially unlabeled.
std::pair<Dataset, Pool> load_dataset(const std::string& manifest_path, PatchGrid grid,
                                      int num_classes);

// Pool over every patch of every image in the dataset, all unlabeled. Locks
// the patch dimensions into dataset.grid.
Pool make_pool(Dataset& dataset);

// Simulated oracle: returns a pool with `query` moved from unlabeled to
// labeled and recorded as the query set. Rejects (throws
// std::invalid_argument) if any patch is not currently unlabeled; the input
// pool is never modified.
Pool reveal_labels(const Pool& pool, const std::set<PatchRef>& query);

}  // namespace meal
