#include "meal/data_pool.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "meal/pnm_io.hpp"

namespace meal {

std::vector<PatchRef> tile_image(const ImageSample& image, PatchGrid& grid) {
    if (grid.rows < 1 || grid.cols < 1) {
        throw std::invalid_argument("grid must have at least 1 row and 1 column");
    }
    if (image.h % grid.rows != 0 || image.w % grid.cols != 0) {
        throw std::invalid_argument("image '" + image.id + "' (" + std::to_string(image.h) +
                                    "x" + std::to_string(image.w) +
                                    ") is not divisible by the " + std::to_string(grid.rows) +
                                    "x" + std::to_string(grid.cols) + " grid");
    }
    const int ph = image.h / grid.rows;
    const int pw = image.w / grid.cols;
    if (grid.patch_h == 0 && grid.patch_w == 0) {
        grid.patch_h = ph;
        grid.patch_w = pw;
    } else if (grid.patch_h != ph || grid.patch_w != pw) {
        throw std::invalid_argument("image '" + image.id +
                                    "' yields patch dims inconsistent with the rest of the dataset");
    }

    std::vector<PatchRef> refs;
    refs.reserve(static_cast<size_t>(grid.rows) * grid.cols);
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            refs.push_back(PatchRef{image.id, r, c, r * ph, c * pw, ph, pw});
        }
    }
    return refs;
}

const ImageSample& Dataset::image(const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end()) throw std::invalid_argument("unknown image id '" + id + "'");
    return images[it->second];
}

void Dataset::rebuild_index() {
    index.clear();
    for (size_t i = 0; i < images.size(); ++i) index[images[i].id] = i;
}

namespace {

ImageSample load_pair(const std::string& image_path, const std::string& label_path,
                      int num_classes) {
    const PnmImage img = read_pnm(image_path);
    if (img.channels != 3) {
        throw std::runtime_error(image_path + ": expected a P6 pixmap");
    }
    const PnmImage lab = read_pnm(label_path);
    if (lab.channels != 1) {
        throw std::runtime_error(label_path + ": expected a P5 graymap");
    }
    if (lab.w != img.w || lab.h != img.h) {
        throw std::runtime_error(label_path + ": label dims do not match " + image_path);
    }

    ImageSample s;
    s.id = std::filesystem::path(image_path).stem().string();
    s.h = img.h;
    s.w = img.w;
    s.channels = img.channels;
    s.pixels.resize(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) {
        s.pixels[i] = static_cast<float>(img.data[i]) / 255.0f;
    }
    s.label_map.assign(lab.data.begin(), lab.data.end());
    for (uint8_t v : s.label_map) {
        if (v != kIgnoreLabel && v >= num_classes) {
            throw std::runtime_error(label_path + ": label value " + std::to_string(v) +
                                     " out of range for " + std::to_string(num_classes) +
                                     " classes");
        }
    }
    return s;
}

}  // namespace

std::pair<Dataset, Pool> load_dataset(const std::string& manifest_path, PatchGrid grid,
                                      int num_classes) {
    if (num_classes < 2) throw std::invalid_argument("need at least 2 classes");
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest " + manifest_path);
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();

    Dataset ds;
    ds.grid = grid;
    ds.num_classes = num_classes;

    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error(manifest_path + ":" + std::to_string(line_no) +
                                     ": expected image<TAB>label");
        }
        auto resolve = [&](std::string p) {
            std::filesystem::path fp(p);
            return fp.is_absolute() ? fp.string() : (base / fp).string();
        };
        ds.images.push_back(load_pair(resolve(line.substr(0, tab)),
                                      resolve(line.substr(tab + 1)), num_classes));
    }
    if (ds.images.empty()) throw std::runtime_error(manifest_path + ": empty manifest");
    ds.rebuild_index();

    Pool pool = make_pool(ds);
    return {std::move(ds), std::move(pool)};
}

Pool make_pool(Dataset& dataset) {
    Pool pool;
    for (const ImageSample& img : dataset.images) {
        for (PatchRef& ref : tile_image(img, dataset.grid)) {
            pool.unlabeled.insert(std::move(ref));
        }
    }
    return pool;
}

Pool reveal_labels(const Pool& pool, const std::set<PatchRef>& query) {
    for (const PatchRef& q : query) {
        if (!pool.unlabeled.contains(q)) {
            throw std::invalid_argument("query patch " + q.image_id + ":" +
                                        std::to_string(q.row) + "," + std::to_string(q.col) +
                                        " is not in the unlabeled pool");
        }
    }
    Pool next = pool;
    for (const PatchRef& q : query) {
        auto node = next.unlabeled.extract(q);
        next.labeled.insert(std::move(node));
    }
    next.query = query;
    return next;
}

}  // namespace meal
