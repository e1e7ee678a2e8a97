#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "meal/data_pool.hpp"
#include "meal/model.hpp"
#include "meal/strategies.hpp"
#include "meal/synthetic.hpp"
#include "meal/umap.hpp"

namespace meal {

// Where the images come from: a manifest on disk or the scene generator.
struct DataConfig {
    bool synthetic = true;
    std::string manifest;       // used when !synthetic
    int num_classes = 5;        // manifest datasets must state their class count
    uint64_t data_seed = 1234;  // scene generator seed (shared by all experiment seeds)
    int images = 20;
    SceneSpec scene;
    double val_fraction = 0.2;
};

struct ExperimentConfig {
    DataConfig data;
    PatchGrid grid;
    AcquisitionConfig al;
    TrainConfig train;
    UmapConfig umap;
    std::vector<uint64_t> seeds = {1};
    // 0 = deterministic single-threaded mode (wall_ms reported as 0 so CSV
    // output is byte-stable); >0 = up to that many seeds run in parallel with
    // real wall-clock times.
    int threads = 0;
};

struct StepRecord {
    std::string run_id;
    std::string strategy;
    uint64_t seed = 0;
    int step = 0;
    size_t labeled_patches = 0;
    double miou = 0.0;
    int64_t wall_ms = 0;
};

// Streaming confusion counts for multi-class IoU. Classes never observed in
// either prediction or ground truth are excluded from the mean; ignore-labeled
// pixels are skipped entirely.
class IoUAccumulator {
public:
    explicit IoUAccumulator(int num_classes);
    void add(const std::vector<uint8_t>& pred, const std::vector<uint8_t>& gt);
    double mean_iou() const;  // throws std::invalid_argument when no class was observed

private:
    std::vector<uint64_t> tp_, fp_, fn_;
};

// Convenience single-pair form of the metric.
double mean_iou(const std::vector<uint8_t>& pred, const std::vector<uint8_t>& gt,
                int num_classes);

// Argmax class map of the model's probabilities (ties -> lowest class index).
std::vector<uint8_t> predict_label_map(const SegModel& model, const ImageSample& image);

// The full active-learning loop: per experiment seed, split off validation
// images, seed the labeled pool, optionally fit the step-0 manifold map, then
// alternate train / evaluate / acquire / reveal for al.steps rounds (one
// trailing evaluation after the last acquisition). Returns one record per
// evaluation, ordered by (seed, step).
std::vector<StepRecord> run_experiment(const ExperimentConfig& cfg);

// Results CSV, header exactly:
// run_id,strategy,seed,step,labeled_patches,miou,wall_ms
void write_csv(const std::string& path, const std::vector<StepRecord>& records);
std::vector<StepRecord> read_csv(const std::string& path);

struct SummaryRow {
    std::string strategy;
    int step = 0;
    size_t labeled_patches = 0;
    double mean_miou = 0.0;
    double std_miou = 0.0;  // sample standard deviation across seeds (0 for one seed)
    size_t n_seeds = 0;
};

// Per (strategy, step) mean and sample standard deviation across seeds.
std::vector<SummaryRow> summarize(const std::vector<StepRecord>& records);

void write_summary(const std::string& path, const std::vector<SummaryRow>& rows);
void write_curves_csv(const std::string& path, const std::vector<SummaryRow>& rows);

}  // namespace meal
