#include "meal/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>

#include "meal/rng.hpp"

namespace meal {

IoUAccumulator::IoUAccumulator(int num_classes)
    : tp_(static_cast<size_t>(num_classes), 0),
      fp_(static_cast<size_t>(num_classes), 0),
      fn_(static_cast<size_t>(num_classes), 0) {
    if (num_classes < 1) throw std::invalid_argument("need at least 1 class");
}

void IoUAccumulator::add(const std::vector<uint8_t>& pred, const std::vector<uint8_t>& gt) {
    if (pred.size() != gt.size()) throw std::invalid_argument("pred/gt shape mismatch");
    const size_t C = tp_.size();
    for (size_t i = 0; i < pred.size(); ++i) {
        if (gt[i] == kIgnoreLabel) continue;
        const uint8_t g = gt[i];
        const uint8_t p = pred[i];
        if (g >= C || p >= C) throw std::invalid_argument("class index out of range");
        if (p == g) {
            ++tp_[g];
        } else {
            ++fp_[p];
            ++fn_[g];
        }
    }
}

double IoUAccumulator::mean_iou() const {
    double sum = 0.0;
    size_t present = 0;
    for (size_t c = 0; c < tp_.size(); ++c) {
        const uint64_t denom = tp_[c] + fp_[c] + fn_[c];
        if (denom == 0) continue;
        sum += static_cast<double>(tp_[c]) / static_cast<double>(denom);
        ++present;
    }
    if (present == 0) throw std::invalid_argument("no class observed; mIoU undefined");
    return sum / static_cast<double>(present);
}

double mean_iou(const std::vector<uint8_t>& pred, const std::vector<uint8_t>& gt,
                int num_classes) {
    IoUAccumulator acc(num_classes);
    acc.add(pred, gt);
    return acc.mean_iou();
}

std::vector<uint8_t> predict_label_map(const SegModel& model, const ImageSample& image) {
    const ProbabilityMap probs = model.predict_probs(image);
    std::vector<uint8_t> labels(static_cast<size_t>(probs.h) * probs.w);
    for (size_t px = 0; px < labels.size(); ++px) {
        int best = 0;
        float best_p = probs.values[px * probs.num_classes];
        for (int c = 1; c < probs.num_classes; ++c) {
            const float p = probs.values[px * probs.num_classes + c];
            if (p > best_p) {
                best_p = p;
                best = c;
            }
        }
        labels[px] = static_cast<uint8_t>(best);
    }
    return labels;
}

namespace {

struct SeedRun {
    Dataset train;
    std::vector<ImageSample> val;
    Pool pool;
};

SeedRun prepare_seed(const ExperimentConfig& cfg, uint64_t seed) {
    std::vector<ImageSample> images;
    int num_classes = 0;
    if (cfg.data.synthetic) {
        images = generate_synthetic(cfg.data.data_seed, cfg.data.images, cfg.data.scene);
        num_classes = cfg.data.scene.num_classes;
    } else {
        auto loaded = load_dataset(cfg.data.manifest, cfg.grid, cfg.data.num_classes);
        images = std::move(loaded.first.images);
        num_classes = cfg.data.num_classes;
    }
    const size_t n_val = static_cast<size_t>(cfg.data.val_fraction * images.size());
    if (n_val == 0 || n_val >= images.size()) {
        throw std::invalid_argument("val_fraction leaves no validation or no training images");
    }

    // Validation images chosen by the experiment seed, before any acquisition.
    std::vector<size_t> order(images.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto rng = fork_stream(seed, "val-split");
    for (size_t i = 0; i < n_val; ++i) {
        std::swap(order[i], order[i + uniform_index(rng, order.size() - i)]);
    }
    std::vector<bool> is_val(images.size(), false);
    for (size_t i = 0; i < n_val; ++i) is_val[order[i]] = true;

    SeedRun run;
    run.train.grid = cfg.grid;
    run.train.num_classes = num_classes;
    for (size_t i = 0; i < images.size(); ++i) {
        if (is_val[i]) {
            run.val.push_back(std::move(images[i]));
        } else {
            run.train.images.push_back(std::move(images[i]));
        }
    }
    run.train.rebuild_index();
    run.pool = make_pool(run.train);
    return run;
}

double evaluate(const SegModel& model, const std::vector<ImageSample>& val, int num_classes) {
    IoUAccumulator acc(num_classes);
    for (const ImageSample& img : val) {
        acc.add(predict_label_map(model, img), img.label_map);
    }
    return acc.mean_iou();
}

std::vector<FeatureVector> all_patch_features(const Dataset& ds, const Pool& pool) {
    std::vector<FeatureVector> feats;
    feats.reserve(pool.total());
    auto collect = [&](const std::set<PatchRef>& refs) {
        for (const PatchRef& p : refs) feats.push_back(extract_features(ds.image(p.image_id), p));
    };
    collect(pool.labeled);
    collect(pool.unlabeled);
    return feats;
}

std::vector<StepRecord> run_single_seed(const ExperimentConfig& cfg, uint64_t seed) {
    using Clock = std::chrono::steady_clock;
    const bool deterministic = cfg.threads <= 0;
    const std::string sname = strategy_name(cfg.al.strategy);
    const std::string run_id = sname + "-s" + std::to_string(seed);

    SeedRun run = prepare_seed(cfg, seed);
    const size_t total = run.pool.total();
    if (static_cast<size_t>(cfg.al.init_patches) > total) {
        throw std::invalid_argument("init_patches exceeds the pool size");
    }

    std::vector<StepRecord> records;
    auto emit = [&](int step, size_t labeled, double miou, int64_t wall_ms) {
        records.push_back(
            StepRecord{run_id, sname, seed, step, labeled, miou, deterministic ? 0 : wall_ms});
        std::fprintf(stderr, "[%s seed %llu step %d] labeled=%zu miou=%.4f (%lld ms)\n",
                     sname.c_str(), static_cast<unsigned long long>(seed), step, labeled, miou,
                     static_cast<long long>(wall_ms));
    };

    TrainConfig tcfg = cfg.train;

    if (cfg.al.strategy == Strategy::full) {
        const auto t0 = Clock::now();
        const std::set<PatchRef> everything = run.pool.unlabeled;
        run.pool = reveal_labels(run.pool, everything);
        tcfg.seed = fork_seed(seed, "train-step-0");
        const LinearSegModel model = train_from_scratch(run.train, run.pool, tcfg);
        const double miou = evaluate(model, run.val, run.train.num_classes);
        emit(0, run.pool.labeled.size(), miou,
             std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count());
        return records;
    }

    const std::set<PatchRef> init_query = acquire_random(
        run.pool, static_cast<size_t>(cfg.al.init_patches), fork_seed(seed, "init-pool"));
    run.pool = reveal_labels(run.pool, init_query);

    // Step 0: the manifold map is fitted once, on the descriptors of every
    // patch in the acquisition pool (labeled and unlabeled).
    UmapModel phi;
    if (cfg.al.strategy == Strategy::meal) {
        UmapConfig ucfg = cfg.umap;
        ucfg.seed = fork_seed(seed, "umap-step0");
        phi = fit(all_patch_features(run.train, run.pool), ucfg);
    }

    for (int k = 0; k <= cfg.al.steps; ++k) {
        const auto t0 = Clock::now();
        const size_t labeled_now = run.pool.labeled.size();
        tcfg.seed = fork_seed(seed, "train-step-" + std::to_string(k));
        const LinearSegModel model = train_from_scratch(run.train, run.pool, tcfg);
        const double miou = evaluate(model, run.val, run.train.num_classes);

        if (k < cfg.al.steps && !run.pool.unlabeled.empty()) {
            const size_t n = static_cast<size_t>(cfg.al.query_size);
            const uint64_t step_seed = fork_seed(seed, "acquire-step-" + std::to_string(k));
            std::set<PatchRef> query;
            switch (cfg.al.strategy) {
                case Strategy::random:
                    query = acquire_random(run.pool, n, step_seed);
                    break;
                case Strategy::entropy:
                    query = acquire_entropy(model, run.train, run.pool, n);
                    break;
                case Strategy::meal:
                    query = acquire_meal(model, run.train, run.pool, phi, n,
                                         static_cast<size_t>(cfg.al.informative_size), step_seed);
                    break;
                case Strategy::meal_ft:
                    query = acquire_meal_ft(model, run.train, run.pool, n,
                                            static_cast<size_t>(cfg.al.informative_size),
                                            cfg.umap, step_seed);
                    break;
                case Strategy::full:
                    break;
            }
            run.pool = reveal_labels(run.pool, query);
        } else if (k < cfg.al.steps) {
            std::fprintf(stderr, "[%s seed %llu step %d] pool exhausted; continuing without acquisition\n",
                         sname.c_str(), static_cast<unsigned long long>(seed), k);
        }

        emit(k, labeled_now, miou,
             std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count());
    }
    return records;
}

}  // namespace

std::vector<StepRecord> run_experiment(const ExperimentConfig& cfg) {
    if (cfg.seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
    if (cfg.al.steps < 1 && cfg.al.strategy != Strategy::full) {
        throw std::invalid_argument("steps must be >= 1");
    }
    if ((cfg.al.strategy == Strategy::meal || cfg.al.strategy == Strategy::meal_ft) &&
        cfg.al.query_size > cfg.al.informative_size) {
        throw std::invalid_argument("query_size must be <= informative_size for meal/meal_ft");
    }

    std::vector<std::vector<StepRecord>> per_seed(cfg.seeds.size());
    const size_t workers = static_cast<size_t>(std::max(1, cfg.threads));
    if (workers == 1) {
        for (size_t i = 0; i < cfg.seeds.size(); ++i) {
            per_seed[i] = run_single_seed(cfg, cfg.seeds[i]);
        }
    } else {
        // Seeds run in waves so at most `workers` are in flight.
        for (size_t wave = 0; wave < cfg.seeds.size(); wave += workers) {
            const size_t end = std::min(cfg.seeds.size(), wave + workers);
            std::vector<std::future<std::vector<StepRecord>>> futures;
            for (size_t i = wave; i < end; ++i) {
                futures.push_back(std::async(std::launch::async, run_single_seed, std::cref(cfg),
                                             cfg.seeds[i]));
            }
            for (size_t i = wave; i < end; ++i) per_seed[i] = futures[i - wave].get();
        }
    }

    std::vector<StepRecord> records;
    for (auto& part : per_seed) {
        records.insert(records.end(), part.begin(), part.end());
    }
    std::stable_sort(records.begin(), records.end(), [](const StepRecord& a, const StepRecord& b) {
        if (a.seed != b.seed) return a.seed < b.seed;
        return a.step < b.step;
    });
    return records;
}

namespace {
constexpr const char* kCsvHeader = "run_id,strategy,seed,step,labeled_patches,miou,wall_ms";
}

void write_csv(const std::string& path, const std::vector<StepRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << kCsvHeader << "\n";
    char buf[64];
    for (const StepRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%.6f", r.miou);
        out << r.run_id << ',' << r.strategy << ',' << r.seed << ',' << r.step << ','
            << r.labeled_patches << ',' << buf << ',' << r.wall_ms << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<StepRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error(path + ": missing or wrong CSV header");
    }
    std::vector<StepRecord> records;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 7 fields");
        }
        try {
            StepRecord r;
            r.run_id = cells[0];
            r.strategy = cells[1];
            r.seed = std::stoull(cells[2]);
            r.step = std::stoi(cells[3]);
            r.labeled_patches = std::stoull(cells[4]);
            r.miou = std::stod(cells[5]);
            r.wall_ms = std::stoll(cells[6]);
            records.push_back(std::move(r));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed record");
        }
    }
    return records;
}

std::vector<SummaryRow> summarize(const std::vector<StepRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no records to summarize");
    std::map<std::pair<std::string, int>, std::vector<const StepRecord*>> groups;
    for (const StepRecord& r : records) {
        groups[{r.strategy, r.step}].push_back(&r);
    }
    std::vector<SummaryRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, recs] : groups) {
        SummaryRow row;
        row.strategy = key.first;
        row.step = key.second;
        row.labeled_patches = recs.front()->labeled_patches;
        row.n_seeds = recs.size();
        double sum = 0.0;
        for (const StepRecord* r : recs) sum += r->miou;
        row.mean_miou = sum / static_cast<double>(recs.size());
        if (recs.size() > 1) {
            double ss = 0.0;
            for (const StepRecord* r : recs) {
                const double d = r->miou - row.mean_miou;
                ss += d * d;
            }
            row.std_miou = std::sqrt(ss / static_cast<double>(recs.size() - 1));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_summary(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[160];
    std::string current;
    for (const SummaryRow& r : rows) {
        if (r.strategy != current) {
            if (!current.empty()) out << "\n";
            current = r.strategy;
            out << "strategy: " << current << "\n";
            std::snprintf(buf, sizeof(buf), "  %5s %10s %12s %12s %7s\n", "step", "labeled",
                          "mean_miou", "std_miou", "seeds");
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "  %5d %10zu %12.6f %12.6f %7zu\n", r.step,
                      r.labeled_patches, r.mean_miou, r.std_miou, r.n_seeds);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

void write_curves_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "strategy,step,labeled_patches,mean_miou,std_miou,n_seeds\n";
    char buf[64];
    for (const SummaryRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f", r.mean_miou, r.std_miou);
        out << r.strategy << ',' << r.step << ',' << r.labeled_patches << ',' << buf << ','
            << r.n_seeds << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace meal
