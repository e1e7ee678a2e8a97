#include "meal/umap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include "meal/rng.hpp"

namespace meal {

namespace {

constexpr double kGradClip = 4.0;
constexpr double kBisectTol = 1e-5;
constexpr int kBisectMaxIter = 200;

double sq_dist(const double* a, const double* b, size_t d) {
    double s = 0.0;
    for (size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

// Smoothed-membership calibration: solve sigma so the neighbor weights sum to
// log2(k). The sum is monotone increasing in sigma, so plain bisection works.
double solve_sigma(const std::vector<double>& dists, double rho, double target) {
    auto weight_sum = [&](double sigma) {
        double s = 0.0;
        for (double d : dists) s += std::exp(-std::max(0.0, d - rho) / sigma);
        return s;
    };
    double hi = 1.0;
    while (weight_sum(hi) < target && hi < 1e12) hi *= 2.0;
    double lo = 1e-12;
    for (int it = 0; it < kBisectMaxIter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s = weight_sum(mid);
        if (std::abs(s - target) < kBisectTol) return mid;
        if (s > target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct DirectedEdges {
    std::vector<int> head;
    std::vector<int> tail;
    std::vector<double> weight;
};

DirectedEdges directed_from(const std::vector<UmapEdge>& edges) {
    DirectedEdges de;
    de.head.reserve(edges.size() * 2);
    de.tail.reserve(edges.size() * 2);
    de.weight.reserve(edges.size() * 2);
    for (const UmapEdge& e : edges) {
        de.head.push_back(e.a);
        de.tail.push_back(e.b);
        de.weight.push_back(e.weight);
        de.head.push_back(e.b);
        de.tail.push_back(e.a);
        de.weight.push_back(e.weight);
    }
    return de;
}

// Sorted per-head adjacency so negative sampling can honor the membership
// weights: the repulsive weight of a pair is 1 - w, so a sampled neighbor is
// rejected with probability w.
struct Adjacency {
    std::vector<std::vector<std::pair<int, double>>> nbrs;

    explicit Adjacency(const DirectedEdges& de, size_t n_heads) : nbrs(n_heads) {
        for (size_t e = 0; e < de.head.size(); ++e) {
            nbrs[de.head[e]].emplace_back(de.tail[e], de.weight[e]);
        }
        for (auto& v : nbrs) std::sort(v.begin(), v.end());
    }

    double weight(int i, int k) const {
        const auto& v = nbrs[i];
        const auto it = std::lower_bound(
            v.begin(), v.end(), k,
            [](const std::pair<int, double>& p, int key) { return p.first < key; });
        return (it != v.end() && it->first == k) ? it->second : 0.0;
    }
};

inline double clip(double v) { return std::clamp(v, -kGradClip, kGradClip); }

// Cross-entropy surrogate over the retained edges plus a fixed set of
// negative pairs (each weighted by its true repulsive mass 1 - w); used only
// as a monotone progress indicator.
double layout_objective(const Matrix& layout, const DirectedEdges& de, const Adjacency& adj,
                        double a, double b,
                        const std::vector<std::pair<int, int>>& negatives) {
    const size_t dim = layout.cols;
    auto q_of = [&](int i, int j) {
        const double d2 = sq_dist(layout.row(i), layout.row(j), dim);
        const double q = 1.0 / (1.0 + a * std::pow(d2, b));
        return std::clamp(q, 1e-12, 1.0 - 1e-12);
    };
    double obj = 0.0;
    for (size_t e = 0; e < de.head.size(); ++e) {
        obj -= de.weight[e] * std::log(q_of(de.head[e], de.tail[e]));
    }
    for (const auto& [i, k] : negatives) {
        if (i == k) continue;
        obj -= (1.0 - adj.weight(i, k)) * std::log(1.0 - q_of(i, k));
    }
    return obj;
}

struct EdgeSchedule {
    std::vector<double> epochs_per_sample;
    std::vector<double> epoch_of_next_sample;
    std::vector<double> epochs_per_negative;
    std::vector<double> epoch_of_next_negative;
};

EdgeSchedule make_schedule(const std::vector<double>& weights, int negative_samples) {
    double w_max = 0.0;
    for (double w : weights) w_max = std::max(w_max, w);
    EdgeSchedule s;
    const size_t n = weights.size();
    s.epochs_per_sample.resize(n);
    s.epoch_of_next_sample.resize(n);
    s.epochs_per_negative.resize(n);
    s.epoch_of_next_negative.resize(n);
    for (size_t e = 0; e < n; ++e) {
        s.epochs_per_sample[e] = w_max / weights[e];
        s.epoch_of_next_sample[e] = s.epochs_per_sample[e];
        s.epochs_per_negative[e] = s.epochs_per_sample[e] / std::max(1, negative_samples);
        s.epoch_of_next_negative[e] = s.epochs_per_negative[e];
    }
    return s;
}

// One stochastic pass over a contiguous range of directed edges. `movable_tail`
// distinguishes fit (both endpoints move) from transform (training layout
// frozen). Negative samples are drawn from [0, n_candidates).
void optimize_edge_range(Matrix& head_layout, Matrix& tail_layout, const DirectedEdges& de,
                         const Adjacency& adj, size_t e_begin, size_t e_end,
                         EdgeSchedule& sched, double a, double b, double alpha, int epoch,
                         size_t n_candidates, bool movable_tail, std::mt19937_64& rng) {
    const size_t dim = head_layout.cols;
    for (size_t e = e_begin; e < e_end; ++e) {
        if (sched.epoch_of_next_sample[e] > epoch) continue;
        const int i = de.head[e];
        const int j = de.tail[e];
        double* yi = head_layout.row(i);
        double* yj = tail_layout.row(j);

        const double d2 = sq_dist(yi, yj, dim);
        if (d2 > 0.0) {
            const double coef = (-2.0 * a * b * std::pow(d2, b - 1.0)) / (1.0 + a * std::pow(d2, b));
            for (size_t k = 0; k < dim; ++k) {
                const double g = clip(coef * (yi[k] - yj[k]));
                yi[k] += alpha * g;
                if (movable_tail) yj[k] -= alpha * g;
            }
        }
        sched.epoch_of_next_sample[e] += sched.epochs_per_sample[e];

        const int n_neg = std::max(
            0, static_cast<int>((epoch - sched.epoch_of_next_negative[e]) /
                                sched.epochs_per_negative[e]));
        for (int t = 0; t < n_neg; ++t) {
            const int k = static_cast<int>(uniform_index(rng, n_candidates));
            // The repulsive mass of pair (i,k) is 1 - w(i,k): reject the draw
            // with probability w so strong neighbors are not pushed apart.
            const double w_ik = adj.weight(i, k);
            if (w_ik > 0.0 && uniform_real(rng) < w_ik) continue;
            const double* yk = tail_layout.row(k);
            const double nd2 = sq_dist(yi, yk, dim);
            // Coincident draws (including sampling the head itself) have no
            // defined repulsion direction; skipping them avoids the biased
            // constant kick that destabilizes small fits.
            if (nd2 <= 0.0) continue;
            const double coef = (2.0 * b) / ((0.001 + nd2) * (1.0 + a * std::pow(nd2, b)));
            for (size_t kk = 0; kk < dim; ++kk) {
                yi[kk] += alpha * clip(coef * (yi[kk] - yk[kk]));
            }
        }
        sched.epoch_of_next_negative[e] += n_neg * sched.epochs_per_negative[e];
    }
}

void check_finite(const Matrix& m, const char* what) {
    for (double v : m.data) {
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " contains non-finite values");
    }
}

}  // namespace

std::pair<double, double> fit_curve_params(double min_dist) {
    if (min_dist <= 0.0) throw std::invalid_argument("min_dist must be > 0");
    constexpr int kSamples = 300;
    std::vector<double> xs(kSamples), ys(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        const double x = 3.0 * (i + 0.5) / kSamples;
        xs[i] = x;
        ys[i] = x <= min_dist ? 1.0 : std::exp(-(x - min_dist));
    }

    // Damped Gauss-Newton on (a, b); the 2x2 normal equations are solved in
    // closed form.
    double a = 1.0, b = 1.0;
    auto sse = [&](double pa, double pb) {
        double s = 0.0;
        for (int i = 0; i < kSamples; ++i) {
            const double f = 1.0 / (1.0 + pa * std::pow(xs[i], 2.0 * pb));
            const double r = f - ys[i];
            s += r * r;
        }
        return s;
    };
    double lambda = 1e-3;
    double err = sse(a, b);
    for (int it = 0; it < 200; ++it) {
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
        for (int i = 0; i < kSamples; ++i) {
            const double xp = std::pow(xs[i], 2.0 * b);
            const double denom = 1.0 + a * xp;
            const double f = 1.0 / denom;
            const double r = f - ys[i];
            const double da = -xp / (denom * denom);
            const double db = xs[i] > 1e-12 ? -2.0 * a * xp * std::log(xs[i]) / (denom * denom) : 0.0;
            jtj00 += da * da;
            jtj01 += da * db;
            jtj11 += db * db;
            jtr0 += da * r;
            jtr1 += db * r;
        }
        const double d00 = jtj00 * (1.0 + lambda), d11 = jtj11 * (1.0 + lambda);
        const double det = d00 * d11 - jtj01 * jtj01;
        if (std::abs(det) < 1e-30) break;
        const double step_a = (-jtr0 * d11 + jtr1 * jtj01) / det;
        const double step_b = (-jtr1 * d00 + jtr0 * jtj01) / det;
        const double na = std::max(1e-6, a + step_a);
        const double nb = std::clamp(b + step_b, 0.05, 5.0);
        const double nerr = sse(na, nb);
        if (nerr < err) {
            a = na;
            b = nb;
            err = nerr;
            lambda = std::max(1e-9, lambda * 0.5);
            if (std::abs(step_a) + std::abs(step_b) < 1e-12) break;
        } else {
            lambda *= 4.0;
            if (lambda > 1e12) break;
        }
    }
    return {a, b};
}

double UmapModel::fuzzy_weight(int i, int j) const {
    const int a = std::min(i, j), b = std::max(i, j);
    for (const UmapEdge& e : edges) {
        if (e.a == a && e.b == b) return e.weight;
    }
    return 0.0;
}

UmapModel umap_fit(const Matrix& features, const UmapConfig& cfg) {
    const size_t n = features.rows;
    const size_t d = features.cols;
    if (n < 3) throw std::invalid_argument("umap fit needs at least 3 points");
    if (cfg.n_neighbors < 2) throw std::invalid_argument("n_neighbors must be >= 2");
    if (cfg.out_dim < 1) throw std::invalid_argument("out_dim must be >= 1");
    if (cfg.min_dist <= 0.0) throw std::invalid_argument("min_dist must be > 0");
    check_finite(features, "feature matrix");

    UmapModel model;
    model.config = cfg;
    model.train_features = features;
    const int k = static_cast<int>(std::min<size_t>(cfg.n_neighbors, n - 1));
    model.n_neighbors = k;

    // Exact kNN; desk scale keeps O(n^2) cheap and deterministic.
    model.knn_ids.assign(n, {});
    model.knn_dists.assign(n, {});
    std::vector<std::pair<double, int>> cand(n - 1);
    for (size_t i = 0; i < n; ++i) {
        size_t m = 0;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            cand[m++] = {std::sqrt(sq_dist(features.row(i), features.row(j), d)),
                         static_cast<int>(j)};
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        model.knn_ids[i].resize(k);
        model.knn_dists[i].resize(k);
        for (int t = 0; t < k; ++t) {
            model.knn_dists[i][t] = cand[t].first;
            model.knn_ids[i][t] = cand[t].second;
        }
    }

    // Local scaling and directed membership weights.
    model.rho.resize(n);
    model.sigma.resize(n);
    const double target = std::log2(static_cast<double>(k));
    std::map<std::pair<int, int>, std::pair<double, double>> directed;  // (i<j) -> (w_ij, w_ji)
    for (size_t i = 0; i < n; ++i) {
        model.rho[i] = model.knn_dists[i][0];
        model.sigma[i] = solve_sigma(model.knn_dists[i], model.rho[i], target);
        for (int t = 0; t < k; ++t) {
            const int j = model.knn_ids[i][t];
            const double w =
                std::exp(-std::max(0.0, model.knn_dists[i][t] - model.rho[i]) / model.sigma[i]);
            auto key = std::make_pair(std::min<int>(i, j), std::max<int>(i, j));
            auto& slot = directed[key];
            if (static_cast<int>(i) == key.first) {
                slot.first = w;
            } else {
                slot.second = w;
            }
        }
    }
    model.edges.reserve(directed.size());
    for (const auto& [key, w] : directed) {
        const double u = w.first + w.second - w.first * w.second;  // fuzzy union
        if (u > 0.0) model.edges.push_back(UmapEdge{key.first, key.second, u});
    }

    const auto [curve_a, curve_b] = fit_curve_params(cfg.min_dist);
    model.curve_a = curve_a;
    model.curve_b = curve_b;

    // Seeded random init in [-10, 10]^out_dim.
    model.layout = Matrix(n, static_cast<size_t>(cfg.out_dim));
    {
        auto rng = fork_stream(cfg.seed, "umap-init");
        for (double& v : model.layout.data) v = uniform_real(rng, -10.0, 10.0);
    }

    DirectedEdges de = directed_from(model.edges);
    const Adjacency adj(de, n);
    EdgeSchedule sched = make_schedule(de.weight, cfg.negative_samples);

    // Fixed negative pairs for the progress objective, independent of the
    // optimization stream.
    std::vector<std::pair<int, int>> obj_negatives;
    {
        auto rng = fork_stream(cfg.seed, "umap-objective");
        obj_negatives.reserve(de.head.size() * std::max(1, cfg.negative_samples));
        for (size_t e = 0; e < de.head.size(); ++e) {
            for (int t = 0; t < std::max(1, cfg.negative_samples); ++t) {
                obj_negatives.emplace_back(de.head[e], static_cast<int>(uniform_index(rng, n)));
            }
        }
    }
    model.objective_epoch0 =
        layout_objective(model.layout, de, adj, curve_a, curve_b, obj_negatives);

    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        auto rng = fork_stream(cfg.seed, "umap-layout");
        for (int epoch = 1; epoch <= cfg.n_epochs; ++epoch) {
            const double alpha = cfg.learning_rate * (1.0 - static_cast<double>(epoch - 1) / cfg.n_epochs);
            optimize_edge_range(model.layout, model.layout, de, adj, 0, de.head.size(), sched,
                                curve_a, curve_b, alpha, epoch, n, true, rng);
        }
    } else {
        // Asynchronous per-edge updates; faster, not bitwise reproducible.
        const size_t per = (de.head.size() + threads - 1) / threads;
        for (int epoch = 1; epoch <= cfg.n_epochs; ++epoch) {
            const double alpha = cfg.learning_rate * (1.0 - static_cast<double>(epoch - 1) / cfg.n_epochs);
            std::vector<std::thread> workers;
            for (int t = 0; t < threads; ++t) {
                const size_t b = std::min(de.head.size(), t * per);
                const size_t e = std::min(de.head.size(), b + per);
                if (b >= e) break;
                workers.emplace_back([&, b, e, t] {
                    auto rng = fork_stream(cfg.seed, "umap-layout-" + std::to_string(t));
                    optimize_edge_range(model.layout, model.layout, de, adj, b, e, sched,
                                        curve_a, curve_b, alpha, epoch, n, true, rng);
                });
            }
            for (auto& w : workers) w.join();
        }
    }

    model.objective_final =
        layout_objective(model.layout, de, adj, curve_a, curve_b, obj_negatives);
    check_finite(model.layout, "umap layout");
    return model;
}

Matrix umap_transform(const UmapModel& model, const Matrix& queries) {
    const size_t n = model.train_features.rows;
    const size_t d = model.train_features.cols;
    if (queries.cols != d && queries.rows > 0) {
        throw std::invalid_argument("query feature dimension " + std::to_string(queries.cols) +
                                    " does not match model dimension " + std::to_string(d));
    }
    const size_t m = queries.rows;
    const int dim = static_cast<int>(model.layout.cols);
    Matrix out(m, static_cast<size_t>(dim));
    if (m == 0) return out;
    check_finite(queries, "query matrix");

    const int k = model.n_neighbors;
    const double target = std::log2(static_cast<double>(k));

    // Query-to-train kNN membership edges.
    std::vector<int> q_head, q_tail;
    std::vector<double> q_weight;
    std::vector<std::pair<double, int>> cand(n);
    for (size_t qi = 0; qi < m; ++qi) {
        for (size_t j = 0; j < n; ++j) {
            cand[j] = {std::sqrt(sq_dist(queries.row(qi), model.train_features.row(j), d)),
                       static_cast<int>(j)};
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        std::vector<double> dists(k);
        for (int t = 0; t < k; ++t) dists[t] = cand[t].first;
        const double rho = dists[0];
        const double sigma = solve_sigma(dists, rho, target);

        double wsum = 0.0;
        std::vector<double> ws(k);
        for (int t = 0; t < k; ++t) {
            ws[t] = std::exp(-std::max(0.0, dists[t] - rho) / sigma);
            wsum += ws[t];
        }
        for (int c = 0; c < dim; ++c) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += ws[t] * model.layout.at(cand[t].second, c);
            out.at(qi, c) = acc / wsum;
        }
        for (int t = 0; t < k; ++t) {
            q_head.push_back(static_cast<int>(qi));
            q_tail.push_back(cand[t].second);
            q_weight.push_back(ws[t]);
        }
    }

    // Refinement against the frozen training layout.
    DirectedEdges de;
    de.head = std::move(q_head);
    de.tail = std::move(q_tail);
    de.weight = std::move(q_weight);
    const Adjacency adj(de, m);
    EdgeSchedule sched = make_schedule(de.weight, model.config.negative_samples);
    const int rounds = std::max(1, model.config.n_epochs / 4);
    auto rng = fork_stream(model.config.seed, "umap-transform");
    Matrix frozen = model.layout;
    for (int epoch = 1; epoch <= rounds; ++epoch) {
        const double alpha =
            model.config.learning_rate * (1.0 - static_cast<double>(epoch - 1) / rounds);
        optimize_edge_range(out, frozen, de, adj, 0, de.head.size(), sched, model.curve_a,
                            model.curve_b, alpha, epoch, n, false, rng);
    }
    check_finite(out, "transformed embedding");
    return out;
}

std::pair<UmapModel, Matrix> umap_fit_transform(const Matrix& features, const UmapConfig& cfg) {
    UmapModel model = umap_fit(features, cfg);
    Matrix layout = model.layout;
    return {std::move(model), std::move(layout)};
}

namespace {

Matrix to_matrix(const std::vector<FeatureVector>& features) {
    if (features.empty()) return Matrix(0, 0);
    Matrix m(features.size(), features.front().values.size());
    for (size_t i = 0; i < features.size(); ++i) {
        if (features[i].values.size() != m.cols) {
            throw std::invalid_argument("inconsistent feature dimensions");
        }
        std::copy(features[i].values.begin(), features[i].values.end(), m.row(i));
    }
    return m;
}

std::vector<EmbeddingPoint> to_points(const Matrix& layout,
                                      const std::vector<FeatureVector>& features) {
    std::vector<EmbeddingPoint> pts(layout.rows);
    for (size_t i = 0; i < layout.rows; ++i) {
        pts[i].values.assign(layout.row(i), layout.row(i) + layout.cols);
        pts[i].patch = features[i].patch;
    }
    return pts;
}

}  // namespace

UmapModel fit(const std::vector<FeatureVector>& features, const UmapConfig& cfg) {
    return umap_fit(to_matrix(features), cfg);
}

std::vector<EmbeddingPoint> transform(const UmapModel& model,
                                      const std::vector<FeatureVector>& features) {
    Matrix q = to_matrix(features);
    if (features.empty()) return {};
    return to_points(umap_transform(model, q), features);
}

std::pair<UmapModel, std::vector<EmbeddingPoint>> fit_transform(
    const std::vector<FeatureVector>& features, const UmapConfig& cfg) {
    auto [model, layout] = umap_fit_transform(to_matrix(features), cfg);
    auto pts = to_points(layout, features);
    return {std::move(model), std::move(pts)};
}

namespace {

constexpr uint32_t kUmapMagic = 0x554d5031;  // "UMP1"
constexpr uint32_t kUmapVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void save_umap(const UmapModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    put(out, kUmapMagic);
    put(out, kUmapVersion);
    put(out, static_cast<uint64_t>(model.train_features.rows));
    put(out, static_cast<uint64_t>(model.train_features.cols));
    put(out, static_cast<uint64_t>(model.layout.cols));
    put(out, static_cast<int32_t>(model.n_neighbors));
    put(out, static_cast<uint64_t>(model.edges.size()));
    put(out, model.curve_a);
    put(out, model.curve_b);
    put(out, model.objective_epoch0);
    put(out, model.objective_final);
    put(out, static_cast<int32_t>(model.config.n_neighbors));
    put(out, static_cast<int32_t>(model.config.out_dim));
    put(out, model.config.min_dist);
    put(out, static_cast<int32_t>(model.config.n_epochs));
    put(out, static_cast<int32_t>(model.config.negative_samples));
    put(out, model.config.learning_rate);
    put(out, model.config.seed);

    auto put_vec = [&](const std::vector<double>& v) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    put_vec(model.train_features.data);
    put_vec(model.layout.data);
    for (size_t i = 0; i < model.knn_ids.size(); ++i) {
        for (int id : model.knn_ids[i]) put(out, static_cast<int32_t>(id));
        put_vec(model.knn_dists[i]);
    }
    put_vec(model.rho);
    put_vec(model.sigma);
    for (const UmapEdge& e : model.edges) {
        put(out, static_cast<int32_t>(e.a));
        put(out, static_cast<int32_t>(e.b));
        put(out, e.weight);
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

UmapModel load_umap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    if (get<uint32_t>(in) != kUmapMagic) throw std::runtime_error(path + ": not a umap model file");
    if (get<uint32_t>(in) != kUmapVersion) throw std::runtime_error(path + ": unsupported version");

    UmapModel model;
    const uint64_t n = get<uint64_t>(in);
    const uint64_t d = get<uint64_t>(in);
    const uint64_t out_dim = get<uint64_t>(in);
    model.n_neighbors = get<int32_t>(in);
    const uint64_t n_edges = get<uint64_t>(in);
    model.curve_a = get<double>(in);
    model.curve_b = get<double>(in);
    model.objective_epoch0 = get<double>(in);
    model.objective_final = get<double>(in);
    model.config.n_neighbors = get<int32_t>(in);
    model.config.out_dim = get<int32_t>(in);
    model.config.min_dist = get<double>(in);
    model.config.n_epochs = get<int32_t>(in);
    model.config.negative_samples = get<int32_t>(in);
    model.config.learning_rate = get<double>(in);
    model.config.seed = get<uint64_t>(in);

    model.train_features = Matrix(n, d);
    model.layout = Matrix(n, out_dim);
    auto get_vec = [&](std::vector<double>& v) {
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    get_vec(model.train_features.data);
    get_vec(model.layout.data);
    model.knn_ids.assign(n, std::vector<int>(model.n_neighbors));
    model.knn_dists.assign(n, std::vector<double>(model.n_neighbors));
    for (size_t i = 0; i < n; ++i) {
        for (int t = 0; t < model.n_neighbors; ++t) model.knn_ids[i][t] = get<int32_t>(in);
        get_vec(model.knn_dists[i]);
    }
    model.rho.resize(n);
    model.sigma.resize(n);
    get_vec(model.rho);
    get_vec(model.sigma);
    model.edges.resize(n_edges);
    for (UmapEdge& e : model.edges) {
        e.a = get<int32_t>(in);
        e.b = get<int32_t>(in);
        e.weight = get<double>(in);
    }
    if (!in) throw std::runtime_error(path + ": truncated umap model file");
    return model;
}

}  // namespace meal
