#include "meal/kmeanspp.hpp"

#include <limits>
#include <stdexcept>

#include "meal/rng.hpp"

namespace meal {

std::vector<size_t> kmeanspp_indices(const Matrix& points, size_t n_select,
                                     std::mt19937_64& rng) {
    const size_t n = points.rows;
    if (n == 0) throw std::invalid_argument("kmeans++ needs a non-empty point set");
    if (n_select == 0) throw std::invalid_argument("n_select must be >= 1");

    std::vector<size_t> chosen;
    if (n_select >= n) {
        chosen.resize(n);
        for (size_t i = 0; i < n; ++i) chosen[i] = i;
        return chosen;
    }
    chosen.reserve(n_select);

    std::vector<bool> taken(n, false);
    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());

    auto add = [&](size_t idx) {
        chosen.push_back(idx);
        taken[idx] = true;
        for (size_t j = 0; j < n; ++j) {
            double d2 = 0.0;
            for (size_t c = 0; c < points.cols; ++c) {
                const double diff = points.at(j, c) - points.at(idx, c);
                d2 += diff * diff;
            }
            if (d2 < min_d2[j]) min_d2[j] = d2;
        }
    };

    add(uniform_index(rng, n));

    while (chosen.size() < n_select) {
        double total = 0.0;
        for (size_t j = 0; j < n; ++j) {
            if (!taken[j]) total += min_d2[j];
        }
        if (total > 0.0) {
            // Inverse-CDF over the raw D^2 mass in input order. Strict '>'
            // means zero-weight rows can never be selected.
            const double target = uniform_real(rng) * total;
            double cum = 0.0;
            size_t pick = n;
            size_t last_positive = n;
            for (size_t j = 0; j < n; ++j) {
                if (taken[j] || min_d2[j] <= 0.0) continue;
                cum += min_d2[j];
                last_positive = j;
                if (cum > target) {
                    pick = j;
                    break;
                }
            }
            if (pick == n) pick = last_positive;  // fp slack at the top of the CDF
            add(pick);
        } else {
            // Every remaining point coincides with a chosen one.
            size_t remaining = 0;
            for (size_t j = 0; j < n; ++j) remaining += taken[j] ? 0 : 1;
            size_t idx = uniform_index(rng, remaining);
            for (size_t j = 0; j < n; ++j) {
                if (taken[j]) continue;
                if (idx == 0) {
                    add(j);
                    break;
                }
                --idx;
            }
        }
    }
    return chosen;
}

SeedSelection kmeanspp_select(const std::vector<EmbeddingPoint>& points, size_t n_select,
                              uint64_t seed) {
    if (points.empty()) throw std::invalid_argument("kmeans++ needs a non-empty point set");
    if (n_select == 0) throw std::invalid_argument("n_select must be >= 1");

    Matrix m(points.size(), points.front().values.size());
    for (size_t i = 0; i < points.size(); ++i) {
        if (points[i].values.size() != m.cols) {
            throw std::invalid_argument("inconsistent embedding dimensions");
        }
        for (size_t c = 0; c < m.cols; ++c) m.at(i, c) = points[i].values[c];
    }

    auto rng = fork_stream(seed, "kmeanspp");
    SeedSelection sel;
    sel.rng_seed = seed;
    for (size_t idx : kmeanspp_indices(m, n_select, rng)) {
        sel.chosen.push_back(points[idx]);
    }
    return sel;
}

}  // namespace meal
