#pragma once

#include <algorithm>
#include <barrier>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "carve/energy.hpp"
#include "carve/error.hpp"

namespace carve {

/// One column index per row, top row first; adjacent entries differ by at most 1.
using Seam = std::vector<int>;

enum class SolverKind { BruteForce, Greedy, Dynamic, ParallelDynamic };

inline const char* to_string(SolverKind k) {
    switch (k) {
        case SolverKind::BruteForce: return "bruteforce";
        case SolverKind::Greedy: return "greedy";
        case SolverKind::Dynamic: return "dp";
        case SolverKind::ParallelDynamic: return "pardp";
    }
    return "?";
}

inline std::optional<SolverKind> parse_solver(const std::string& name) {
    if (name == "bruteforce") return SolverKind::BruteForce;
    if (name == "greedy") return SolverKind::Greedy;
    if (name == "dp") return SolverKind::Dynamic;
    if (name == "pardp") return SolverKind::ParallelDynamic;
    return std::nullopt;
}

/// Accumulated minimum costs m plus the predecessor column chosen per cell.
struct CostTable {
    int width = 0;
    int height = 0;
    std::vector<double> m;
    std::vector<int> b;

    CostTable() = default;
    CostTable(int w, int h) : width(w), height(h), m(size_t(w) * h), b(size_t(w) * h) {}

    double cost(int row, int col) const { return m[size_t(row) * width + col]; }
    int back(int row, int col) const { return b[size_t(row) * width + col]; }

    friend bool operator==(const CostTable&, const CostTable&) = default;
};

struct SeamResult {
    Seam seam;
    CostTable table;
};

inline constexpr int kDefaultBruteCap = 16;

struct SolverOptions {
    int brute_cap = kDefaultBruteCap;
    unsigned workers = 0; // 0 = one per hardware thread
};

inline void validate_seam(const Seam& seam, int width, int height) {
    if (int(seam.size()) != height)
        fail(Errc::invalid_seam, "seam length does not match image height");
    for (size_t i = 0; i < seam.size(); ++i) {
        if (seam[i] < 0 || seam[i] >= width)
            fail(Errc::invalid_seam, "seam column out of range");
        if (i > 0 && std::abs(seam[i] - seam[i - 1]) > 1)
            fail(Errc::invalid_seam, "seam is not connected");
    }
}

inline double seam_cost(const EnergyMap& energy, const Seam& seam) {
    validate_seam(seam, energy.width, energy.height);
    double total = 0.0;
    for (int i = 0; i < energy.height; ++i) total += energy.at(i, seam[i]);
    return total;
}

namespace detail {

inline void require_nonempty(int width, int height) {
    if (width < 1 || height < 1) fail(Errc::empty_image, "image is empty");
}

// smallest column wins on ties
inline int argmin_row(const double* row, int width) {
    int best = 0;
    for (int j = 1; j < width; ++j)
        if (row[j] < row[best]) best = j;
    return best;
}

inline Seam backtrack(const CostTable& t) {
    const int h = t.height, w = t.width;
    Seam seam(static_cast<size_t>(h));
    int col = argmin_row(&t.m[size_t(h - 1) * w], w);
    seam[h - 1] = col;
    for (int i = h - 1; i >= 1; --i) {
        col = t.back(i, col);
        seam[i - 1] = col;
    }
    return seam;
}

// Data-parallel row kernel: fills m/b for columns [j_begin, j_end) of one row
// given the finished previous row. Interior columns are branch-free so the
// sweep vectorizes; border columns have two candidates instead of three.
inline void fill_row_span(const double* e_row, const double* prev, double* m_row, int* b_row,
                          int width, int j_begin, int j_end) {
    if (j_begin >= j_end) return;
    int j = j_begin;
    if (j == 0) {
        double best = prev[0];
        int from = 0;
        if (width > 1 && prev[1] < best) {
            best = prev[1];
            from = 1;
        }
        m_row[0] = e_row[0] + best;
        b_row[0] = from;
        j = 1;
    }
    const int interior_end = std::min(j_end, width - 1);
    for (; j < interior_end; ++j) {
        const double left = prev[j - 1];
        const double mid = prev[j];
        const double right = prev[j + 1];
        double best = left;
        int from = j - 1;
        const bool mid_lt = mid < best;
        best = mid_lt ? mid : best;
        from = mid_lt ? j : from;
        const bool right_lt = right < best;
        best = right_lt ? right : best;
        from = right_lt ? j + 1 : from;
        m_row[j] = e_row[j] + best;
        b_row[j] = from;
    }
    if (j_end == width && width > 1 && j == width - 1) {
        double best = prev[width - 2];
        int from = width - 2;
        if (prev[width - 1] < best) {
            best = prev[width - 1];
            from = width - 1;
        }
        m_row[width - 1] = e_row[width - 1] + best;
        b_row[width - 1] = from;
    }
}

inline constexpr int kMinColsPerWorker = 64;

// Fills rows 1..h-1 of a table whose row 0 is already seeded. With more than
// one thread, columns are partitioned into contiguous spans and a barrier
// separates rows; the partitioning cannot change any cell value.
inline void fill_table_rows(const EnergyMap& energy, CostTable& t, unsigned threads) {
    const int w = energy.width, h = energy.height;
    if (h <= 1) return;
    if (threads <= 1) {
        for (int i = 1; i < h; ++i)
            fill_row_span(&energy.values[size_t(i) * w], &t.m[size_t(i - 1) * w], &t.m[size_t(i) * w],
                          &t.b[size_t(i) * w], w, 0, w);
        return;
    }
    std::barrier sync{std::ptrdiff_t(threads)};
    auto worker = [&](unsigned tid) {
        const int j_begin = int(size_t(w) * tid / threads);
        const int j_end = int(size_t(w) * (tid + 1) / threads);
        for (int i = 1; i < h; ++i) {
            fill_row_span(&energy.values[size_t(i) * w], &t.m[size_t(i - 1) * w], &t.m[size_t(i) * w],
                          &t.b[size_t(i) * w], w, j_begin, j_end);
            sync.arrive_and_wait();
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (unsigned tid = 1; tid < threads; ++tid) pool.emplace_back(worker, tid);
    worker(0);
}

} // namespace detail

/// Exhaustive search over every connected top-to-bottom path; no pruning, no
/// memoization, so runtime grows as Theta(m * 3^n). Among equal-cost seams the
/// lexicographically smallest column sequence wins.
inline Seam brute_force_seam(const EnergyMap& energy, int max_height = kDefaultBruteCap) {
    detail::require_nonempty(energy.width, energy.height);
    if (energy.height > max_height)
        fail(Errc::image_too_large, "height " + std::to_string(energy.height) +
                                        " exceeds brute-force cap " + std::to_string(max_height));

    const int w = energy.width, h = energy.height;
    Seam path(static_cast<size_t>(h)), best_path;
    std::vector<int> next_child(static_cast<size_t>(h));
    std::vector<double> prefix(static_cast<size_t>(h));
    double best_cost = std::numeric_limits<double>::infinity();

    // Depth-first enumeration with an explicit stack; children are visited in
    // ascending column order, so paths appear lexicographically and keeping
    // the first strict improvement yields the lexicographically smallest
    // minimum. Every path is visited in full.
    for (int start = 0; start < w; ++start) {
        int depth = 0;
        path[0] = start;
        prefix[0] = energy.at(0, start);
        next_child[0] = std::max(0, start - 1);
        while (depth >= 0) {
            if (depth == h - 1) {
                if (prefix[depth] < best_cost) {
                    best_cost = prefix[depth];
                    best_path = path;
                }
                --depth;
                continue;
            }
            const int col = path[depth];
            int& k = next_child[depth];
            if (k > std::min(w - 1, col + 1)) {
                --depth;
                continue;
            }
            const int child = k++;
            ++depth;
            path[depth] = child;
            prefix[depth] = prefix[depth - 1] + energy.at(depth, child);
            next_child[depth] = std::max(0, child - 1);
        }
    }
    return best_path;
}

/// Starts at the bottom-row minimum and walks upward through the cheapest of
/// the up-to-three neighbors; linear time, no optimality guarantee.
inline Seam greedy_seam(const EnergyMap& energy) {
    detail::require_nonempty(energy.width, energy.height);
    const int w = energy.width, h = energy.height;
    Seam seam(static_cast<size_t>(h));
    int col = detail::argmin_row(&energy.values[size_t(h - 1) * w], w);
    seam[h - 1] = col;
    for (int i = h - 2; i >= 0; --i) {
        int best_k = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int k = std::max(0, col - 1); k <= std::min(w - 1, col + 1); ++k)
            if (energy.at(i, k) < best) {
                best = energy.at(i, k);
                best_k = k;
            }
        col = best_k;
        seam[i] = col;
    }
    return seam;
}

/// Accumulated-cost table plus backtracking; globally minimal seam.
inline SeamResult dp_seam(const EnergyMap& energy) {
    detail::require_nonempty(energy.width, energy.height);
    const int w = energy.width, h = energy.height;
    CostTable t(w, h);
    for (int j = 0; j < w; ++j) {
        t.m[j] = energy.values[j];
        t.b[j] = j;
    }
    for (int i = 1; i < h; ++i) {
        const double* prev = &t.m[size_t(i - 1) * w];
        const double* e_row = &energy.values[size_t(i) * w];
        double* m_row = &t.m[size_t(i) * w];
        int* b_row = &t.b[size_t(i) * w];
        for (int j = 0; j < w; ++j) {
            int from = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int k = std::max(0, j - 1); k <= std::min(w - 1, j + 1); ++k)
                if (prev[k] < best) {
                    best = prev[k];
                    from = k;
                }
            m_row[j] = e_row[j] + best;
            b_row[j] = from;
        }
    }
    return {detail::backtrack(t), std::move(t)};
}

/// Same table as dp_seam but transitions are charged the forward-energy cost
/// of the pixel pair each arrival direction would create; row 0 seeds with the
/// straight-above arrival cost.
inline SeamResult dp_seam_forward(const LumaGrid& gray, const ForwardCosts& costs) {
    detail::require_nonempty(gray.width, gray.height);
    if (gray.width != costs.width || gray.height != costs.height)
        fail(Errc::dimension_mismatch, "forward costs do not match image dimensions");
    const int w = gray.width, h = gray.height;
    CostTable t(w, h);
    for (int j = 0; j < w; ++j) {
        t.m[j] = costs.up(0, j);
        t.b[j] = j;
    }
    for (int i = 1; i < h; ++i) {
        const double* prev = &t.m[size_t(i - 1) * w];
        for (int j = 0; j < w; ++j) {
            int from = -1;
            double best = std::numeric_limits<double>::infinity();
            if (j > 0 && prev[j - 1] + costs.left(i, j) < best) {
                best = prev[j - 1] + costs.left(i, j);
                from = j - 1;
            }
            if (prev[j] + costs.up(i, j) < best) {
                best = prev[j] + costs.up(i, j);
                from = j;
            }
            if (j < w - 1 && prev[j + 1] + costs.right(i, j) < best) {
                best = prev[j + 1] + costs.right(i, j);
                from = j + 1;
            }
            t.m[size_t(i) * w + j] = best;
            t.b[size_t(i) * w + j] = from;
        }
    }
    return {detail::backtrack(t), std::move(t)};
}

/// Row-ordered sweep with all cells of a row computed concurrently and a
/// barrier between rows; output is bit-identical to dp_seam for every input
/// and every worker count.
inline SeamResult parallel_dp_seam(const EnergyMap& energy, unsigned workers = 0) {
    detail::require_nonempty(energy.width, energy.height);
    const int w = energy.width, h = energy.height;
    CostTable t(w, h);
    for (int j = 0; j < w; ++j) {
        t.m[j] = energy.values[j];
        t.b[j] = j;
    }
    // the worker knob bounds concurrency; effective threads are capped by the
    // hardware and by a minimum span width per worker
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (workers == 0) workers = hw;
    const unsigned by_width = unsigned(std::max(1, w / detail::kMinColsPerWorker));
    detail::fill_table_rows(energy, t, std::min({workers, hw, by_width}));
    return {detail::backtrack(t), std::move(t)};
}

/// Uniform entry point used by the pipelines.
inline Seam find_seam(const EnergyMap& energy, SolverKind kind, const SolverOptions& opts = {}) {
    switch (kind) {
        case SolverKind::BruteForce: return brute_force_seam(energy, opts.brute_cap);
        case SolverKind::Greedy: return greedy_seam(energy);
        case SolverKind::Dynamic: return dp_seam(energy).seam;
        case SolverKind::ParallelDynamic: return parallel_dp_seam(energy, opts.workers).seam;
    }
    fail(Errc::usage_error, "unknown solver");
}

} // namespace carve
