#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "carve/error.hpp"
#include "carve/raster.hpp"

namespace carve {

/// Per-pixel importance values; negative only after a removal-mask override.
struct EnergyMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double& at(int row, int col) { return values[size_t(row) * width + col]; }
    double at(int row, int col) const { return values[size_t(row) * width + col]; }
};

struct RemovalMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> flags; // nonzero = remove

    bool marked(int row, int col) const { return flags[size_t(row) * width + col] != 0; }
    void set(int row, int col, bool v) { flags[size_t(row) * width + col] = v ? 1 : 0; }

    size_t marked_count() const {
        size_t n = 0;
        for (auto f : flags) n += (f != 0);
        return n;
    }
};

/// Transition costs charged when the seam arrives at (i,j) from the
/// upper-left, directly above, or upper-right.
struct ForwardCosts {
    int width = 0;
    int height = 0;
    std::vector<double> cost_left, cost_up, cost_right;

    double left(int row, int col) const { return cost_left[size_t(row) * width + col]; }
    double up(int row, int col) const { return cost_up[size_t(row) * width + col]; }
    double right(int row, int col) const { return cost_right[size_t(row) * width + col]; }
};

enum class EnergyFn { e1, e2, hog, entropy };

inline const char* to_string(EnergyFn fn) {
    switch (fn) {
        case EnergyFn::e1: return "e1";
        case EnergyFn::e2: return "e2";
        case EnergyFn::hog: return "hog";
        case EnergyFn::entropy: return "entropy";
    }
    return "?";
}

// Window/histogram parameters for the hog and entropy functions.
inline constexpr int kHogWindow = 11;
inline constexpr int kHogBins = 8;
inline constexpr double kHogDenomFloor = 1e-6;
inline constexpr int kEntropyWindow = 9;
inline constexpr int kEntropyBins = 16;

namespace detail {

inline EnergyMap make_map(int w, int h) {
    EnergyMap m;
    m.width = w;
    m.height = h;
    m.values.assign(size_t(w) * h, 0.0);
    return m;
}

// first central differences, edge-replicated; magnitudes are |f(x+1)-f(x-1)|
inline void gradients(const LumaGrid& g, int i, int j, double& gx, double& gy) {
    gx = g.at_clamped(i, j + 1) - g.at_clamped(i, j - 1);
    gy = g.at_clamped(i + 1, j) - g.at_clamped(i - 1, j);
}

} // namespace detail

inline EnergyMap energy_e1(const LumaGrid& gray) {
    EnergyMap out = detail::make_map(gray.width, gray.height);
    for (int i = 0; i < gray.height; ++i)
        for (int j = 0; j < gray.width; ++j) {
            double gx, gy;
            detail::gradients(gray, i, j, gx, gy);
            out.at(i, j) = std::abs(gx) + std::abs(gy);
        }
    return out;
}

inline EnergyMap energy_e2(const LumaGrid& gray) {
    EnergyMap out = detail::make_map(gray.width, gray.height);
    for (int i = 0; i < gray.height; ++i)
        for (int j = 0; j < gray.width; ++j) {
            double gx, gy;
            detail::gradients(gray, i, j, gx, gy);
            const double c = gray.at(i, j);
            const double dxx = gray.at_clamped(i, j + 1) - 2.0 * c + gray.at_clamped(i, j - 1);
            const double dyy = gray.at_clamped(i + 1, j) - 2.0 * c + gray.at_clamped(i - 1, j);
            out.at(i, j) = std::abs(gx) + std::abs(gy) + std::abs(dxx) + std::abs(dyy);
        }
    return out;
}

inline EnergyMap energy_hog(const LumaGrid& gray) {
    const int w = gray.width, h = gray.height;
    const int r = kHogWindow / 2;

    // per-pixel gradient magnitude and orientation bin, precomputed once
    std::vector<double> mag(size_t(w) * h);
    std::vector<std::uint8_t> bin(size_t(w) * h);
    std::vector<double> e1v(size_t(w) * h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            double gx, gy;
            detail::gradients(gray, i, j, gx, gy);
            const size_t idx = size_t(i) * w + j;
            mag[idx] = std::hypot(gx, gy);
            e1v[idx] = std::abs(gx) + std::abs(gy);
            constexpr double pi = std::numbers::pi;
            double angle = std::atan2(gy, gx); // [-pi, pi]
            int b = int((angle + pi) / (2.0 * pi) * kHogBins);
            bin[idx] = std::uint8_t(std::clamp(b, 0, kHogBins - 1));
        }

    EnergyMap out = detail::make_map(w, h);
    std::array<double, kHogBins> hist{};
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            hist.fill(0.0);
            for (int di = -r; di <= r; ++di) {
                const int ii = std::clamp(i + di, 0, h - 1);
                for (int dj = -r; dj <= r; ++dj) {
                    const int jj = std::clamp(j + dj, 0, w - 1);
                    const size_t idx = size_t(ii) * w + jj;
                    hist[bin[idx]] += mag[idx];
                }
            }
            double max_bin = 0.0;
            for (double v : hist) max_bin = std::max(max_bin, v);
            out.at(i, j) = e1v[size_t(i) * w + j] / std::max(max_bin, kHogDenomFloor);
        }
    return out;
}

inline EnergyMap energy_entropy(const LumaGrid& gray) {
    const int w = gray.width, h = gray.height;
    const int r = kEntropyWindow / 2;
    const double window_count = double(kEntropyWindow) * kEntropyWindow;

    EnergyMap e1m = energy_e1(gray);
    EnergyMap out = detail::make_map(w, h);
    std::array<int, kEntropyBins> hist{};
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            hist.fill(0);
            for (int di = -r; di <= r; ++di) {
                const int ii = std::clamp(i + di, 0, h - 1);
                for (int dj = -r; dj <= r; ++dj) {
                    const int jj = std::clamp(j + dj, 0, w - 1);
                    const double v = gray.at(ii, jj);
                    const int b = std::clamp(int(v / (256.0 / kEntropyBins)), 0, kEntropyBins - 1);
                    ++hist[b];
                }
            }
            double entropy = 0.0;
            for (int c : hist) {
                if (c == 0) continue; // 0*log0 == 0
                const double p = c / window_count;
                entropy -= p * std::log2(p);
            }
            out.at(i, j) = e1m.at(i, j) + entropy;
        }
    return out;
}

inline EnergyMap compute_energy(const LumaGrid& gray, EnergyFn fn) {
    switch (fn) {
        case EnergyFn::e1: return energy_e1(gray);
        case EnergyFn::e2: return energy_e2(gray);
        case EnergyFn::hog: return energy_hog(gray);
        case EnergyFn::entropy: return energy_entropy(gray);
    }
    fail(Errc::usage_error, "unknown energy function");
}

inline ForwardCosts forward_costs(const LumaGrid& gray) {
    ForwardCosts fc;
    fc.width = gray.width;
    fc.height = gray.height;
    const size_t n = size_t(gray.width) * gray.height;
    fc.cost_left.resize(n);
    fc.cost_up.resize(n);
    fc.cost_right.resize(n);
    for (int i = 0; i < gray.height; ++i)
        for (int j = 0; j < gray.width; ++j) {
            const double left = gray.at_clamped(i, j - 1);
            const double right = gray.at_clamped(i, j + 1);
            const double above = gray.at_clamped(i - 1, j);
            const size_t idx = size_t(i) * gray.width + j;
            const double cu = std::abs(right - left);
            fc.cost_up[idx] = cu;
            fc.cost_left[idx] = cu + std::abs(above - left);
            fc.cost_right[idx] = cu + std::abs(above - right);
        }
    return fc;
}

/// Forces masked cells low enough that any seam crossing the mask is
/// cheaper than any seam avoiding it.
inline EnergyMap apply_mask(const EnergyMap& energy, const RemovalMask& mask) {
    if (energy.width != mask.width || energy.height != mask.height)
        fail(Errc::dimension_mismatch, "mask dimensions do not match energy map");

    double max_unmasked = 0.0;
    bool any_unmasked = false;
    double max_all = 0.0;
    for (size_t i = 0; i < energy.values.size(); ++i) {
        max_all = std::max(max_all, energy.values[i]);
        if (!mask.flags[i]) {
            max_unmasked = std::max(max_unmasked, energy.values[i]);
            any_unmasked = true;
        }
    }
    const double m = any_unmasked ? max_unmasked : max_all;
    const double k = 1000.0 * (double(energy.height) * m + 1.0);

    EnergyMap out = energy;
    for (size_t i = 0; i < out.values.size(); ++i)
        if (mask.flags[i]) out.values[i] = -k;
    return out;
}

/// level >= 128 marks a pixel for removal.
inline RemovalMask mask_from_image(const PixelGrid& img) {
    RemovalMask mask;
    mask.width = img.width;
    mask.height = img.height;
    mask.flags.resize(img.pixels.size());
    LumaGrid gray = to_grayscale(img);
    for (size_t i = 0; i < gray.values.size(); ++i)
        mask.flags[i] = gray.values[i] >= 128.0 ? 1 : 0;
    return mask;
}

inline RemovalMask transpose(const RemovalMask& mask) {
    RemovalMask out;
    out.width = mask.height;
    out.height = mask.width;
    out.flags.resize(mask.flags.size());
    for (int i = 0; i < mask.height; ++i)
        for (int j = 0; j < mask.width; ++j)
            out.flags[size_t(j) * out.width + i] = mask.flags[size_t(i) * mask.width + j];
    return out;
}

struct MaskBounds {
    int top = 0, left = 0, bottom = -1, right = -1; // inclusive; empty when bottom < top
    int width() const { return right - left + 1; }
    int height() const { return bottom - top + 1; }
};

inline MaskBounds mask_bounds(const RemovalMask& mask) {
    MaskBounds b{mask.height, mask.width, -1, -1};
    for (int i = 0; i < mask.height; ++i)
        for (int j = 0; j < mask.width; ++j)
            if (mask.marked(i, j)) {
                b.top = std::min(b.top, i);
                b.left = std::min(b.left, j);
                b.bottom = std::max(b.bottom, i);
                b.right = std::max(b.right, j);
            }
    return b;
}

/// Min-max normalization to 8-bit gray; constant maps normalize to 0.
inline std::vector<std::uint8_t> normalize_to_gray(const EnergyMap& energy) {
    double lo = energy.values.empty() ? 0.0 : energy.values[0];
    double hi = lo;
    for (double v : energy.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<std::uint8_t> out(energy.values.size(), 0);
    const double span = hi - lo;
    if (span > 0.0)
        for (size_t i = 0; i < out.size(); ++i)
            out[i] = std::uint8_t(std::lround((energy.values[i] - lo) / span * 255.0));
    return out;
}

} // namespace carve
