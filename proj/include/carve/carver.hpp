#pragma once

#include <chrono>
#include <optional>
#include <utility>
#include <vector>

#include "carve/energy.hpp"
#include "carve/error.hpp"
#include "carve/raster.hpp"
#include "carve/solvers.hpp"

namespace carve {

struct CarveConfig {
    SolverKind solver = SolverKind::ParallelDynamic;
    EnergyFn energy_fn = EnergyFn::e1;
    bool forward = false;   // forward-energy transition costs (dp/pardp only)
    bool recompute = true;  // recompute energy after every removal
    SolverOptions solver_opts{};
};

struct SeamTiming {
    double energy_s = 0.0;
    double solve_s = 0.0;
    double remove_s = 0.0;
};

struct CarveReport {
    int seam_count = 0;
    std::vector<SeamTiming> per_seam;
    std::vector<Seam> seams; // coordinates of the image each seam was taken from
    double total_s = 0.0;
};

namespace detail {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    double lap() {
        const auto t1 = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(t1 - t0).count();
        t0 = t1;
        return s;
    }
};

inline void check_forward_config(const CarveConfig& cfg) {
    if (cfg.forward && cfg.solver != SolverKind::Dynamic && cfg.solver != SolverKind::ParallelDynamic)
        fail(Errc::usage_error, "forward energy requires the dp or pardp solver");
}

// column deletion on a row-major scalar grid
inline std::vector<double> drop_columns(const std::vector<double>& values, int width, int height,
                                        const Seam& seam) {
    std::vector<double> out(size_t(width - 1) * height);
    for (int i = 0; i < height; ++i) {
        const double* src = &values[size_t(i) * width];
        double* dst = &out[size_t(i) * (width - 1)];
        std::copy(src, src + seam[i], dst);
        std::copy(src + seam[i] + 1, src + width, dst + seam[i]);
    }
    return out;
}

} // namespace detail

inline PixelGrid remove_seam(const PixelGrid& grid, const Seam& seam) {
    validate_seam(seam, grid.width, grid.height);
    if (grid.width < 2) fail(Errc::width_too_small, "cannot remove a seam from a 1-pixel-wide image");
    PixelGrid out(grid.width - 1, grid.height);
    for (int i = 0; i < grid.height; ++i) {
        const Rgb* src = &grid.pixels[size_t(i) * grid.width];
        Rgb* dst = &out.pixels[size_t(i) * out.width];
        std::copy(src, src + seam[i], dst);
        std::copy(src + seam[i] + 1, src + grid.width, dst + seam[i]);
    }
    return out;
}

inline LumaGrid remove_seam(const LumaGrid& gray, const Seam& seam) {
    LumaGrid out;
    out.width = gray.width - 1;
    out.height = gray.height;
    out.values = detail::drop_columns(gray.values, gray.width, gray.height, seam);
    return out;
}

inline EnergyMap remove_seam(const EnergyMap& energy, const Seam& seam) {
    EnergyMap out;
    out.width = energy.width - 1;
    out.height = energy.height;
    out.values = detail::drop_columns(energy.values, energy.width, energy.height, seam);
    return out;
}

inline RemovalMask remove_seam(const RemovalMask& mask, const Seam& seam) {
    RemovalMask out;
    out.width = mask.width - 1;
    out.height = mask.height;
    out.flags.resize(size_t(out.width) * out.height);
    for (int i = 0; i < mask.height; ++i) {
        const std::uint8_t* src = &mask.flags[size_t(i) * mask.width];
        std::uint8_t* dst = &out.flags[size_t(i) * out.width];
        std::copy(src, src + seam[i], dst);
        std::copy(src + seam[i] + 1, src + mask.width, dst + seam[i]);
    }
    return out;
}

namespace detail {

// Per-row duplication without the seam-connectivity requirement: replayed
// recorded seams may legally jump more than one column between rows.
inline PixelGrid insert_columns(const PixelGrid& grid, const std::vector<int>& cols) {
    PixelGrid out(grid.width + 1, grid.height);
    for (int i = 0; i < grid.height; ++i) {
        const int c = cols[i];
        const Rgb* src = &grid.pixels[size_t(i) * grid.width];
        Rgb* dst = &out.pixels[size_t(i) * out.width];
        std::copy(src, src + c + 1, dst);
        const Rgb& a = src[c];
        const Rgb& b = src[std::min(c + 1, grid.width - 1)];
        dst[c + 1] = Rgb{std::uint8_t((a.r + b.r + 1) / 2), std::uint8_t((a.g + b.g + 1) / 2),
                         std::uint8_t((a.b + b.b + 1) / 2)};
        std::copy(src + c + 1, src + grid.width, dst + c + 2);
    }
    return out;
}

} // namespace detail

/// Inserts one pixel per row right of the seam, averaging the left/right
/// neighbors (duplicating at the right border).
inline PixelGrid insert_seam(const PixelGrid& grid, const Seam& seam) {
    validate_seam(seam, grid.width, grid.height);
    return detail::insert_columns(grid, seam);
}

namespace detail {

struct EnergyState {
    std::optional<EnergyMap> energy;
    std::optional<LumaGrid> gray;
    std::optional<ForwardCosts> costs;
};

// One find-the-minimum-seam step; honors cfg.recompute by carving the cached
// energy (and forward costs) instead of recomputing them.
inline Seam solve_step(const PixelGrid& current, const CarveConfig& cfg, EnergyState& state,
                       SeamTiming& timing) {
    Stopwatch clock;
    if (cfg.forward) {
        if (cfg.recompute || !state.gray) {
            state.gray = to_grayscale(current);
            state.costs = forward_costs(*state.gray);
        }
    } else if (cfg.recompute || !state.energy) {
        state.energy = compute_energy(to_grayscale(current), cfg.energy_fn);
    }
    timing.energy_s = clock.lap();

    Seam seam;
    if (cfg.forward)
        seam = dp_seam_forward(*state.gray, *state.costs).seam;
    else
        seam = find_seam(*state.energy, cfg.solver, cfg.solver_opts);
    timing.solve_s = clock.lap();
    return seam;
}

inline void carve_cached_state(const CarveConfig& cfg, EnergyState& state, const Seam& seam) {
    if (cfg.recompute) return;
    if (cfg.forward) {
        const int w = state.gray->width, h = state.gray->height;
        state.costs->cost_left = drop_columns(state.costs->cost_left, w, h, seam);
        state.costs->cost_up = drop_columns(state.costs->cost_up, w, h, seam);
        state.costs->cost_right = drop_columns(state.costs->cost_right, w, h, seam);
        state.costs->width -= 1;
        *state.gray = remove_seam(*state.gray, seam);
    } else {
        *state.energy = remove_seam(*state.energy, seam);
    }
}

} // namespace detail

inline std::pair<PixelGrid, CarveReport> carve_to_width(const PixelGrid& grid, int target_width,
                                                        const CarveConfig& cfg = {}) {
    if (target_width < 1 || target_width > grid.width)
        fail(Errc::invalid_target, "target width must be in [1, width]");
    detail::check_forward_config(cfg);

    detail::Stopwatch total;
    CarveReport report;
    detail::EnergyState state;
    PixelGrid current = grid;
    while (current.width > target_width) {
        SeamTiming timing;
        Seam seam = detail::solve_step(current, cfg, state, timing);
        detail::Stopwatch removal;
        current = remove_seam(current, seam);
        detail::carve_cached_state(cfg, state, seam);
        timing.remove_s = removal.seconds();
        report.per_seam.push_back(timing);
        report.seams.push_back(std::move(seam));
        ++report.seam_count;
    }
    report.total_s = total.seconds();
    return {std::move(current), std::move(report)};
}

inline std::pair<PixelGrid, CarveReport> carve_to_height(const PixelGrid& grid, int target_height,
                                                         const CarveConfig& cfg = {}) {
    if (target_height < 1 || target_height > grid.height)
        fail(Errc::invalid_target, "target height must be in [1, height]");
    auto [carved, report] = carve_to_width(transpose(grid), target_height, cfg);
    return {transpose(carved), std::move(report)};
}

/// Runs the removal loop on a scratch copy and reports each seam in
/// original-image coordinates (per-row survivor tracking).
inline std::pair<std::vector<Seam>, CarveReport> record_seams(const PixelGrid& grid, int count,
                                                              const CarveConfig& cfg = {}) {
    if (count < 0 || count > grid.width - 1)
        fail(Errc::invalid_target, "cannot record more seams than width-1");
    detail::check_forward_config(cfg);

    detail::Stopwatch total;
    CarveReport report;
    std::vector<std::vector<int>> survivor(size_t(grid.height));
    for (auto& row : survivor) {
        row.resize(size_t(grid.width));
        for (int j = 0; j < grid.width; ++j) row[j] = j;
    }

    std::vector<Seam> recorded;
    detail::EnergyState state;
    PixelGrid scratch = grid;
    for (int s = 0; s < count; ++s) {
        SeamTiming timing;
        Seam seam = detail::solve_step(scratch, cfg, state, timing);
        Seam original(seam.size());
        for (size_t i = 0; i < seam.size(); ++i) {
            original[i] = survivor[i][seam[i]];
            survivor[i].erase(survivor[i].begin() + seam[i]);
        }
        detail::Stopwatch removal;
        scratch = remove_seam(scratch, seam);
        detail::carve_cached_state(cfg, state, seam);
        timing.remove_s = removal.seconds();
        recorded.push_back(std::move(original));
        report.per_seam.push_back(timing);
        ++report.seam_count;
    }
    report.seams = recorded;
    report.total_s = total.seconds();
    return {std::move(recorded), std::move(report)};
}

/// Two-phase enlargement: record the seams removal would pick (original image
/// untouched), then replay them oldest-first, shifting later recorded columns
/// right by one wherever they land at-or-right-of an inserted column.
inline std::pair<PixelGrid, CarveReport> enlarge_to_width(const PixelGrid& grid, int target_width,
                                                          const CarveConfig& cfg = {}) {
    const int k = target_width - grid.width;
    if (k < 0) fail(Errc::invalid_target, "enlargement target is below the current width");
    if (target_width > 2 * grid.width - 1)
        fail(Errc::target_too_large, "single-pass enlargement is limited to 2*width-1");

    detail::Stopwatch total;
    auto [seams, report] = record_seams(grid, k, cfg);
    PixelGrid current = grid;
    for (size_t t = 0; t < seams.size(); ++t) {
        current = detail::insert_columns(current, seams[t]);
        for (size_t u = t + 1; u < seams.size(); ++u)
            for (size_t i = 0; i < seams[u].size(); ++i)
                if (seams[u][i] >= seams[t][i]) ++seams[u][i];
    }
    report.total_s = total.seconds();
    return {std::move(current), std::move(report)};
}

namespace detail {

inline std::pair<PixelGrid, CarveReport> remove_object_vertical(const PixelGrid& grid,
                                                                const RemovalMask& mask,
                                                                const CarveConfig& cfg, bool restore) {
    Stopwatch total;
    CarveReport report;
    PixelGrid current = grid;
    RemovalMask remaining = mask;
    while (remaining.marked_count() > 0) {
        if (current.width < 2)
            fail(Errc::width_too_small, "mask cannot be carved out of a 1-pixel-wide image");
        SeamTiming timing;
        Stopwatch clock;
        EnergyMap energy = compute_energy(to_grayscale(current), cfg.energy_fn);
        EnergyMap biased = apply_mask(energy, remaining);
        timing.energy_s = clock.lap();
        Seam seam = find_seam(biased, cfg.solver, cfg.solver_opts);
        timing.solve_s = clock.lap();
        current = remove_seam(current, seam);
        remaining = remove_seam(remaining, seam);
        timing.remove_s = clock.lap();
        report.per_seam.push_back(timing);
        report.seams.push_back(std::move(seam));
        ++report.seam_count;
    }
    if (restore && current.width < grid.width) {
        auto [restored, enlarge_report] = enlarge_to_width(current, grid.width, cfg);
        current = std::move(restored);
        (void)enlarge_report;
    }
    report.total_s = total.seconds();
    return {std::move(current), std::move(report)};
}

} // namespace detail

/// Carves masked pixels out along the mask's narrow direction, then enlarges
/// back to the original dimensions unless restore is false.
inline std::pair<PixelGrid, CarveReport> remove_object(const PixelGrid& grid, const RemovalMask& mask,
                                                       const CarveConfig& cfg = {}, bool restore = true) {
    detail::check_forward_config(cfg); // the mask bias lives in the energy map, so the
                                       // removal loop always solves the backward form
    if (grid.width != mask.width || grid.height != mask.height)
        fail(Errc::dimension_mismatch, "mask dimensions do not match image");
    const MaskBounds bounds = mask_bounds(mask);
    if (bounds.bottom < bounds.top) fail(Errc::empty_mask, "removal mask marks no pixels");

    if (bounds.width() <= bounds.height())
        return detail::remove_object_vertical(grid, mask, cfg, restore);

    auto [carved, report] = detail::remove_object_vertical(transpose(grid), transpose(mask), cfg, restore);
    return {transpose(carved), std::move(report)};
}

} // namespace carve
