#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "carve/carver.hpp"
#include "carve/energy.hpp"
#include "carve/error.hpp"
#include "carve/raster.hpp"
#include "carve/solvers.hpp"

namespace carve {

enum class Phase { single_seam, full_carve };

inline const char* to_string(Phase p) { return p == Phase::single_seam ? "single_seam" : "full_carve"; }

inline std::optional<Phase> parse_phase(const std::string& name) {
    if (name == "single_seam") return Phase::single_seam;
    if (name == "full_carve") return Phase::full_carve;
    return std::nullopt;
}

struct BenchRecord {
    SolverKind solver = SolverKind::Dynamic;
    std::string energy_fn = "e1";
    int n = 0;                   // square side length
    Phase phase = Phase::single_seam;
    std::optional<double> scale; // full_carve only
    double wall_time_s = 0.0;    // minimum over repetitions
    int repetitions = 1;
    std::string timestamp_utc;   // RFC 3339, second precision

    friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

/// Least-squares fit of log(wall time) against log(n).
struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline std::string now_rfc3339() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// deterministic benchmark fixture

/// Gradient-plus-noise test pattern: smooth regions, a high-contrast checker
/// band, and per-pixel noise. Never emits a pure-red pixel, so seam overlays
/// are exactly countable.
inline PixelGrid make_test_image(int width, int height) {
    PixelGrid img(width, height);
    std::uint32_t s = 0x9E3779B9u ^ (std::uint32_t(width) * 2654435761u) ^ std::uint32_t(height);
    auto next = [&s] {
        s ^= s << 13;
        s ^= s >> 17;
        s ^= s << 5;
        return s;
    };
    auto clamp255 = [](double v) { return std::uint8_t(std::clamp(v, 0.0, 255.0)); };
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < height; ++i)
        for (int j = 0; j < width; ++j) {
            const double u = double(i) / std::max(1, height - 1);
            const double v = double(j) / std::max(1, width - 1);
            double base = 60.0 + 70.0 * (u + v) / 2.0 + 45.0 * std::sin(3.0 * pi * u) * std::cos(3.0 * pi * v);
            // high-contrast checker band through the middle third
            if (u > 0.33 && u < 0.66 && v > 0.25 && v < 0.75)
                base += (((i / 3) + (j / 3)) % 2) ? 55.0 : -55.0;
            const int n1 = int(next() % 37) - 18;
            const int n2 = int(next() % 37) - 18;
            const int n3 = int(next() % 37) - 18;
            img.at(i, j) = Rgb{clamp255(base + n1),
                               std::uint8_t(std::clamp(base * 0.85 + 24.0 + n2, 8.0, 255.0)),
                               clamp255(210.0 - base * 0.55 + n3)};
        }
    return img;
}

inline PixelGrid center_crop(const PixelGrid& src, int width, int height) {
    if (src.width < width || src.height < height)
        fail(Errc::size_exceeds_source, "crop size exceeds source dimensions");
    const int top = (src.height - height) / 2;
    const int left = (src.width - width) / 2;
    PixelGrid out(width, height);
    for (int i = 0; i < height; ++i)
        for (int j = 0; j < width; ++j)
            out.at(i, j) = src.at(top + i, left + j);
    return out;
}

inline PixelGrid bilinear_resize(const PixelGrid& src, int width, int height) {
    PixelGrid out(width, height);
    for (int i = 0; i < height; ++i)
        for (int j = 0; j < width; ++j) {
            const double fy = std::clamp((i + 0.5) * src.height / height - 0.5, 0.0, src.height - 1.0);
            const double fx = std::clamp((j + 0.5) * src.width / width - 0.5, 0.0, src.width - 1.0);
            const int y0 = int(fy), x0 = int(fx);
            const int y1 = std::min(y0 + 1, src.height - 1), x1 = std::min(x0 + 1, src.width - 1);
            const double wy = fy - y0, wx = fx - x0;
            auto lerp = [&](auto get) {
                const double top = get(src.at(y0, x0)) * (1 - wx) + get(src.at(y0, x1)) * wx;
                const double bot = get(src.at(y1, x0)) * (1 - wx) + get(src.at(y1, x1)) * wx;
                return std::uint8_t(std::lround(top * (1 - wy) + bot * wy));
            };
            out.at(i, j) = Rgb{lerp([](const Rgb& p) { return double(p.r); }),
                               lerp([](const Rgb& p) { return double(p.g); }),
                               lerp([](const Rgb& p) { return double(p.b); })};
        }
    return out;
}

// ---------------------------------------------------------------------------
// timed measurements

namespace detail {

inline double clamp_time(double s) { return std::max(s, 1e-9); } // monotonic clock floor

} // namespace detail

/// Times only the solver call; energy/forward costs are computed once outside
/// the timed region. Reports the minimum over reps runs.
inline BenchRecord time_single_seam(const PixelGrid& grid, const CarveConfig& cfg, int reps) {
    if (reps < 1) fail(Errc::usage_error, "reps must be >= 1");
    detail::check_forward_config(cfg);

    BenchRecord rec;
    rec.solver = cfg.solver;
    rec.energy_fn = to_string(cfg.energy_fn);
    rec.n = grid.height;
    rec.phase = Phase::single_seam;
    rec.repetitions = reps;
    rec.timestamp_utc = now_rfc3339();

    const LumaGrid gray = to_grayscale(grid);
    double best = std::numeric_limits<double>::infinity();
    if (cfg.forward) {
        const ForwardCosts costs = forward_costs(gray);
        for (int r = 0; r < reps; ++r) {
            detail::Stopwatch clock;
            volatile double sink = dp_seam_forward(gray, costs).table.m.back();
            (void)sink;
            best = std::min(best, clock.seconds());
        }
    } else {
        const EnergyMap energy = compute_energy(gray, cfg.energy_fn);
        for (int r = 0; r < reps; ++r) {
            detail::Stopwatch clock;
            Seam seam = find_seam(energy, cfg.solver, cfg.solver_opts);
            best = std::min(best, clock.seconds());
            volatile int sink = seam.back();
            (void)sink;
        }
    }
    rec.wall_time_s = detail::clamp_time(best);
    return rec;
}

/// Times carve_to_width(grid, round(scale*width)) end to end, min over reps.
inline BenchRecord time_full_carve(const PixelGrid& grid, double scale, const CarveConfig& cfg, int reps) {
    if (reps < 1) fail(Errc::usage_error, "reps must be >= 1");
    if (!(scale > 0.0) || scale > 1.0) fail(Errc::usage_error, "scale must be in (0, 1]");

    BenchRecord rec;
    rec.solver = cfg.solver;
    rec.energy_fn = to_string(cfg.energy_fn);
    rec.n = grid.height;
    rec.phase = Phase::full_carve;
    rec.scale = scale;
    rec.repetitions = reps;
    rec.timestamp_utc = now_rfc3339();

    const int target = int(std::lround(scale * grid.width));
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < reps; ++r) {
        detail::Stopwatch clock;
        auto [carved, report] = carve_to_width(grid, target, cfg);
        best = std::min(best, clock.seconds());
        volatile int sink = carved.width;
        (void)sink;
    }
    rec.wall_time_s = detail::clamp_time(best);
    return rec;
}

enum class Resample { crop_or_resize, crop_only };

/// Runs both phases for every (size, solver) pair on square crops/resizes of
/// the source image.
inline std::vector<BenchRecord> run_suite(const std::vector<int>& sizes,
                                          const std::vector<SolverKind>& solvers, double scale,
                                          const PixelGrid& source, int reps,
                                          EnergyFn energy_fn = EnergyFn::e1,
                                          Resample policy = Resample::crop_or_resize,
                                          const SolverOptions& opts = {}) {
    for (SolverKind solver : solvers)
        if (solver == SolverKind::BruteForce)
            for (int n : sizes)
                if (n > opts.brute_cap)
                    fail(Errc::solver_cap_violated,
                         "brute force requested at size " + std::to_string(n) + " above cap " +
                             std::to_string(opts.brute_cap));

    std::vector<BenchRecord> records;
    for (int n : sizes) {
        if (n < 1) fail(Errc::usage_error, "suite sizes must be >= 1");
        PixelGrid img;
        if (source.width >= n && source.height >= n) {
            img = center_crop(source, n, n);
        } else if (policy == Resample::crop_only) {
            fail(Errc::size_exceeds_source, "source smaller than requested size");
        } else {
            img = bilinear_resize(source, n, n);
        }
        for (SolverKind solver : solvers) {
            CarveConfig cfg;
            cfg.solver = solver;
            cfg.energy_fn = energy_fn;
            cfg.solver_opts = opts;
            records.push_back(time_single_seam(img, cfg, reps));
            records.push_back(time_full_carve(img, scale, cfg, reps));
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// analysis

/// Ordinary least squares on (ln n, ln t) for one solver/phase.
inline ScalingFit fit_scaling(const std::vector<BenchRecord>& records, SolverKind solver, Phase phase) {
    std::map<int, double> by_n; // min time per distinct n
    for (const BenchRecord& r : records)
        if (r.solver == solver && r.phase == phase) {
            auto [it, inserted] = by_n.try_emplace(r.n, r.wall_time_s);
            if (!inserted) it->second = std::min(it->second, r.wall_time_s);
        }
    if (by_n.size() < 3)
        fail(Errc::insufficient_data, "need at least 3 distinct sizes to fit a scaling law");

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double count = double(by_n.size());
    for (auto [n, t] : by_n) {
        const double x = std::log(double(n));
        const double y = std::log(std::max(t, 1e-12));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = count * sxx - sx * sx;
    ScalingFit fit;
    fit.slope = (count * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / count;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / count;
    for (auto [n, t] : by_n) {
        const double x = std::log(double(n));
        const double y = std::log(std::max(t, 1e-12));
        const double pred = fit.intercept + fit.slope * x;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

/// Implied per-row branching factor of the brute-force search: geometric mean
/// of (t(n2)/t(n1))^(1/(n2-n1)) over consecutive single-seam records.
inline double exp_growth_ratio(const std::vector<BenchRecord>& records) {
    std::map<int, double> by_n;
    for (const BenchRecord& r : records)
        if (r.solver == SolverKind::BruteForce && r.phase == Phase::single_seam) {
            auto [it, inserted] = by_n.try_emplace(r.n, r.wall_time_s);
            if (!inserted) it->second = std::min(it->second, r.wall_time_s);
        }
    if (by_n.size() < 2)
        fail(Errc::insufficient_data, "need at least 2 brute-force sizes for a growth ratio");

    double log_sum = 0.0;
    int pairs = 0;
    auto prev = by_n.begin();
    for (auto it = std::next(by_n.begin()); it != by_n.end(); ++it, ++prev) {
        const double ratio = it->second / prev->second;
        log_sum += std::log(ratio) / double(it->first - prev->first);
        ++pairs;
    }
    return std::exp(log_sum / pairs);
}

// ---------------------------------------------------------------------------
// outputs

inline constexpr const char* kCsvHeader = "solver,energy_fn,n,phase,scale,wall_time_s,repetitions,timestamp_utc";

inline void emit_csv(const std::vector<BenchRecord>& records, const std::string& path) {
    detail::File f(path.c_str(), "wb");
    if (!f.fp) fail(Errc::io_failure, path + ": cannot open for writing");
    std::fprintf(f.fp, "%s\n", kCsvHeader);
    for (const BenchRecord& r : records) {
        char scale_buf[32] = "";
        if (r.scale) std::snprintf(scale_buf, sizeof scale_buf, "%.6f", *r.scale);
        if (std::fprintf(f.fp, "%s,%s,%d,%s,%s,%.6f,%d,%s\n", to_string(r.solver), r.energy_fn.c_str(),
                         r.n, to_string(r.phase), scale_buf, r.wall_time_s, r.repetitions,
                         r.timestamp_utc.c_str()) < 0)
            fail(Errc::io_failure, path + ": write failed");
    }
}

namespace detail {

struct SeriesKey {
    SolverKind solver;
    Phase phase;
    auto operator<=>(const SeriesKey&) const = default;
};

} // namespace detail

/// Self-contained SVG log-log chart, one polyline per (solver, phase).
inline void emit_plot(const std::vector<BenchRecord>& records, const std::string& path) {
    if (records.empty()) fail(Errc::empty_input, "no records to plot");

    std::map<detail::SeriesKey, std::map<int, double>> series;
    double t_lo = std::numeric_limits<double>::infinity(), t_hi = 0;
    int n_lo = std::numeric_limits<int>::max(), n_hi = 0;
    for (const BenchRecord& r : records) {
        series[{r.solver, r.phase}][r.n] = r.wall_time_s;
        t_lo = std::min(t_lo, r.wall_time_s);
        t_hi = std::max(t_hi, r.wall_time_s);
        n_lo = std::min(n_lo, r.n);
        n_hi = std::max(n_hi, r.n);
    }

    const double width = 860, height = 600;
    const double ml = 90, mr = 220, mt = 40, mb = 70;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const double lx0 = std::log10(double(n_lo)), lx1 = std::log10(double(std::max(n_hi, n_lo + 1)));
    const double ly0 = std::log10(std::max(t_lo, 1e-12));
    const double ly1 = std::log10(std::max(t_hi, t_lo * 1.0000001));
    auto px = [&](double n) { return ml + (std::log10(n) - lx0) / (lx1 - lx0) * pw; };
    auto py = [&](double t) { return mt + ph - (std::log10(std::max(t, 1e-12)) - ly0) / (ly1 - ly0) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

    std::string svg;
    auto append = [&svg](const char* fmt, auto... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        svg += buf;
    };
    append("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
           "viewBox=\"0 0 %.0f %.0f\" font-family=\"sans-serif\" font-size=\"13\">\n",
           width, height, width, height);
    append("<rect width=\"%.0f\" height=\"%.0f\" fill=\"white\"/>\n", width, height);
    append("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", ml, mt + ph,
           ml + pw, mt + ph);
    append("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", ml, mt, ml,
           mt + ph);
    append("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">n (pixels, log)</text>\n", ml + pw / 2,
           height - 20.0);
    append("<text x=\"22\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 22 %.1f)\">"
           "wall time (s, log)</text>\n",
           mt + ph / 2, mt + ph / 2);

    // decade ticks
    for (int d = int(std::floor(ly0)); d <= int(std::ceil(ly1)); ++d) {
        const double t = std::pow(10.0, d);
        if (t < std::pow(10.0, ly0) - 1e-300 || std::log10(t) > ly1 + 1e-9) continue;
        append("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#cccccc\"/>\n", ml, py(t),
               ml + pw, py(t));
        append("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">1e%d</text>\n", ml - 6, py(t) + 4.0, d);
    }
    {
        std::map<int, bool> xs;
        for (const auto& [key, points] : series)
            for (auto [n, t] : points) xs[n] = true;
        for (auto [n, _] : xs)
            append("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%d</text>\n", px(double(n)),
                   mt + ph + 18.0, n);
    }

    int color = 0;
    double legend_y = mt + 10;
    for (const auto& [key, points] : series) {
        const char* stroke = palette[color % 8];
        std::string pts;
        for (auto [n, t] : points) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(double(n)), py(t));
            pts += buf;
        }
        append("<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"2\" points=\"%s\"/>\n", stroke,
               pts.c_str());
        append("<rect x=\"%.1f\" y=\"%.1f\" width=\"14\" height=\"4\" fill=\"%s\"/>\n", ml + pw + 16,
               legend_y - 4, stroke);
        append("<text x=\"%.1f\" y=\"%.1f\">%s / %s</text>\n", ml + pw + 36, legend_y,
               to_string(key.solver), to_string(key.phase));
        legend_y += 20;
        ++color;
    }
    svg += "</svg>\n";

    detail::File f(path.c_str(), "wb");
    if (!f.fp) fail(Errc::io_failure, path + ": cannot open for writing");
    if (std::fwrite(svg.data(), 1, svg.size(), f.fp) != svg.size())
        fail(Errc::io_failure, path + ": write failed");
}

} // namespace carve
