#pragma once

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "carve/bench.hpp"
#include "carve/carver.hpp"
#include "carve/energy.hpp"
#include "carve/error.hpp"
#include "carve/raster.hpp"
#include "carve/solvers.hpp"

#include "CLI11.hpp"

namespace carve::cli {

struct SolverFlags {
    std::string solver = "pardp";
    std::string energy = "e1";
    bool forward = false;
};

struct ResizeCmd {
    std::string input, output;
    std::optional<double> scale;
    std::optional<int> width, height;
    SolverFlags flags;
};

struct EnlargeCmd {
    std::string input, output;
    std::optional<double> scale;
    std::optional<int> width, height;
    SolverFlags flags;
};

struct RemoveObjectCmd {
    std::string input, mask, output;
    bool no_restore = false;
    SolverFlags flags;
};

struct EnergyCmd {
    std::string input, output;
    std::string energy = "e1";
};

struct SeamsCmd {
    std::string input, output;
    int count = 1;
    SolverFlags flags;
};

struct BenchCmd {
    std::string suite; // "fast", "brute", or empty when --sizes given
    std::vector<int> sizes;
    std::vector<std::string> solvers;
    double scale = 0.5;
    int reps = 3;
    std::string csv;
    std::string plot;
    std::string input; // optional source image; default is the generated fixture
};

struct HelpShown {};

using CliCommand =
    std::variant<HelpShown, ResizeCmd, EnlargeCmd, RemoveObjectCmd, EnergyCmd, SeamsCmd, BenchCmd>;

inline std::vector<int> resolved_sizes(const BenchCmd& cmd) {
    if (cmd.suite == "fast") return {180, 360, 480, 720, 1080};
    if (cmd.suite == "brute") return {2, 5, 7, 10, 12};
    return cmd.sizes;
}

inline std::vector<std::string> resolved_solver_names(const BenchCmd& cmd) {
    if (!cmd.solvers.empty()) return cmd.solvers;
    if (cmd.suite == "brute") return {"bruteforce"};
    return {"greedy", "dp", "pardp"};
}

namespace detail {

inline void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
    cmd->add_option("--solver", flags.solver, "seam search backend")
        ->check(CLI::IsMember({"bruteforce", "greedy", "dp", "pardp"}));
    cmd->add_option("--energy", flags.energy, "energy function")
        ->check(CLI::IsMember({"e1", "e2", "hog", "entropy"}));
    cmd->add_flag("--forward", flags.forward, "use forward-energy transition costs");
}

inline CLI::Validator scale_range() {
    return CLI::Validator(
        [](std::string& s) -> std::string {
            try {
                const double v = std::stod(s);
                if (v > 0.0 && v <= 2.0) return {};
            } catch (...) {
            }
            return "scale must be in (0, 2]";
        },
        "SCALE");
}

inline SolverOptions env_solver_options() {
    SolverOptions opts;
    if (const char* s = std::getenv("CARVE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(s, &end, 10);
        if (end == s || *end != '\0' || v < 0)
            fail(Errc::usage_error, "CARVE_WORKERS must be a nonnegative integer");
        opts.workers = unsigned(v);
    }
    if (const char* s = std::getenv("CARVE_BRUTE_CAP")) {
        char* end = nullptr;
        const long v = std::strtol(s, &end, 10);
        if (end == s || *end != '\0' || v < 1)
            fail(Errc::usage_error, "CARVE_BRUTE_CAP must be a positive integer");
        opts.brute_cap = int(v);
    }
    return opts;
}

inline CarveConfig make_config(const SolverFlags& flags) {
    CarveConfig cfg;
    cfg.solver = *parse_solver(flags.solver);
    if (flags.energy == "e1") cfg.energy_fn = EnergyFn::e1;
    else if (flags.energy == "e2") cfg.energy_fn = EnergyFn::e2;
    else if (flags.energy == "hog") cfg.energy_fn = EnergyFn::hog;
    else cfg.energy_fn = EnergyFn::entropy;
    cfg.forward = flags.forward;
    cfg.solver_opts = env_solver_options();
    return cfg;
}

inline int scaled_target(double scale, int extent) {
    return int(std::lround(scale * extent));
}

} // namespace detail

inline CliCommand parse_args(const std::vector<std::string>& args) {
    CLI::App app{"content-aware image resizing via seam carving"};
    app.require_subcommand(1);

    ResizeCmd resize;
    EnlargeCmd enlarge;
    RemoveObjectCmd removal;
    EnergyCmd energy;
    SeamsCmd seams;
    BenchCmd bench;

    auto* r = app.add_subcommand("resize", "shrink an image to a target size");
    r->add_option("--input", resize.input)->required();
    r->add_option("--output", resize.output)->required();
    auto* r_scale = r->add_option("--scale", resize.scale, "column ratio in (0, 2]")->check(detail::scale_range());
    auto* r_width = r->add_option("--width", resize.width)->check(CLI::PositiveNumber);
    r->add_option("--height", resize.height)->check(CLI::PositiveNumber);
    r_scale->excludes(r_width);
    r_width->excludes(r_scale);
    detail::add_solver_flags(r, resize.flags);

    auto* e = app.add_subcommand("enlarge", "widen an image by seam insertion");
    e->add_option("--input", enlarge.input)->required();
    e->add_option("--output", enlarge.output)->required();
    auto* e_scale = e->add_option("--scale", enlarge.scale)->check(detail::scale_range());
    auto* e_width = e->add_option("--width", enlarge.width)->check(CLI::PositiveNumber);
    e->add_option("--height", enlarge.height)->check(CLI::PositiveNumber);
    e_scale->excludes(e_width);
    e_width->excludes(e_scale);
    detail::add_solver_flags(e, enlarge.flags);

    auto* o = app.add_subcommand("remove-object", "carve out a masked region");
    o->add_option("--input", removal.input)->required();
    o->add_option("--mask", removal.mask)->required();
    o->add_option("--output", removal.output)->required();
    o->add_flag("--no-restore", removal.no_restore, "skip re-enlargement to the original size");
    detail::add_solver_flags(o, removal.flags);

    auto* g = app.add_subcommand("energy", "export a normalized energy map");
    g->add_option("--input", energy.input)->required();
    g->add_option("--output", energy.output)->required();
    g->add_option("--energy", energy.energy)->required()->check(CLI::IsMember({"e1", "e2", "hog", "entropy"}));

    auto* s = app.add_subcommand("seams", "highlight the next minimum seams in red");
    s->add_option("--input", seams.input)->required();
    s->add_option("--output", seams.output)->required();
    s->add_option("--count", seams.count)->required()->check(CLI::PositiveNumber);
    detail::add_solver_flags(s, seams.flags);

    auto* b = app.add_subcommand("bench", "runtime-scaling measurements");
    auto* b_suite = b->add_option("--suite", bench.suite)->check(CLI::IsMember({"fast", "brute"}));
    auto* b_sizes = b->add_option("--sizes", bench.sizes)->delimiter(',')->check(CLI::PositiveNumber);
    b_suite->excludes(b_sizes);
    b_sizes->excludes(b_suite);
    b->add_option("--solvers", bench.solvers)->delimiter(',');
    b->add_option("--scale", bench.scale)->check(detail::scale_range());
    b->add_option("--reps", bench.reps)->check(CLI::PositiveNumber);
    b->add_option("--csv", bench.csv)->required();
    b->add_option("--plot", bench.plot);
    b->add_option("--input", bench.input, "source image (defaults to a generated fixture)");

    std::vector<std::string> mutable_args(args.rbegin(), args.rend()); // CLI11 wants reversed
    try {
        app.parse(mutable_args);
    } catch (const CLI::CallForHelp& help) {
        std::puts(app.help().c_str());
        return HelpShown{};
    } catch (const CLI::ParseError& err) {
        fail(Errc::usage_error, err.what());
    }

    if (r->parsed()) {
        if (!resize.scale && !resize.width && !resize.height)
            fail(Errc::usage_error, "resize needs --scale, --width, or --height");
        return resize;
    }
    if (e->parsed()) {
        if (!enlarge.scale && !enlarge.width && !enlarge.height)
            fail(Errc::usage_error, "enlarge needs --scale, --width, or --height");
        return enlarge;
    }
    if (o->parsed()) return removal;
    if (g->parsed()) return energy;
    if (s->parsed()) return seams;
    if (b->parsed()) {
        if (bench.suite.empty() && bench.sizes.empty())
            fail(Errc::usage_error, "bench needs --suite or --sizes");
        if (!(bench.scale > 0.0) || bench.scale > 1.0)
            fail(Errc::usage_error, "bench --scale must be in (0, 1]");
        return bench;
    }
    fail(Errc::usage_error, "expected a subcommand");
}

namespace detail {

inline int run_resize(const ResizeCmd& cmd) {
    PixelGrid img = load_image(cmd.input);
    const CarveConfig cfg = make_config(cmd.flags);
    const int target_w = cmd.scale ? scaled_target(*cmd.scale, img.width) : cmd.width.value_or(img.width);
    const int target_h = cmd.height.value_or(img.height);
    if (target_w > img.width)
        fail(Errc::invalid_target, "resize cannot grow the width; use the enlarge command");
    if (target_w < img.width) {
        auto [carved, report] = carve_to_width(img, target_w, cfg);
        img = std::move(carved);
    }
    if (target_h != img.height) {
        auto [carved, report] = carve_to_height(img, target_h, cfg);
        img = std::move(carved);
    }
    save_image(img, cmd.output);
    return 0;
}

inline int run_enlarge(const EnlargeCmd& cmd) {
    PixelGrid img = load_image(cmd.input);
    const CarveConfig cfg = make_config(cmd.flags);
    const int target_w = cmd.scale ? scaled_target(*cmd.scale, img.width) : cmd.width.value_or(img.width);
    const int target_h = cmd.height.value_or(img.height);
    if (target_w != img.width) {
        auto [wider, report] = enlarge_to_width(img, target_w, cfg);
        img = std::move(wider);
    }
    if (target_h != img.height) {
        auto [taller, report] = enlarge_to_width(transpose(img), target_h, cfg);
        img = transpose(taller);
    }
    save_image(img, cmd.output);
    return 0;
}

inline int run_remove_object(const RemoveObjectCmd& cmd) {
    PixelGrid img = load_image(cmd.input);
    PixelGrid mask_img = load_image(cmd.mask);
    RemovalMask mask = mask_from_image(mask_img);
    const CarveConfig cfg = make_config(cmd.flags);
    auto [result, report] = remove_object(img, mask, cfg, !cmd.no_restore);
    save_image(result, cmd.output);
    return 0;
}

inline int run_energy(const EnergyCmd& cmd) {
    if (!carve::detail::ends_with_ci(cmd.output, ".png"))
        fail(Errc::usage_error, "energy output must be a .png path");
    PixelGrid img = load_image(cmd.input);
    EnergyFn fn = EnergyFn::e1;
    if (cmd.energy == "e2") fn = EnergyFn::e2;
    else if (cmd.energy == "hog") fn = EnergyFn::hog;
    else if (cmd.energy == "entropy") fn = EnergyFn::entropy;
    const EnergyMap energy = compute_energy(to_grayscale(img), fn);
    save_gray_png(normalize_to_gray(energy), energy.width, energy.height, cmd.output);
    return 0;
}

inline int run_seams(const SeamsCmd& cmd) {
    PixelGrid img = load_image(cmd.input);
    const CarveConfig cfg = make_config(cmd.flags);
    auto [recorded, report] = record_seams(img, cmd.count, cfg);
    for (const Seam& seam : recorded)
        for (size_t i = 0; i < seam.size(); ++i) img.at(int(i), seam[i]) = Rgb{255, 0, 0};
    save_image(img, cmd.output);
    return 0;
}

inline int run_bench(const BenchCmd& cmd) {
    const std::vector<int> sizes = resolved_sizes(cmd);
    const std::vector<std::string> solver_names = resolved_solver_names(cmd);

    std::vector<SolverKind> solvers;
    for (const std::string& name : solver_names) {
        const auto kind = parse_solver(name);
        if (!kind) fail(Errc::usage_error, "unknown solver: " + name);
        solvers.push_back(*kind);
    }

    const int max_n = *std::max_element(sizes.begin(), sizes.end());
    const PixelGrid source = cmd.input.empty() ? make_test_image(max_n, max_n) : load_image(cmd.input);
    const SolverOptions opts = env_solver_options();

    const std::vector<BenchRecord> records =
        run_suite(sizes, solvers, cmd.scale, source, cmd.reps, EnergyFn::e1, Resample::crop_or_resize, opts);
    emit_csv(records, cmd.csv);
    if (!cmd.plot.empty()) emit_plot(records, cmd.plot);

    for (const BenchRecord& rec : records)
        std::printf("%-10s %-12s n=%-5d %.6fs (min of %d)\n", to_string(rec.solver),
                    to_string(rec.phase), rec.n, rec.wall_time_s, rec.repetitions);
    for (SolverKind solver : solvers) {
        for (Phase phase : {Phase::single_seam, Phase::full_carve}) {
            try {
                const ScalingFit fit = fit_scaling(records, solver, phase);
                std::printf("fit %-10s %-12s slope=%.3f r2=%.4f\n", to_string(solver), to_string(phase),
                            fit.slope, fit.r_squared);
            } catch (const Error&) {
                // fewer than 3 sizes; nothing to fit
            }
        }
        if (solver == SolverKind::BruteForce && sizes.size() >= 2)
            std::printf("brute-force growth ratio: %.3f per row\n", exp_growth_ratio(records));
    }
    return 0;
}

} // namespace detail

inline int run(const CliCommand& command) {
    return std::visit(
        [](const auto& cmd) -> int {
            using T = std::decay_t<decltype(cmd)>;
            if constexpr (std::is_same_v<T, HelpShown>) return 0;
            else if constexpr (std::is_same_v<T, ResizeCmd>) return detail::run_resize(cmd);
            else if constexpr (std::is_same_v<T, EnlargeCmd>) return detail::run_enlarge(cmd);
            else if constexpr (std::is_same_v<T, RemoveObjectCmd>) return detail::run_remove_object(cmd);
            else if constexpr (std::is_same_v<T, EnergyCmd>) return detail::run_energy(cmd);
            else if constexpr (std::is_same_v<T, SeamsCmd>) return detail::run_seams(cmd);
            else return detail::run_bench(cmd);
        },
        command);
}

/// Exit codes: 0 success, 1 usage error, 2 runtime error.
inline int cli_main(int argc, char** argv) {
    try {
        const CliCommand command = parse_args(std::vector<std::string>(argv + 1, argv + argc));
        return run(command);
    } catch (const Error& err) {
        std::fprintf(stderr, "carve: %s\n", err.what());
        return err.code() == Errc::usage_error ? 1 : 2;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "carve: %s\n", err.what());
        return 2;
    }
}

} // namespace carve::cli
