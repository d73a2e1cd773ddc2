#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <png.h>

#include "carve/error.hpp"

namespace carve {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

static_assert(sizeof(Rgb) == 3, "Rgb must be packed for row-pointer IO");

/// Row-major 8-bit RGB raster.
struct PixelGrid {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    PixelGrid() = default;
    PixelGrid(int w, int h, Rgb fill = {}) : width(w), height(h), pixels(size_t(w) * size_t(h), fill) {
        if (w < 1 || h < 1) fail(Errc::empty_image, "PixelGrid dimensions must be >= 1");
    }

    Rgb& at(int row, int col) { return pixels[size_t(row) * width + col]; }
    const Rgb& at(int row, int col) const { return pixels[size_t(row) * width + col]; }

    friend bool operator==(const PixelGrid&, const PixelGrid&) = default;
};

/// Row-major luminance values in [0, 255].
struct LumaGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double& at(int row, int col) { return values[size_t(row) * width + col]; }
    double at(int row, int col) const { return values[size_t(row) * width + col]; }

    // clamped read: out-of-range indices replicate the nearest edge
    double at_clamped(int row, int col) const {
        row = std::clamp(row, 0, height - 1);
        col = std::clamp(col, 0, width - 1);
        return values[size_t(row) * width + col];
    }
};

inline LumaGrid to_grayscale(const PixelGrid& grid) {
    LumaGrid out;
    out.width = grid.width;
    out.height = grid.height;
    out.values.resize(grid.pixels.size());
    for (size_t i = 0; i < grid.pixels.size(); ++i) {
        const Rgb& p = grid.pixels[i];
        out.values[i] = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b; // BT.601 luma
    }
    return out;
}

inline PixelGrid transpose(const PixelGrid& grid) {
    PixelGrid out(grid.height, grid.width);
    for (int i = 0; i < grid.height; ++i)
        for (int j = 0; j < grid.width; ++j)
            out.at(j, i) = grid.at(i, j);
    return out;
}

namespace detail {

struct File {
    std::FILE* fp = nullptr;
    explicit File(const char* path, const char* mode) : fp(std::fopen(path, mode)) {}
    ~File() {
        if (fp) std::fclose(fp);
    }
    File(const File&) = delete;
    File& operator=(const File&) = delete;
};

inline PixelGrid load_png(std::FILE* fp, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(Errc::io_failure, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(Errc::io_failure, "libpng init failed");
    }

    PixelGrid grid;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(Errc::corrupt_image, path + ": corrupt PNG");
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    if (png_get_bit_depth(png, info) > 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(Errc::unsupported_format, path + ": 16-bit channels not supported");
    }

    // normalize palette/gray/alpha variants to 8-bit RGB; alpha is discarded
    png_byte color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (w < 1 || h < 1 || png_get_rowbytes(png, info) != w * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(Errc::corrupt_image, path + ": unexpected PNG row layout");
    }

    grid.width = int(w);
    grid.height = int(h);
    grid.pixels.resize(size_t(w) * h);
    rows.resize(h);
    for (png_uint_32 i = 0; i < h; ++i)
        rows[i] = reinterpret_cast<png_bytep>(&grid.pixels[size_t(i) * w]);

    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return grid;
}

inline int ppm_read_token(std::FILE* fp) {
    // skips whitespace and '#' comments, returns a nonnegative integer or -1
    int c = std::fgetc(fp);
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = std::fgetc(fp);
        } else if (std::isspace(c)) {
            c = std::fgetc(fp);
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) return -1;
    long v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > 1000000) return -1;
        c = std::fgetc(fp);
    }
    return int(v);
}

inline PixelGrid load_ppm(std::FILE* fp, const std::string& path) {
    char magic[2];
    if (std::fread(magic, 1, 2, fp) != 2 || magic[0] != 'P' || magic[1] != '6')
        fail(Errc::unsupported_format, path + ": not a P6 PPM");
    const int w = ppm_read_token(fp);
    const int h = ppm_read_token(fp);
    const int maxval = ppm_read_token(fp);
    if (w < 1 || h < 1) fail(Errc::corrupt_image, path + ": bad PPM header");
    if (maxval != 255) fail(Errc::unsupported_format, path + ": only maxval 255 PPM supported");
    // header token reader consumed the single whitespace after maxval already
    PixelGrid grid(w, h);
    const size_t want = size_t(w) * h;
    if (std::fread(grid.pixels.data(), 3, want, fp) != want)
        fail(Errc::corrupt_image, path + ": truncated PPM payload");
    return grid;
}

inline void save_png_rgb(const PixelGrid& grid, const std::string& path) {
    File f(path.c_str(), "wb");
    if (!f.fp) fail(Errc::io_failure, path + ": cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(Errc::io_failure, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(Errc::io_failure, "libpng init failed");
    }

    std::vector<png_bytep> rows(grid.height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(Errc::io_failure, path + ": PNG write failed");
    }

    png_init_io(png, f.fp);
    png_set_IHDR(png, info, grid.width, grid.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int i = 0; i < grid.height; ++i)
        rows[i] = reinterpret_cast<png_bytep>(const_cast<Rgb*>(&grid.pixels[size_t(i) * grid.width]));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline void save_ppm(const PixelGrid& grid, const std::string& path) {
    File f(path.c_str(), "wb");
    if (!f.fp) fail(Errc::io_failure, path + ": cannot open for writing");
    std::string header = "P6\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n255\n";
    if (std::fwrite(header.data(), 1, header.size(), f.fp) != header.size())
        fail(Errc::io_failure, path + ": write failed");
    const size_t want = size_t(grid.width) * grid.height;
    if (std::fwrite(grid.pixels.data(), 3, want, f.fp) != want)
        fail(Errc::io_failure, path + ": write failed");
}

inline bool ends_with_ci(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                      [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

} // namespace detail

inline PixelGrid load_image(const std::string& path) {
    detail::File f(path.c_str(), "rb");
    if (!f.fp) fail(Errc::file_not_found, path + ": no such file");

    unsigned char sig[8] = {};
    const size_t got = std::fread(sig, 1, 8, f.fp);
    std::rewind(f.fp);
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (got >= 8 && std::memcmp(sig, png_sig, 8) == 0) return detail::load_png(f.fp, path);
    if (got >= 2 && sig[0] == 'P' && sig[1] == '6') return detail::load_ppm(f.fp, path);
    fail(Errc::unsupported_format, path + ": expected PNG or binary PPM (P6)");
}

inline void save_image(const PixelGrid& grid, const std::string& path) {
    if (detail::ends_with_ci(path, ".png"))
        detail::save_png_rgb(grid, path);
    else if (detail::ends_with_ci(path, ".ppm"))
        detail::save_ppm(grid, path);
    else
        fail(Errc::unsupported_format, path + ": unknown output extension (use .png or .ppm)");
}

/// 8-bit grayscale PNG, used for energy-map visualization.
inline void save_gray_png(const std::vector<std::uint8_t>& gray, int width, int height, const std::string& path) {
    detail::File f(path.c_str(), "wb");
    if (!f.fp) fail(Errc::io_failure, path + ": cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(Errc::io_failure, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(Errc::io_failure, "libpng init failed");
    }
    std::vector<png_bytep> rows(height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(Errc::io_failure, path + ": PNG write failed");
    }
    png_init_io(png, f.fp);
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int i = 0; i < height; ++i)
        rows[i] = const_cast<png_bytep>(&gray[size_t(i) * width]);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace carve
