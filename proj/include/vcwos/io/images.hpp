// SPDX-License-Identifier: Apache-2.0
#pragma once

// Grayscale image output. Pixels are row-major from the top row.

#include "vcwos/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace vcwos::io {

/// Little-endian PFM ("Pf", scale -1). PFM stores the bottom row first.
inline void write_pfm(const std::string& path, int width, int height, const std::vector<float>& pixels) {
    if (pixels.size() != static_cast<std::size_t>(width) * height) {
        throw ConfigError("write_pfm: pixel count does not match the size");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    out << "Pf\n" << width << ' ' << height << "\n-1.0\n";
    for (int row = height - 1; row >= 0; --row) {
        for (int col = 0; col < width; ++col) {
            const float v = pixels[static_cast<std::size_t>(row) * width + col];
            std::uint32_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                                   static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
            out.write(bytes, 4);
        }
    }
}

/// Reads a PFM written by write_pfm; returns top-row-first pixels.
inline std::vector<float> read_pfm(const std::string& path, int& width, int& height) {
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    double scale = 0.0;
    if (!(in >> magic >> width >> height >> scale) || magic != "Pf" || scale >= 0.0) {
        throw ConfigError("'" + path + "' is not a little-endian grayscale PFM");
    }
    in.get();
    std::vector<float> pixels(static_cast<std::size_t>(width) * height);
    for (int row = height - 1; row >= 0; --row) {
        for (int col = 0; col < width; ++col) {
            unsigned char b[4];
            in.read(reinterpret_cast<char*>(b), 4);
            const std::uint32_t bits = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
            float v;
            std::memcpy(&v, &bits, sizeof v);
            pixels[static_cast<std::size_t>(row) * width + col] = v;
        }
    }
    if (!in) {
        throw ConfigError("'" + path + "' is truncated");
    }
    return pixels;
}

/// 8-bit PGM, linear from the finite minimum (black) to the finite maximum (white).
/// A flat image maps to mid gray; NaN pixels are black.
inline void write_pgm(const std::string& path, int width, int height, const std::vector<float>& pixels) {
    float lo = std::numeric_limits<float>::infinity();
    float hi = -lo;
    for (float v : pixels) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    out << "P5\n" << width << ' ' << height << "\n255\n";
    for (float v : pixels) {
        unsigned char g = 0;
        if (std::isfinite(v)) {
            g = hi > lo ? static_cast<unsigned char>(std::lround(255.0 * (v - lo) / (hi - lo))) : 128;
        }
        out.put(static_cast<char>(g));
    }
}

}  // namespace vcwos::io
