#pragma once

#include <string>

#include "lrr/numerics.hpp"

namespace lrr {

// Reads binary ("P5") or ASCII ("P2") PGM, maxval <= 65535. Entries are
// pixel/maxval in [0, 1]; rows = image height. Parse failures carry the byte
// offset.
Matrix load_pgm(const std::string& path);

// Writes binary P5. Entries are clamped to [0, 1] and quantized by
// round-half-away-from-zero to [0, maxval]. Two bytes per sample (big-endian)
// when maxval > 255.
void save_pgm(const Matrix& x, const std::string& path, int maxval = 255);

}  // namespace lrr
