#pragma once

#include <filesystem>

#include "dtt/image.hpp"

namespace dtt {

// Reads a PNG or PGM (P2/P5) file and converts it to luminance with
// BT.601 weights: (0.299 R + 0.587 G + 0.114 B) / maxval.
// Throws IngestError(undecodable) on any decoding failure.
Frame read_image(const std::filesystem::path& path);

// 8-bit grayscale output. Intensities are rounded to the nearest level.
void write_png(const std::filesystem::path& path, const Frame& frame);
void write_pgm(const std::filesystem::path& path, const Frame& frame);
void write_mask_pgm(const std::filesystem::path& path, const Mask& mask);

// Reads a PGM and thresholds at half intensity.
Mask read_mask_pgm(const std::filesystem::path& path);

// Writes an 8-bit RGB PNG from interleaved bytes. Used by the synthetic
// generators to emit colour frames.
void write_png_rgb(const std::filesystem::path& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

}  // namespace dtt
