#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "dtt/image.hpp"

namespace dtt {

// Dense patch grid parameters. The stride is round(stride_ratio * patch_size),
// so the defaults give a 2 px stride and 90% overlap between neighbours.
struct GridConfig {
  int patch_size = 20;
  double stride_ratio = 0.1;
  int cells_per_side = 4;
  int orientation_bins = 8;

  int stride() const;
  int descriptor_size() const { return cells_per_side * cells_per_side * orientation_bins; }
  // Throws InvalidArgument unless 0 < stride_ratio <= 1, stride >= 1 and the
  // patch divides evenly into cells.
  void validate() const;
};

struct Locus {
  int x = 0;
  int y = 0;
  friend bool operator==(const Locus&, const Locus&) = default;
};

struct GridShape {
  int grid_w = 0;
  int grid_h = 0;
  std::size_t count() const { return static_cast<std::size_t>(grid_w) * grid_h; }
};

GridShape grid_shape(int frame_w, int frame_h, const GridConfig& cfg);

// Top-left corners of all patches, row-major. Throws InvalidArgument when the
// frame is smaller than one patch.
std::vector<Locus> grid_loci(int frame_w, int frame_h, const GridConfig& cfg);

// Descriptors of one frame, one per grid locus.
struct DescriptorGrid {
  int grid_w = 0;
  int grid_h = 0;
  int dim = 0;
  int patch_size = 0;
  int stride = 0;
  std::vector<Locus> loci;
  std::vector<float> data;  // loci.size() * dim

  std::size_t size() const { return loci.size(); }
  std::span<const float> descriptor(std::size_t i) const {
    return {data.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

// Upright SIFT-style descriptor of the patch whose top-left corner is locus:
// central-difference gradients (replicated frame edges), Gaussian weighting
// with sigma = patch/2, trilinear votes into cells x orientation bins,
// L2 normalisation, clipping at 0.2 and renormalisation. Patches without any
// gradient give the zero vector.
std::vector<float> extract_descriptor(const Frame& frame, Locus locus, const GridConfig& cfg = {});

DescriptorGrid extract_grid(const Frame& frame, const GridConfig& cfg = {});

// "DGRD" v1: magic, u16 version, u32 grid_w, grid_h, dim, patch_size, stride,
// then grid_w*grid_h*dim little-endian f32.
void save_descriptor_grid(const std::filesystem::path& path, const DescriptorGrid& grid);
DescriptorGrid load_descriptor_grid(const std::filesystem::path& path);

inline constexpr float kDescriptorClip = 0.2F;

}  // namespace dtt
