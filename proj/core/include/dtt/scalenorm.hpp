#pragma once

#include <vector>

#include "dtt/image.hpp"

namespace dtt {

// Dense displacement field, one (u, v) per pixel, in pixels.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<double> u;
  std::vector<double> v;

  FlowField() = default;
  FlowField(int w, int h)
      : width(w), height(h), u(static_cast<std::size_t>(w) * h, 0.0),
        v(static_cast<std::size_t>(w) * h, 0.0) {}

  std::size_t size() const { return u.size(); }
  double magnitude(std::size_t i) const;
};

struct FlowOptions {
  int window = 15;           // square window side
  // Gaussian weighting of the window, truncated at its edge; <= 0 weights
  // every pixel equally. Equal weights let a strongly textured object drag its
  // motion several pixels past its boundary.
  double window_sigma = 2.5;
  int levels = 3;            // pyramid levels, coarse to fine
  int iterations = 3;        // refinement passes per level
  // Threshold on the smaller eigenvalue of the window-averaged structure
  // tensor, with gradients measured in 8-bit grey levels per pixel.
  double min_eigenvalue = 1e-4;
};

// Pyramidal Lucas-Kanade: per-pixel least squares over a square window,
// refined coarse to fine. Pixels whose structure tensor is degenerate get a
// zero vector. The flow maps a pixel of `a` onto its position in `b`.
FlowField compute_flow(const Frame& a, const Frame& b, const FlowOptions& options = {});

// Subtracts the mean flow vector from every pixel.
FlowField remove_translation(const FlowField& flow);

struct ScaleOptions {
  int rays = 36;
  double smoothing_sigma = 2.0;
  double target_fraction = 0.25;  // R_target = fraction * min(width, height)
  double min_scale = 0.5;
  double max_scale = 2.0;
  double min_drop = 0.02;   // radial magnitude drop (px per px) that counts as an edge
  double min_valid_fraction = 0.25;  // of rays, otherwise the estimate is degenerate
};

struct ScaleEstimate {
  double object_radius = 0.0;
  double scale_factor = 1.0;
  Mask coarse_mask;
  bool degenerate = true;
  std::vector<double> ray_radii;  // NaN where a ray found no edge
};

double target_radius(int width, int height, const ScaleOptions& options = {});
double scale_factor_for_radius(double radius, int width, int height,
                               const ScaleOptions& options = {});

// Finds the object boundary as the strongest outward drop of the smoothed
// residual flow magnitude along rays cast from the frame centre.
ScaleEstimate estimate_scale(const FlowField& residual, const ScaleOptions& options = {});

// Zooms about the frame centre by `factor` (> 1 enlarges), keeping the frame
// size. Samples are bilinear with replicated edges. factor == 1 is an exact copy.
Frame rescale_about_center(const Frame& frame, double factor);
Mask rescale_mask(const Mask& mask, double factor);

struct NormalizedSequence {
  VideoSequence sequence;
  std::vector<Mask> masks;             // coarse foreground per frame
  std::vector<double> scale_factors;   // per frame
};

// Rescales each frame by the factor estimated from its flow to the next frame
// (the last frame uses the flow from the previous one). With enabled == false,
// or for a single frame, frames pass through unchanged with full masks.
NormalizedSequence normalize_sequence(const VideoSequence& seq, bool enabled = true,
                                      const FlowOptions& flow = {},
                                      const ScaleOptions& scale = {});

}  // namespace dtt
