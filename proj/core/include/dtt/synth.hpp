#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dtt/image.hpp"

namespace dtt {

// Cluttered handheld-style sequences: a textured sprite near the frame
// centre over a random background. The background slides past the sprite
// (motion parallax), a horizontal shear sweep stands in for yaw, and a small
// random walk imitates hand shake.
struct SynthConfig {
  int n_objects = 10;
  int n_sequences = 2;
  std::uint64_t seed = 7;
  int width = 128;
  int height = 96;
  int frames = 10;
  double sprite_radius = 28.0;   // before the per-sequence scale change
  double scale_jitter = 0.12;    // per-sequence relative size change
  double parallax = 2.0;         // background px per frame relative to the sprite
  double shear_span = 0.25;      // shear change over a sequence
  double shake_sigma = 0.35;     // hand-shake random walk step (px)
  double centre_jitter = 3.0;    // per-sequence sprite offset (px)
  double noise_sigma = 0.004;
};

struct SynthSequence {
  std::string object_id;
  std::string sequence_id;
  VideoSequence sequence;
  std::vector<Mask> ground_truth;
  double sprite_radius = 0.0;  // effective radius in this sequence
};

// Deterministic for a given config.
std::vector<SynthSequence> synth_sequences(const SynthConfig& cfg);

// Writes <root>/<object>/<sequence>/frame_%04d.png (RGB) with ground-truth
// masks in <root>/<object>/<sequence>/groundtruth/mask_%04d.pgm.
void synth_generate(const SynthConfig& cfg, const std::filesystem::path& root);

std::string synth_object_id(int object);
std::string synth_sequence_id(int sequence);

// Turntable views in the ALOI layout: <root>/<object>/<object>_r<angle>.png, view v
// at yaw 5 degrees * v. Each object is a textured solid of revolution on a black
// background, orthographically projected and Lambert shaded.
struct TurntableConfig {
  int n_objects = 5;
  std::uint64_t seed = 11;
  int width = 64;
  int height = 48;
  int views = 72;
};

struct TurntableObject {
  std::string object_id;
  std::vector<Frame> views;
};

std::vector<TurntableObject> synth_turntable(const TurntableConfig& cfg);
void synth_turntable_generate(const TurntableConfig& cfg, const std::filesystem::path& root);

}  // namespace dtt
