#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dtt {

// A single luminance frame. Intensities are row-major and lie in [0, 1].
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, float fill = 0.0F);
  // Throws InvalidArgument when luma.size() != width*height or when any
  // intensity falls outside [0, 1].
  Frame(int width, int height, std::vector<float> luma);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return luma_.size(); }
  bool empty() const noexcept { return luma_.empty(); }

  float at(int x, int y) const { return luma_[static_cast<std::size_t>(y) * width_ + x]; }
  // Replicated-edge access for coordinates outside the frame.
  float clamped(int x, int y) const;
  // Bilinear sample with replicated edges.
  float sample(double x, double y) const;

  std::span<const float> luma() const noexcept { return luma_; }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> luma_;
};

// Per-pixel boolean map, stored as bytes (0 or 1).
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(int w, int h, bool value = false)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, value ? 1 : 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const;

  friend bool operator==(const Mask&, const Mask&) = default;
};

// Intersection over union of two equally sized masks. Two empty masks give 1.
double mask_iou(const Mask& a, const Mask& b);

enum class SequenceRole { gallery, query };

// An ordered list of equally sized frames with an identity label.
class VideoSequence {
 public:
  VideoSequence() = default;
  // Throws InvalidArgument on zero frames or mixed frame dimensions.
  VideoSequence(std::string id, std::vector<Frame> frames,
                SequenceRole role = SequenceRole::gallery);

  const std::string& id() const noexcept { return id_; }
  SequenceRole role() const noexcept { return role_; }
  const std::vector<Frame>& frames() const noexcept { return frames_; }
  std::size_t size() const noexcept { return frames_.size(); }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }

  friend bool operator==(const VideoSequence&, const VideoSequence&) = default;

 private:
  std::string id_;
  std::vector<Frame> frames_;
  SequenceRole role_ = SequenceRole::gallery;
};

}  // namespace dtt
