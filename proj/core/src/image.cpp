#include "dtt/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dtt/error.hpp"

namespace dtt {

Frame::Frame(int width, int height, float fill)
    : width_(width), height_(height),
      luma_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill) {
  if (width <= 0 || height <= 0) throw InvalidArgument("frame dimensions must be positive");
  if (!(fill >= 0.0F && fill <= 1.0F)) throw InvalidArgument("frame intensity outside [0,1]");
}

Frame::Frame(int width, int height, std::vector<float> luma)
    : width_(width), height_(height), luma_(std::move(luma)) {
  if (width <= 0 || height <= 0) throw InvalidArgument("frame dimensions must be positive");
  if (luma_.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("luma length does not match frame dimensions");
  }
  for (float v : luma_) {
    if (!(v >= 0.0F && v <= 1.0F)) throw InvalidArgument("frame intensity outside [0,1]");
  }
}

float Frame::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return at(x, y);
}

float Frame::sample(double x, double y) const {
  x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
  const double bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
  return static_cast<float>(top * (1.0 - fy) + bottom * fy);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double mask_iou(const Mask& a, const Mask& b) {
  if (a.width != b.width || a.height != b.height) throw DimensionMismatch("mask sizes differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    inter += (a.bits[i] && b.bits[i]) ? 1 : 0;
    uni += (a.bits[i] || b.bits[i]) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

VideoSequence::VideoSequence(std::string id, std::vector<Frame> frames, SequenceRole role)
    : id_(std::move(id)), frames_(std::move(frames)), role_(role) {
  if (frames_.empty()) throw InvalidArgument("sequence needs at least one frame");
  for (const auto& f : frames_) {
    if (f.width() != frames_.front().width() || f.height() != frames_.front().height()) {
      throw InvalidArgument("sequence frames differ in size");
    }
  }
}

}  // namespace dtt
