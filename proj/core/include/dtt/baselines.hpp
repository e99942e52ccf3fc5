#pragma once

#include <span>
#include <vector>

#include "dtt/densegrid.hpp"
#include "dtt/image.hpp"

namespace dtt {

enum class FeatureSource { sift, appearance };

// A set of equal-dimension exemplar vectors with all-zero vectors removed.
class FeatureSet {
 public:
  FeatureSet() = default;
  // Drops vectors with L2 norm below 1e-6. Throws DimensionMismatch when
  // data.size() is not a multiple of dim.
  FeatureSet(FeatureSource source, int dim, std::span<const float> data);

  FeatureSource source() const noexcept { return source_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }
  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const float> data() const noexcept { return data_; }
  void append(std::span<const float> v);

 private:
  FeatureSource source_ = FeatureSource::sift;
  int dim_ = 0;
  std::vector<float> data_;
};

// max over pairs of f1.f2 / |f1| / |f2|. Float matrix products screen the
// candidates; the winning pairs are rescored in double, so the result equals
// an exhaustive double-precision scan.
double maxmax_cosine(const FeatureSet& a, const FeatureSet& b);

inline constexpr int kAppearanceWidth = 32;
inline constexpr int kAppearanceHeight = 24;

// Area-weighted (box filter) resampling to out_w x out_h.
std::vector<double> box_downscale(const Frame& frame, int out_w, int out_h);

// Each frame downscaled to 32x24 and mean-subtracted; constant frames vanish.
FeatureSet appearance_features(const VideoSequence& seq);

// Dense grid descriptors of every frame, pooled; zero descriptors dropped.
FeatureSet sift_features(const VideoSequence& seq, const GridConfig& cfg = {});

}  // namespace dtt
