#include "dtt/baselines.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtt/error.hpp"

namespace dtt {
namespace {

constexpr double kZeroNorm = 1e-6;

double norm_of(std::span<const float> v) {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * x;
  return std::sqrt(acc);
}

double exact_cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += static_cast<double>(a[i]) * b[i];
  // One product of the norms keeps the result exactly symmetric in (a, b).
  return dot / (norm_of(a) * norm_of(b));
}

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrix normalized_rows(const FeatureSet& s) {
  RowMatrix m(static_cast<Eigen::Index>(s.size()), s.dim());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto v = s.vector(i);
    const double inv = 1.0 / norm_of(v);
    for (int d = 0; d < s.dim(); ++d) {
      m(static_cast<Eigen::Index>(i), d) = static_cast<float>(v[d] * inv);
    }
  }
  return m;
}

// Area overlap weights mapping `in` samples onto `out` bins.
std::vector<std::vector<std::pair<int, double>>> box_weights(int in, int out) {
  std::vector<std::vector<std::pair<int, double>>> w(out);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    for (int i = static_cast<int>(std::floor(lo)); i < static_cast<int>(std::ceil(hi)) && i < in; ++i) {
      const double overlap = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
      if (overlap > 0.0) w[o].push_back({i, overlap / scale});
    }
  }
  return w;
}

}  // namespace

FeatureSet::FeatureSet(FeatureSource source, int dim, std::span<const float> data)
    : source_(source), dim_(dim) {
  if (dim <= 0) throw InvalidArgument("feature dimension must be positive");
  if (data.size() % static_cast<std::size_t>(dim) != 0) {
    throw DimensionMismatch("feature data is not a whole number of vectors");
  }
  for (std::size_t i = 0; i < data.size(); i += dim) append(data.subspan(i, dim));
}

void FeatureSet::append(std::span<const float> v) {
  if (v.size() != static_cast<std::size_t>(dim_)) throw DimensionMismatch("feature dimension differs");
  if (norm_of(v) < kZeroNorm) return;
  data_.insert(data_.end(), v.begin(), v.end());
}

double maxmax_cosine(const FeatureSet& a, const FeatureSet& b) {
  if (a.empty() || b.empty()) throw InvalidArgument("maxmax_cosine of an empty set");
  if (a.dim() != b.dim()) throw DimensionMismatch("feature sets differ in dimension");
  const RowMatrix na = normalized_rows(a);
  const RowMatrix nb = normalized_rows(b);
  // Float dot products of unit vectors are accurate to ~1e-6; anything within
  // the margin of the screened maximum is rescored exactly.
  constexpr float kMargin = 1e-4F;
  constexpr Eigen::Index kBlock = 256;
  float best = -std::numeric_limits<float>::infinity();
  struct Candidate {
    float approx;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> candidates;
  RowMatrix block;
  for (Eigen::Index start = 0; start < na.rows(); start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, na.rows() - start);
    block.noalias() = na.middleRows(start, rows) * nb.transpose();
    const float block_best = block.maxCoeff();
    if (block_best > best) {
      best = block_best;
      std::erase_if(candidates, [&](const Candidate& c) { return c.approx < best - kMargin; });
    }
    if (block_best < best - kMargin) continue;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < block.cols(); ++c) {
        if (block(r, c) >= best - kMargin) {
          candidates.push_back({block(r, c), static_cast<std::size_t>(start + r), static_cast<std::size_t>(c)});
        }
      }
    }
  }
  double result = -std::numeric_limits<double>::infinity();
  for (const Candidate& c : candidates) {
    if (c.approx < best - kMargin) continue;
    result = std::max(result, exact_cosine(a.vector(c.i), b.vector(c.j)));
  }
  return result;
}

std::vector<double> box_downscale(const Frame& frame, int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0) throw InvalidArgument("output size must be positive");
  const auto wx = box_weights(frame.width(), out_w);
  const auto wy = box_weights(frame.height(), out_h);
  std::vector<double> rows(static_cast<std::size_t>(frame.height()) * out_w, 0.0);
  for (int y = 0; y < frame.height(); ++y) {
    for (int ox = 0; ox < out_w; ++ox) {
      double acc = 0.0;
      for (const auto& [x, w] : wx[ox]) acc += w * frame.at(x, y);
      rows[static_cast<std::size_t>(y) * out_w + ox] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h, 0.0);
  for (int oy = 0; oy < out_h; ++oy) {
    for (const auto& [y, w] : wy[oy]) {
      for (int ox = 0; ox < out_w; ++ox) {
        out[static_cast<std::size_t>(oy) * out_w + ox] += w * rows[static_cast<std::size_t>(y) * out_w + ox];
      }
    }
  }
  return out;
}

FeatureSet appearance_features(const VideoSequence& seq) {
  constexpr int dim = kAppearanceWidth * kAppearanceHeight;
  FeatureSet set(FeatureSource::appearance, dim, {});
  std::vector<float> v(dim);
  for (const Frame& f : seq.frames()) {
    const auto small = box_downscale(f, kAppearanceWidth, kAppearanceHeight);
    double mean = 0.0;
    for (double x : small) mean += x;
    mean /= dim;
    for (int i = 0; i < dim; ++i) v[i] = static_cast<float>(small[i] - mean);
    set.append(v);
  }
  return set;
}

FeatureSet sift_features(const VideoSequence& seq, const GridConfig& cfg) {
  FeatureSet set(FeatureSource::sift, cfg.descriptor_size(), {});
  for (const Frame& f : seq.frames()) {
    const DescriptorGrid g = extract_grid(f, cfg);
    for (std::size_t i = 0; i < g.size(); ++i) set.append(g.descriptor(i));
  }
  return set;
}

}  // namespace dtt
