#include "dtt/codebook.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "dtt/binary_io.hpp"
#include "dtt/error.hpp"

namespace dtt {
namespace {

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

double squared_distance(const float* a, const float* b, int dim) {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Assignment {
  std::vector<std::int32_t> word;
  std::vector<double> distance;  // exact squared distance to the assigned centroid
};

constexpr std::size_t kBlockRows = 512;

Assignment assign_exact(const float* data, std::size_t n, int dim, const float* centroids, int k) {
  Assignment out;
  out.word.resize(n);
  out.distance.resize(n);
  if (n == 0) return out;
  const ConstRowMap cmat(centroids, k, dim);
  Eigen::VectorXf cnorm = cmat.rowwise().squaredNorm();
  const float cmax = cnorm.size() > 0 ? cnorm.maxCoeff() : 0.0F;
  RowMatrix products;
  std::vector<int> candidates;
  for (std::size_t start = 0; start < n; start += kBlockRows) {
    const std::size_t rows = std::min(kBlockRows, n - start);
    const ConstRowMap block(data + start * dim, static_cast<Eigen::Index>(rows), dim);
    products.noalias() = block * cmat.transpose();
    for (std::size_t r = 0; r < rows; ++r) {
      const float* x = data + (start + r) * dim;
      const float xnorm = block.row(static_cast<Eigen::Index>(r)).squaredNorm();
      float best = std::numeric_limits<float>::infinity();
      for (int j = 0; j < k; ++j) {
        best = std::min(best, cnorm[j] - 2.0F * products(static_cast<Eigen::Index>(r), j));
      }
      // Float error of the screened value is far below this margin for
      // vectors of the magnitudes we quantize.
      const float margin = 1e-4F * (xnorm + cmax) + 1e-6F;
      candidates.clear();
      for (int j = 0; j < k; ++j) {
        if (cnorm[j] - 2.0F * products(static_cast<Eigen::Index>(r), j) <= best + margin) {
          candidates.push_back(j);
        }
      }
      std::int32_t word = -1;
      double dist = std::numeric_limits<double>::infinity();
      for (int j : candidates) {
        const double d = squared_distance(x, centroids + static_cast<std::size_t>(j) * dim, dim);
        if (d < dist) {
          dist = d;
          word = j;
        }
      }
      out.word[start + r] = word;
      out.distance[start + r] = dist;
    }
  }
  return out;
}

bool all_zero(const float* v, int dim) {
  return std::all_of(v, v + dim, [](float x) { return x == 0.0F; });
}

std::size_t count_distinct(const std::vector<float>& rows, std::size_t n, int dim) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row = [&](std::size_t i) { return rows.data() + i * dim; };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(row(a), row(a) + dim, row(b), row(b) + dim);
  });
  std::size_t distinct = n == 0 ? 0 : 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (!std::equal(row(order[i]), row(order[i]) + dim, row(order[i - 1]))) ++distinct;
  }
  return distinct;
}

}  // namespace

std::uint64_t Codebook::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  mix(&k, sizeof k);
  mix(&dim, sizeof dim);
  mix(centroids.data(), centroids.size() * sizeof(float));
  return h;
}

Codebook train_codebook(std::span<const float> data, int dim, int k, std::uint64_t seed,
                        const KMeansOptions& options, KMeansTrace* trace) {
  if (dim <= 0) throw InvalidArgument("descriptor dimension must be positive");
  if (k < 2) throw InvalidArgument("codebook needs at least two words");
  if (data.size() % static_cast<std::size_t>(dim) != 0) {
    throw DimensionMismatch("training data is not a whole number of vectors");
  }
  const std::size_t total = data.size() / dim;

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < total; ++i) {
    if (!all_zero(data.data() + i * dim, dim)) kept.push_back(i);
  }
  std::mt19937_64 rng(seed);
  if (options.max_samples > 0 && kept.size() > options.max_samples) {
    for (std::size_t i = 0; i < options.max_samples; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(uniform01(rng) * (kept.size() - i));
      std::swap(kept[i], kept[std::min(j, kept.size() - 1)]);
    }
    kept.resize(options.max_samples);
    std::sort(kept.begin(), kept.end());
  }
  const std::size_t n = kept.size();
  std::vector<float> points(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(data.data() + kept[i] * dim, dim, points.data() + i * dim);
  }
  if (count_distinct(points, n, dim) < static_cast<std::size_t>(k)) {
    throw InvalidArgument("fewer distinct non-zero descriptors than codebook words");
  }
  auto point = [&](std::size_t i) { return points.data() + i * dim; };

  Codebook cb;
  cb.k = k;
  cb.dim = dim;
  cb.seed = seed;
  cb.centroids.resize(static_cast<std::size_t>(k) * dim);

  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t first = std::min(static_cast<std::size_t>(uniform01(rng) * n), n - 1);
  std::copy_n(point(first), dim, cb.centroids.data());
  for (int c = 1; c <= k; ++c) {
    const float* last = cb.centroids.data() + static_cast<std::size_t>(c - 1) * dim;
    double total_d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(point(i), last, dim));
      total_d2 += d2[i];
    }
    if (c == k) break;
    const double target = uniform01(rng) * total_d2;
    double acc = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (acc > target) break;
    }
    std::copy_n(point(pick), dim, cb.centroids.data() + static_cast<std::size_t>(c) * dim);
  }

  // Lloyd iterations.
  KMeansTrace local;
  local.samples = n;
  std::vector<double> sums(static_cast<std::size_t>(k) * dim);
  std::vector<std::size_t> members(k);
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    Assignment a = assign_exact(points.data(), n, dim, cb.centroids.data(), k);
    double distortion = 0.0;
    for (double d : a.distance) distortion += d;
    local.distortion.push_back(distortion);
    local.iterations = it + 1;
    if (distortion == 0.0) break;
    if (std::isfinite(previous) && previous - distortion <= options.tolerance * previous) break;
    previous = distortion;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(members.begin(), members.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto w = static_cast<std::size_t>(a.word[i]);
      ++members[w];
      const float* p = point(i);
      double* s = sums.data() + w * dim;
      for (int d = 0; d < dim; ++d) s[d] += p[d];
    }
    for (int c = 0; c < k; ++c) {
      float* centroid = cb.centroids.data() + static_cast<std::size_t>(c) * dim;
      if (members[c] > 0) {
        const double* s = sums.data() + static_cast<std::size_t>(c) * dim;
        for (int d = 0; d < dim; ++d) centroid[d] = static_cast<float>(s[d] / members[c]);
        continue;
      }
      // Empty cluster: move it onto the worst-fitted point.
      std::size_t worst = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (a.distance[i] > a.distance[worst]) worst = i;
      }
      std::copy_n(point(worst), dim, centroid);
      a.distance[worst] = -1.0;
    }
  }
  if (trace != nullptr) *trace = std::move(local);
  return cb;
}

std::vector<std::int32_t> assign_nearest(std::span<const float> data, int dim, const Codebook& cb) {
  if (dim != cb.dim) throw DimensionMismatch("descriptor dimension differs from codebook");
  if (data.size() % static_cast<std::size_t>(dim) != 0) {
    throw DimensionMismatch("data is not a whole number of vectors");
  }
  return assign_exact(data.data(), data.size() / dim, dim, cb.centroids.data(), cb.k).word;
}

std::int32_t nearest_word(std::span<const float> descriptor, const Codebook& cb) {
  if (descriptor.size() != static_cast<std::size_t>(cb.dim)) {
    throw DimensionMismatch("descriptor dimension differs from codebook");
  }
  std::int32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < cb.k; ++j) {
    const double d = squared_distance(descriptor.data(), cb.centroid(j).data(), cb.dim);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

WordGrid quantize(const DescriptorGrid& grid, const Codebook& cb) {
  if (grid.dim != cb.dim) throw DimensionMismatch("descriptor dimension differs from codebook");
  WordGrid out;
  out.grid_w = grid.grid_w;
  out.grid_h = grid.grid_h;
  out.k = cb.k;
  out.patch_size = grid.patch_size;
  out.stride = grid.stride;
  out.loci = grid.loci;
  out.words = assign_nearest(grid.data, grid.dim, cb);
  return out;
}

namespace {
constexpr char kCodebookMagic[5] = "DTTC";
constexpr std::uint16_t kCodebookVersion = 1;
}  // namespace

void save_codebook(const std::filesystem::path& path, const Codebook& cb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  binio::put_magic(out, kCodebookMagic);
  binio::put<std::uint16_t>(out, kCodebookVersion);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(cb.k));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(cb.dim));
  binio::put<std::uint64_t>(out, cb.seed);
  for (float v : cb.centroids) binio::put<float>(out, v);
  if (!out) throw Error("failed writing " + path.string());
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  binio::expect_magic(in, kCodebookMagic);
  if (binio::get<std::uint16_t>(in) != kCodebookVersion) throw FormatError("unsupported DTTC version");
  Codebook cb;
  cb.k = static_cast<int>(binio::get<std::uint32_t>(in));
  cb.dim = static_cast<int>(binio::get<std::uint32_t>(in));
  cb.seed = binio::get<std::uint64_t>(in);
  if (cb.k < 2 || cb.dim <= 0 || static_cast<long long>(cb.k) * cb.dim > (1LL << 28)) {
    throw FormatError("implausible codebook dimensions");
  }
  cb.centroids.resize(static_cast<std::size_t>(cb.k) * cb.dim);
  for (float& v : cb.centroids) {
    v = binio::get<float>(in);
    if (!std::isfinite(v)) throw FormatError("non-finite centroid value");
  }
  return cb;
}

void export_codebook_csv(const std::filesystem::path& path, const Codebook& cb) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(9);
  out << "word";
  for (int d = 0; d < cb.dim; ++d) out << ",c" << d;
  out << '\n';
  for (int j = 0; j < cb.k; ++j) {
    out << j;
    for (float v : cb.centroid(j)) out << ',' << v;
    out << '\n';
  }
}

}  // namespace dtt
