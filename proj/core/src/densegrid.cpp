#include "dtt/densegrid.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <fstream>
#include <numbers>

#include "dtt/binary_io.hpp"
#include "dtt/error.hpp"

namespace dtt {

int GridConfig::stride() const {
  return static_cast<int>(std::lround(stride_ratio * patch_size));
}

void GridConfig::validate() const {
  if (patch_size <= 0) throw InvalidArgument("patch size must be positive");
  if (!(stride_ratio > 0.0 && stride_ratio <= 1.0)) {
    throw InvalidArgument("stride ratio must lie in (0, 1]");
  }
  if (stride() < 1) throw InvalidArgument("stride rounds to zero pixels");
  if (cells_per_side <= 0 || orientation_bins <= 0) {
    throw InvalidArgument("cells and orientation bins must be positive");
  }
  if (patch_size % cells_per_side != 0) {
    throw InvalidArgument("patch size must be divisible by cells per side");
  }
}

GridShape grid_shape(int frame_w, int frame_h, const GridConfig& cfg) {
  cfg.validate();
  if (frame_w < cfg.patch_size || frame_h < cfg.patch_size) {
    throw InvalidArgument("frame smaller than one patch");
  }
  const int step = cfg.stride();
  return {(frame_w - cfg.patch_size) / step + 1, (frame_h - cfg.patch_size) / step + 1};
}

std::vector<Locus> grid_loci(int frame_w, int frame_h, const GridConfig& cfg) {
  const GridShape shape = grid_shape(frame_w, frame_h, cfg);
  const int step = cfg.stride();
  std::vector<Locus> loci;
  loci.reserve(shape.count());
  for (int j = 0; j < shape.grid_h; ++j) {
    for (int i = 0; i < shape.grid_w; ++i) loci.push_back({i * step, j * step});
  }
  return loci;
}

namespace {

// Gradient magnitude and orientation over a rectangular window of a frame.
// Gradients always use the full frame with replicated edges, so a window
// computed on its own matches the same pixels of a whole-frame field.
struct GradientField {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
  std::vector<double> magnitude;
  std::vector<double> orientation;  // in bins, [0, bins)

  GradientField(const Frame& frame, int x0_, int y0_, int w, int h, int bins)
      : x0(x0_), y0(y0_), width(w), height(h),
        magnitude(static_cast<std::size_t>(w) * h), orientation(static_cast<std::size_t>(w) * h) {
    const double to_bins = bins / (2.0 * std::numbers::pi);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int fx = x0 + x;
        const int fy = y0 + y;
        const double gx = 0.5 * (static_cast<double>(frame.clamped(fx + 1, fy)) - frame.clamped(fx - 1, fy));
        const double gy = 0.5 * (static_cast<double>(frame.clamped(fx, fy + 1)) - frame.clamped(fx, fy - 1));
        const std::size_t idx = static_cast<std::size_t>(y) * w + x;
        magnitude[idx] = std::sqrt(gx * gx + gy * gy);
        double theta = std::atan2(gy, gx);
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
        double o = theta * to_bins;
        if (o >= bins) o -= bins;
        orientation[idx] = o;
      }
    }
  }
};

// Per-pixel spatial vote weights, shared by every patch of a configuration.
struct PatchLayout {
  struct Vote {
    int cell;  // -1 when outside
    double weight;
  };
  int size = 0;
  std::vector<std::array<Vote, 4>> votes;  // per pixel, four spatial neighbours

  explicit PatchLayout(const GridConfig& cfg) : size(cfg.patch_size) {
    const int cells = cfg.cells_per_side;
    const double cell = static_cast<double>(cfg.patch_size) / cells;
    const double sigma = cfg.patch_size / 2.0;
    const double centre = cfg.patch_size / 2.0;
    votes.resize(static_cast<std::size_t>(size) * size);
    for (int py = 0; py < size; ++py) {
      for (int px = 0; px < size; ++px) {
        const double dx = px + 0.5 - centre;
        const double dy = py + 0.5 - centre;
        const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        const double cx = (px + 0.5) / cell - 0.5;
        const double cy = (py + 0.5) / cell - 0.5;
        const int ix = static_cast<int>(std::floor(cx));
        const int iy = static_cast<int>(std::floor(cy));
        const double fx = cx - ix;
        const double fy = cy - iy;
        auto& v = votes[static_cast<std::size_t>(py) * size + px];
        int n = 0;
        for (int oy = 0; oy < 2; ++oy) {
          for (int ox = 0; ox < 2; ++ox) {
            const int cxi = ix + ox;
            const int cyi = iy + oy;
            const double w = (ox ? fx : 1.0 - fx) * (oy ? fy : 1.0 - fy) * g;
            const bool inside = cxi >= 0 && cxi < cells && cyi >= 0 && cyi < cells;
            v[n++] = {inside ? cyi * cells + cxi : -1, inside ? w : 0.0};
          }
        }
      }
    }
  }
};

// Unit-normalises h and caps every component at kDescriptorClip while keeping
// unit norm: the result is min(lambda*h, clip) with lambda chosen so the norm is
// one. With fewer than 1/clip^2 non-zero components the cap is unreachable; the
// vector is then clipped once and renormalised.
void normalize_clip(std::vector<double>& h) {
  double norm2 = 0.0;
  for (double v : h) norm2 += v * v;
  if (norm2 < 1e-24) {
    std::fill(h.begin(), h.end(), 0.0);
    return;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : h) v *= inv;

  const double clip = kDescriptorClip;
  std::vector<double> sorted(h);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto nonzero = static_cast<std::size_t>(
      std::count_if(sorted.begin(), sorted.end(), [](double v) { return v > 0.0; }));
  if (static_cast<double>(nonzero) * clip * clip < 1.0) {
    double n2 = 0.0;
    for (double& v : h) {
      v = std::min(v, clip);
      n2 += v * v;
    }
    const double r = 1.0 / std::sqrt(n2);
    for (double& v : h) v *= r;
    return;
  }
  // tail[j] = sum of squares of sorted[j..]
  std::vector<double> tail(sorted.size() + 1, 0.0);
  for (std::size_t i = sorted.size(); i-- > 0;) tail[i] = tail[i + 1] + sorted[i] * sorted[i];
  double lambda = 1.0;
  for (std::size_t j = 0; j < nonzero; ++j) {
    const double rest = 1.0 - clip * clip * static_cast<double>(j);
    if (tail[j] <= 0.0 || rest <= 0.0) break;
    const double cand = std::sqrt(rest / tail[j]);
    if (cand * sorted[j] <= clip) {
      lambda = cand;
      break;
    }
  }
  for (double& v : h) v = std::min(lambda * v, clip);
}

void describe(const GradientField& field, int ox, int oy, const PatchLayout& layout,
              const GridConfig& cfg, float* out) {
  const int bins = cfg.orientation_bins;
  std::vector<double> hist(static_cast<std::size_t>(cfg.descriptor_size()), 0.0);
  for (int py = 0; py < layout.size; ++py) {
    for (int px = 0; px < layout.size; ++px) {
      const std::size_t fidx = static_cast<std::size_t>(oy + py) * field.width + (ox + px);
      const double mag = field.magnitude[fidx];
      if (mag == 0.0) continue;
      const double o = field.orientation[fidx];
      const int b0 = static_cast<int>(std::floor(o));
      const double fo = o - b0;
      const int b1 = (b0 + 1) % bins;
      for (const auto& vote : layout.votes[static_cast<std::size_t>(py) * layout.size + px]) {
        if (vote.cell < 0 || vote.weight == 0.0) continue;
        const double w = mag * vote.weight;
        hist[static_cast<std::size_t>(vote.cell) * bins + b0] += w * (1.0 - fo);
        hist[static_cast<std::size_t>(vote.cell) * bins + b1] += w * fo;
      }
    }
  }
  normalize_clip(hist);
  for (std::size_t i = 0; i < hist.size(); ++i) out[i] = static_cast<float>(hist[i]);
}

}  // namespace

std::vector<float> extract_descriptor(const Frame& frame, Locus locus, const GridConfig& cfg) {
  cfg.validate();
  if (locus.x < 0 || locus.y < 0 || locus.x + cfg.patch_size > frame.width() ||
      locus.y + cfg.patch_size > frame.height()) {
    throw InvalidArgument("patch locus out of bounds");
  }
  const GradientField field(frame, locus.x, locus.y, cfg.patch_size, cfg.patch_size,
                            cfg.orientation_bins);
  const PatchLayout layout(cfg);
  std::vector<float> out(static_cast<std::size_t>(cfg.descriptor_size()));
  describe(field, 0, 0, layout, cfg, out.data());
  return out;
}

DescriptorGrid extract_grid(const Frame& frame, const GridConfig& cfg) {
  const GridShape shape = grid_shape(frame.width(), frame.height(), cfg);
  DescriptorGrid grid;
  grid.grid_w = shape.grid_w;
  grid.grid_h = shape.grid_h;
  grid.dim = cfg.descriptor_size();
  grid.patch_size = cfg.patch_size;
  grid.stride = cfg.stride();
  grid.loci = grid_loci(frame.width(), frame.height(), cfg);
  grid.data.assign(grid.loci.size() * grid.dim, 0.0F);
  const GradientField field(frame, 0, 0, frame.width(), frame.height(), cfg.orientation_bins);
  const PatchLayout layout(cfg);
  for (std::size_t i = 0; i < grid.loci.size(); ++i) {
    describe(field, grid.loci[i].x, grid.loci[i].y, layout, cfg, grid.data.data() + i * grid.dim);
  }
  return grid;
}

namespace {
constexpr char kGridMagic[5] = "DGRD";
constexpr std::uint16_t kGridVersion = 1;
}  // namespace

void save_descriptor_grid(const std::filesystem::path& path, const DescriptorGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  binio::put_magic(out, kGridMagic);
  binio::put<std::uint16_t>(out, kGridVersion);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.grid_w));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.grid_h));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dim));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.patch_size));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.stride));
  for (float v : grid.data) binio::put<float>(out, v);
  if (!out) throw Error("failed writing " + path.string());
}

DescriptorGrid load_descriptor_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  binio::expect_magic(in, kGridMagic);
  if (binio::get<std::uint16_t>(in) != kGridVersion) throw FormatError("unsupported DGRD version");
  DescriptorGrid grid;
  grid.grid_w = static_cast<int>(binio::get<std::uint32_t>(in));
  grid.grid_h = static_cast<int>(binio::get<std::uint32_t>(in));
  grid.dim = static_cast<int>(binio::get<std::uint32_t>(in));
  grid.patch_size = static_cast<int>(binio::get<std::uint32_t>(in));
  grid.stride = static_cast<int>(binio::get<std::uint32_t>(in));
  if (grid.grid_w <= 0 || grid.grid_h <= 0 || grid.dim <= 0 || grid.stride <= 0 ||
      static_cast<long long>(grid.grid_w) * grid.grid_h * grid.dim > (1LL << 31)) {
    throw FormatError("implausible DGRD dimensions");
  }
  for (int j = 0; j < grid.grid_h; ++j) {
    for (int i = 0; i < grid.grid_w; ++i) grid.loci.push_back({i * grid.stride, j * grid.stride});
  }
  grid.data.resize(grid.loci.size() * grid.dim);
  for (float& v : grid.data) v = binio::get<float>(in);
  return grid;
}

}  // namespace dtt
