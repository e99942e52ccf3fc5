#include "dtt/scalenorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dtt/error.hpp"

namespace dtt {
namespace {

struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> px;

  Plane() = default;
  Plane(int w, int h) : width(w), height(h), px(static_cast<std::size_t>(w) * h, 0.0) {}
  double& at(int x, int y) { return px[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return px[static_cast<std::size_t>(y) * width + x]; }
  double clamped(int x, int y) const {
    return at(std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1));
  }
  double sample(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    return (at(x0, y0) * (1 - fx) + at(x1, y0) * fx) * (1 - fy) +
           (at(x0, y1) * (1 - fx) + at(x1, y1) * fx) * fy;
  }
};

Plane to_plane(const Frame& f) {
  Plane p(f.width(), f.height());
  std::copy(f.luma().begin(), f.luma().end(), p.px.begin());
  return p;
}

// Separable convolution with a symmetric kernel, replicated borders.
Plane convolve(const Plane& in, const std::vector<double>& kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  Plane tmp(in.width, in.height);
  Plane out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * in.clamped(x + k, y);
      tmp.at(x, y) = acc;
    }
  }
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * tmp.clamped(x, y + k);
      out.at(x, y) = acc;
    }
  }
  return out;
}

Plane downsample(const Plane& in) {
  static const std::vector<double> kBinomial{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const Plane blurred = convolve(in, kBinomial);
  Plane out((in.width + 1) / 2, (in.height + 1) / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) out.at(x, y) = blurred.at(2 * x, 2 * y);
  }
  return out;
}

// Mean over the in-bounds part of a (2r+1)^2 window, via an integral image.
Plane box_mean(const Plane& in, int r) {
  const int w = in.width;
  const int h = in.height;
  std::vector<double> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
  auto I = [&](int x, int y) -> double& { return integral[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      row += in.at(x, y);
      I(x + 1, y + 1) = I(x + 1, y) + row;
    }
  }
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - r);
    const int y1 = std::min(h, y + r + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - r);
      const int x1 = std::min(w, x + r + 1);
      const double sum = I(x1, y1) - I(x0, y1) - I(x1, y0) + I(x0, y0);
      out.at(x, y) = sum / static_cast<double>((x1 - x0) * (y1 - y0));
    }
  }
  return out;
}

constexpr double kGreyLevels = 255.0;

double min_eigenvalue(double a, double b, double c) {
  // Symmetric [[a, b], [b, c]].
  const double half_trace = 0.5 * (a + c);
  const double det = a * c - b * b;
  return half_trace - std::sqrt(std::max(0.0, half_trace * half_trace - det));
}

std::vector<double> gaussian_kernel(double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + r];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

double FlowField::magnitude(std::size_t i) const { return std::hypot(u[i], v[i]); }

FlowField compute_flow(const Frame& a, const Frame& b, const FlowOptions& options) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatch("compute_flow: frames differ in size");
  }
  if (options.window < 1 || options.levels < 1 || options.iterations < 1) {
    throw InvalidArgument("flow options must be positive");
  }
  std::vector<Plane> pa{to_plane(a)};
  std::vector<Plane> pb{to_plane(b)};
  for (int l = 1; l < options.levels; ++l) {
    if (pa.back().width < 2 * options.window || pa.back().height < 2 * options.window) break;
    pa.push_back(downsample(pa.back()));
    pb.push_back(downsample(pb.back()));
  }
  const int r = options.window / 2;
  std::vector<double> window_kernel;
  if (options.window_sigma > 0.0) {
    window_kernel.resize(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
      const double k = std::exp(-(i * i) / (2.0 * options.window_sigma * options.window_sigma));
      window_kernel[static_cast<std::size_t>(i + r)] = k;
      sum += k;
    }
    for (double& k : window_kernel) k /= sum;
  }
  auto window_mean = [&](const Plane& p) {
    return window_kernel.empty() ? box_mean(p, r) : convolve(p, window_kernel);
  };

  Plane u;
  Plane v;
  std::vector<std::uint8_t> degenerate;
  for (int level = static_cast<int>(pa.size()) - 1; level >= 0; --level) {
    const Plane& A = pa[level];
    const Plane& B = pb[level];
    const int w = A.width;
    const int h = A.height;
    Plane nu(w, h);
    Plane nv(w, h);
    if (!u.px.empty()) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          nu.at(x, y) = 2.0 * u.sample(x / 2.0, y / 2.0);
          nv.at(x, y) = 2.0 * v.sample(x / 2.0, y / 2.0);
        }
      }
    }
    u = std::move(nu);
    v = std::move(nv);

    Plane ix(w, h);
    Plane iy(w, h);
    Plane xx(w, h);
    Plane xy(w, h);
    Plane yy(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double gx = 0.5 * (A.clamped(x + 1, y) - A.clamped(x - 1, y));
        const double gy = 0.5 * (A.clamped(x, y + 1) - A.clamped(x, y - 1));
        ix.at(x, y) = gx;
        iy.at(x, y) = gy;
        xx.at(x, y) = gx * gx;
        xy.at(x, y) = gx * gy;
        yy.at(x, y) = gy * gy;
      }
    }
    const Plane gxx = window_mean(xx);
    const Plane gxy = window_mean(xy);
    const Plane gyy = window_mean(yy);
    degenerate.assign(static_cast<std::size_t>(w) * h, 0);
    for (std::size_t i = 0; i < degenerate.size(); ++i) {
      degenerate[i] = kGreyLevels * kGreyLevels * min_eigenvalue(gxx.px[i], gxy.px[i], gyy.px[i]) <
                      options.min_eigenvalue;
    }

    Plane bx(w, h);
    Plane by(w, h);
    for (int it = 0; it < options.iterations; ++it) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double it_diff = B.sample(x + u.at(x, y), y + v.at(x, y)) - A.at(x, y);
          bx.at(x, y) = ix.at(x, y) * it_diff;
          by.at(x, y) = iy.at(x, y) * it_diff;
        }
      }
      const Plane sbx = window_mean(bx);
      const Plane sby = window_mean(by);
      for (std::size_t i = 0; i < u.px.size(); ++i) {
        if (degenerate[i]) continue;
        const double det = gxx.px[i] * gyy.px[i] - gxy.px[i] * gxy.px[i];
        if (det <= 0.0) continue;
        const double du = -(gyy.px[i] * sbx.px[i] - gxy.px[i] * sby.px[i]) / det;
        const double dv = -(gxx.px[i] * sby.px[i] - gxy.px[i] * sbx.px[i]) / det;
        u.px[i] += du;
        v.px[i] += dv;
      }
    }
  }

  FlowField flow(a.width(), a.height());
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (degenerate[i] || !std::isfinite(u.px[i]) || !std::isfinite(v.px[i])) continue;
    flow.u[i] = u.px[i];
    flow.v[i] = v.px[i];
  }
  return flow;
}

FlowField remove_translation(const FlowField& flow) {
  FlowField out = flow;
  if (flow.size() == 0) return out;
  double mu = 0.0;
  double mv = 0.0;
  for (std::size_t i = 0; i < flow.size(); ++i) {
    mu += flow.u[i];
    mv += flow.v[i];
  }
  mu /= static_cast<double>(flow.size());
  mv /= static_cast<double>(flow.size());
  for (std::size_t i = 0; i < flow.size(); ++i) {
    out.u[i] -= mu;
    out.v[i] -= mv;
  }
  return out;
}

double target_radius(int width, int height, const ScaleOptions& options) {
  return options.target_fraction * std::min(width, height);
}

double scale_factor_for_radius(double radius, int width, int height, const ScaleOptions& options) {
  if (!(radius > 0.0)) throw InvalidArgument("object radius must be positive");
  return std::clamp(target_radius(width, height, options) / radius, options.min_scale,
                    options.max_scale);
}

ScaleEstimate estimate_scale(const FlowField& residual, const ScaleOptions& options) {
  const int w = residual.width;
  const int h = residual.height;
  ScaleEstimate est;
  est.coarse_mask = Mask(w, h, true);
  est.object_radius = target_radius(w, h, options);
  est.scale_factor = 1.0;
  est.ray_radii.assign(static_cast<std::size_t>(options.rays),
                       std::numeric_limits<double>::quiet_NaN());
  if (w <= 0 || h <= 0) return est;

  Plane mag(w, h);
  double peak = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    mag.px[i] = residual.magnitude(i);
    peak = std::max(peak, mag.px[i]);
  }
  if (peak < 1e-9) return est;
  const Plane smooth = convolve(mag, gaussian_kernel(options.smoothing_sigma));

  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  std::vector<double> valid;
  std::vector<double> profile;
  for (int ray = 0; ray < options.rays; ++ray) {
    const double theta = 2.0 * std::numbers::pi * ray / options.rays;
    const double dx = std::cos(theta);
    const double dy = std::sin(theta);
    profile.clear();
    for (int r = 0;; ++r) {
      const double x = cx + r * dx;
      const double y = cy + r * dy;
      if (x < 0.0 || y < 0.0 || x > w - 1 || y > h - 1) break;
      profile.push_back(smooth.sample(x, y));
    }
    double steepest = 0.0;
    int where = -1;
    for (std::size_t r = 1; r + 1 < profile.size(); ++r) {
      const double g = 0.5 * (profile[r + 1] - profile[r - 1]);
      if (g < steepest) {
        steepest = g;
        where = static_cast<int>(r);
      }
    }
    if (where > 0 && -steepest >= options.min_drop) {
      // Parabolic refinement of the gradient minimum to sub-sample precision.
      double radius = where;
      if (where >= 2 && static_cast<std::size_t>(where) + 2 < profile.size()) {
        const double gl = 0.5 * (profile[where] - profile[where - 2]);
        const double gr = 0.5 * (profile[where + 2] - profile[where]);
        const double denom = gl - 2.0 * steepest + gr;
        if (denom > 0.0) radius += std::clamp(0.5 * (gl - gr) / denom, -0.5, 0.5);
      }
      est.ray_radii[ray] = radius;
      valid.push_back(radius);
    }
  }
  if (static_cast<double>(valid.size()) < options.min_valid_fraction * options.rays) return est;

  std::sort(valid.begin(), valid.end());
  const std::size_t m = valid.size();
  const double median = (m % 2 == 1) ? valid[m / 2] : 0.5 * (valid[m / 2 - 1] + valid[m / 2]);
  est.degenerate = false;
  est.object_radius = median;
  est.scale_factor = scale_factor_for_radius(median, w, h, options);

  std::vector<double> radii(est.ray_radii);
  for (double& r : radii) {
    if (std::isnan(r)) r = median;
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double ddx = x - cx;
      const double ddy = y - cy;
      double theta = std::atan2(ddy, ddx);
      if (theta < 0.0) theta += 2.0 * std::numbers::pi;
      const double pos = theta / (2.0 * std::numbers::pi) * options.rays;
      const int r0 = static_cast<int>(std::floor(pos)) % options.rays;
      const int r1 = (r0 + 1) % options.rays;
      const double f = pos - std::floor(pos);
      const double bound = radii[r0] * (1.0 - f) + radii[r1] * f;
      est.coarse_mask.set(x, y, std::hypot(ddx, ddy) <= bound);
    }
  }
  return est;
}

Frame rescale_about_center(const Frame& frame, double factor) {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  if (factor == 1.0) return frame;
  const int w = frame.width();
  const int h = frame.height();
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  std::vector<float> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float s = frame.sample(cx + (x - cx) / factor, cy + (y - cy) / factor);
      out[static_cast<std::size_t>(y) * w + x] = std::clamp(s, 0.0F, 1.0F);
    }
  }
  return Frame(w, h, std::move(out));
}

Mask rescale_mask(const Mask& mask, double factor) {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  if (factor == 1.0) return mask;
  const double cx = (mask.width - 1) / 2.0;
  const double cy = (mask.height - 1) / 2.0;
  Mask out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const int sx = static_cast<int>(std::lround(cx + (x - cx) / factor));
      const int sy = static_cast<int>(std::lround(cy + (y - cy) / factor));
      out.set(x, y, mask.at(std::clamp(sx, 0, mask.width - 1), std::clamp(sy, 0, mask.height - 1)));
    }
  }
  return out;
}

NormalizedSequence normalize_sequence(const VideoSequence& seq, bool enabled,
                                      const FlowOptions& flow, const ScaleOptions& scale) {
  NormalizedSequence out;
  const std::size_t n = seq.size();
  if (!enabled || n < 2) {
    out.sequence = seq;
    out.masks.assign(n, Mask(seq.width(), seq.height(), true));
    out.scale_factors.assign(n, 1.0);
    return out;
  }
  std::vector<ScaleEstimate> pair_estimates;
  pair_estimates.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    pair_estimates.push_back(
        estimate_scale(remove_translation(compute_flow(seq[i], seq[i + 1], flow)), scale));
  }
  std::vector<Frame> frames;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ScaleEstimate& est = pair_estimates[std::min(i, n - 2)];
    frames.push_back(rescale_about_center(seq[i], est.scale_factor));
    out.masks.push_back(rescale_mask(est.coarse_mask, est.scale_factor));
    out.scale_factors.push_back(est.scale_factor);
  }
  out.sequence = VideoSequence(seq.id(), std::move(frames), seq.role());
  return out;
}

}  // namespace dtt
