#include "dtt/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "dtt/error.hpp"
#include "dtt/image_io.hpp"

namespace dtt {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller on our own uniform draws keeps streams identical across
  // standard library implementations.
  const double u1 = std::max(uniform(rng, 0.0, 1.0), 1e-300);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

using Rgb = std::array<double, 3>;

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// Matches the PNG reader, so in-memory frames equal what load_sequence returns.
float luma_of(const std::uint8_t* p) {
  const double v = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
  return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

// Smooth random pattern on the plane: oriented sinusoids plus Gaussian blobs.
struct Pattern {
  struct Wave {
    double kx, ky, phase, amp;
  };
  struct Blob {
    double x, y, r, amp;
  };
  std::vector<Wave> waves;
  std::vector<Blob> blobs;
  double base = 0.5;

  double operator()(double x, double y) const {
    double v = base;
    for (const auto& w : waves) v += w.amp * std::sin(w.kx * x + w.ky * y + w.phase);
    for (const auto& b : blobs) {
      const double dx = x - b.x;
      const double dy = y - b.y;
      v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.r * b.r));
    }
    return v;
  }
};

// Object-specific structured motif in normalised sprite coordinates.
struct Motif {
  int kind = 0;
  double freq = 6.0;
  double angle = 0.0;
  double phase = 0.0;
  double amp = 0.2;
  double warp = 0.0;
  std::vector<std::array<double, 5>> strokes;  // centre x, y, direction x, y, half length

  double operator()(double x, double y) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double u = c * x + s * y;
    const double v = -s * x + c * y;
    switch (kind) {
      case 0:  // stripes
        return amp * std::sin(freq * u + phase);
      case 1:  // soft checker
        return amp * std::tanh(2.5 * std::sin(freq * u + phase) * std::sin(freq * v));
      case 2:  // rings
        return amp * std::sin(freq * std::hypot(x - 0.2 * c, y - 0.2 * s) + phase);
      case 3:  // spokes
        return amp * std::sin(std::round(freq) * std::atan2(v, u) + phase);
      case 4: {  // random strokes
        double acc = 0.0;
        for (const auto& st : strokes) {
          const double px = x - st[0];
          const double py = y - st[1];
          const double along = std::clamp(px * st[2] + py * st[3], -st[4], st[4]);
          const double dx = px - along * st[2];
          const double dy = py - along * st[3];
          acc += std::exp(-(dx * dx + dy * dy) / (2.0 * 0.035 * 0.035));
        }
        return amp * (1.6 * std::min(acc, 1.0) - 0.8);
      }
      case 5:  // zig-zag
        return amp * std::sin(freq * u + warp * std::sin(freq * v) + phase);
      case 6: {  // hexagonal interference
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) {
          const double a = angle + i * std::numbers::pi / 3.0;
          acc += std::cos(freq * (std::cos(a) * x + std::sin(a) * y) + phase);
        }
        return amp * acc / 2.0;
      }
      case 7:  // plaid of two unequal gratings
        return amp * 0.6 * (std::sin(freq * u + phase) + std::sin(0.55 * freq * v));
      case 8:  // concentric squares
        return amp * std::sin(freq * std::max(std::abs(u), std::abs(v)) + phase);
      default:  // wavy rings
        return amp * std::sin(freq * std::hypot(x, y) + warp * std::sin(3.0 * std::atan2(v, u)) + phase);
    }
  }
};

constexpr int kMotifKinds = 10;

Motif make_motif(std::mt19937_64& rng, int kind) {
  Motif m;
  m.kind = kind;
  m.freq = uniform(rng, 6.0, 10.0);
  m.angle = uniform(rng, 0.0, std::numbers::pi);
  m.phase = uniform(rng, 0.0, kTwoPi);
  m.amp = uniform(rng, 0.26, 0.32);
  m.warp = uniform(rng, 1.0, 2.0);
  if (kind == 4) {
    for (int i = 0; i < 14; ++i) {
      const double a = uniform(rng, 0.0, std::numbers::pi);
      m.strokes.push_back({uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8), std::cos(a), std::sin(a),
                           uniform(rng, 0.15, 0.4)});
    }
  }
  return m;
}

// Sprite texture in normalised sprite coordinates (roughly [-1, 1]^2):
// a motif, one weaker wave and a few blobs.
Pattern sprite_pattern(std::mt19937_64& rng) {
  Pattern p;
  p.base = uniform(rng, 0.4, 0.6);
  const double freq = uniform(rng, 3.0, 8.0);
  const double angle = uniform(rng, 0.0, std::numbers::pi);
  p.waves.push_back({freq * std::cos(angle), freq * std::sin(angle), uniform(rng, 0.0, kTwoPi),
                     uniform(rng, 0.04, 0.08)});
  for (int i = 0; i < 6; ++i) {
    p.blobs.push_back({uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8), uniform(rng, 0.08, 0.2),
                       uniform(rng, -0.3, 0.3)});
  }
  return p;
}

// Background clutter in pixels over a canvas larger than the frame.
Pattern clutter_pattern(std::mt19937_64& rng, double extent_w, double extent_h) {
  Pattern p;
  p.base = uniform(rng, 0.4, 0.6);
  for (int i = 0; i < 4; ++i) {
    const double wavelength = uniform(rng, 12.0, 40.0);
    const double angle = uniform(rng, 0.0, std::numbers::pi);
    const double k = kTwoPi / wavelength;
    p.waves.push_back({k * std::cos(angle), k * std::sin(angle), uniform(rng, 0.0, kTwoPi),
                       uniform(rng, 0.04, 0.08)});
  }
  const int blobs = static_cast<int>(extent_w * extent_h / 120.0);
  for (int i = 0; i < blobs; ++i) {
    p.blobs.push_back({uniform(rng, -extent_w / 2, extent_w / 2), uniform(rng, -extent_h / 2, extent_h / 2),
                       uniform(rng, 3.5, 8.0), uniform(rng, -0.18, 0.18)});
  }
  return p;
}

struct SpriteModel {
  Pattern texture;
  Motif motif;
  double exponent = 2.0;  // superellipse exponent
  double aspect = 1.0;    // height / width
  Rgb tint_lo{};
  Rgb tint_hi{};
};

SpriteModel make_sprite(std::mt19937_64& rng, int object) {
  SpriteModel s;
  s.texture = sprite_pattern(rng);
  s.motif = make_motif(rng, object % kMotifKinds);
  s.exponent = uniform(rng, 2.0, 3.0);
  s.aspect = uniform(rng, 0.8, 1.15);
  for (int c = 0; c < 3; ++c) {
    s.tint_lo[c] = uniform(rng, 0.0, 0.25);
    s.tint_hi[c] = uniform(rng, 0.75, 1.0);
  }
  return s;
}

// Coverage in [0, 1] of a superellipse with a one-pixel soft edge.
double sprite_coverage(double u, double v, const SpriteModel& s, double radius_px) {
  const double au = std::abs(u);
  const double av = std::abs(v) / s.aspect;
  const double r = std::pow(std::pow(au, s.exponent) + std::pow(av, s.exponent), 1.0 / s.exponent);
  const double edge_px = (1.0 - r) * radius_px;
  return std::clamp(edge_px + 0.5, 0.0, 1.0);
}

}  // namespace

std::string synth_object_id(int object) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "obj_%03d", object);
  return buf;
}

std::string synth_sequence_id(int sequence) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "seq_%02d", sequence);
  return buf;
}

namespace {

// RGB frames are returned through rgb_out when it is non-null.
std::vector<SynthSequence> render_sequences(const SynthConfig& cfg,
                                            std::vector<std::vector<std::vector<std::uint8_t>>>* rgb_out) {
  if (cfg.n_objects < 2) throw InvalidArgument("synthetic dataset needs at least two objects");
  if (cfg.n_sequences < 1 || cfg.frames < 1 || cfg.width < 8 || cfg.height < 8) {
    throw InvalidArgument("synthetic dataset dimensions must be positive");
  }
  std::vector<SynthSequence> out;
  std::mt19937_64 object_rng(cfg.seed);
  std::vector<SpriteModel> sprites;
  for (int o = 0; o < cfg.n_objects; ++o) sprites.push_back(make_sprite(object_rng, o));

  const int w = cfg.width;
  const int h = cfg.height;
  for (int o = 0; o < cfg.n_objects; ++o) {
    const SpriteModel& sprite = sprites[o];
    for (int s = 0; s < cfg.n_sequences; ++s) {
      std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(o) * 1000003ULL +
                          static_cast<std::uint64_t>(s) * 7919ULL + 1ULL);
      const double travel = cfg.parallax * cfg.frames + 8.0;
      const Pattern clutter = clutter_pattern(rng, w + 2 * travel, h + 2 * travel);
      Rgb bg_lo{};
      Rgb bg_hi{};
      for (int c = 0; c < 3; ++c) {
        bg_lo[c] = uniform(rng, 0.0, 0.3);
        bg_hi[c] = uniform(rng, 0.7, 1.0);
      }
      const double radius = cfg.sprite_radius * (1.0 + uniform(rng, -cfg.scale_jitter, cfg.scale_jitter));
      const double jx = uniform(rng, -cfg.centre_jitter, cfg.centre_jitter);
      const double jy = uniform(rng, -cfg.centre_jitter, cfg.centre_jitter);
      const double shear0 = uniform(rng, -cfg.shear_span, 0.0);
      const double gain = uniform(rng, 0.9, 1.1);
      const double direction = (rng() & 1U) ? 1.0 : -1.0;

      SynthSequence seq;
      seq.object_id = synth_object_id(o);
      seq.sequence_id = synth_sequence_id(s);
      seq.sprite_radius = radius;
      std::vector<Frame> frames;
      double shake_x = 0.0;
      double shake_y = 0.0;
      for (int n = 0; n < cfg.frames; ++n) {
        if (n > 0) {
          shake_x += cfg.shake_sigma * gaussian(rng);
          shake_y += cfg.shake_sigma * gaussian(rng);
        }
        const double t = cfg.frames > 1 ? static_cast<double>(n) / (cfg.frames - 1) : 0.0;
        const double shear = shear0 + cfg.shear_span * t;
        const double cx = (w - 1) / 2.0 + jx + shake_x;
        const double cy = (h - 1) / 2.0 + jy + shake_y;
        const double bgx = direction * cfg.parallax * n - shake_x;
        const double bgy = -shake_y;
        std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
        Mask gt(w, h);
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            const double dy = (y - cy) / radius;
            const double u = (x - cx) / radius - shear * dy;
            const double cover = sprite_coverage(u, dy, sprite, radius);
            const double bgv = clutter(x - w / 2.0 + bgx, y - h / 2.0 + bgy);
            const double fgv = sprite.texture(u, dy) + sprite.motif(u, dy);
            std::uint8_t* p = rgb.data() + (static_cast<std::size_t>(y) * w + x) * 3;
            for (int c = 0; c < 3; ++c) {
              const double b = bg_lo[c] + (bg_hi[c] - bg_lo[c]) * bgv;
              const double f = sprite.tint_lo[c] + (sprite.tint_hi[c] - sprite.tint_lo[c]) * fgv;
              const double v = gain * (cover * f + (1.0 - cover) * b) + cfg.noise_sigma * gaussian(rng);
              p[c] = to_byte(v);
            }
            gt.set(x, y, cover >= 0.5);
          }
        }
        std::vector<float> luma(static_cast<std::size_t>(w) * h);
        for (std::size_t i = 0; i < luma.size(); ++i) luma[i] = luma_of(rgb.data() + 3 * i);
        frames.emplace_back(w, h, std::move(luma));
        seq.ground_truth.push_back(std::move(gt));
        if (rgb_out != nullptr) {
          if (n == 0) rgb_out->emplace_back();
          rgb_out->back().push_back(std::move(rgb));
        }
      }
      seq.sequence = VideoSequence(seq.sequence_id, std::move(frames),
                                   s == 0 ? SequenceRole::gallery : SequenceRole::query);
      out.push_back(std::move(seq));
    }
  }
  return out;
}

}  // namespace

std::vector<SynthSequence> synth_sequences(const SynthConfig& cfg) { return render_sequences(cfg, nullptr); }

void synth_generate(const SynthConfig& cfg, const std::filesystem::path& root) {
  std::vector<std::vector<std::vector<std::uint8_t>>> rgb;
  const auto seqs = render_sequences(cfg, &rgb);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const auto& s = seqs[i];
    const auto dir = root / s.object_id / s.sequence_id;
    std::filesystem::create_directories(dir / "groundtruth");
    for (std::size_t n = 0; n < s.sequence.size(); ++n) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%04zu.png", n);
      write_png_rgb(dir / name, s.sequence.width(), s.sequence.height(), rgb[i][n]);
      std::snprintf(name, sizeof name, "mask_%04zu.pgm", n);
      write_mask_pgm(dir / "groundtruth" / name, s.ground_truth[n]);
    }
  }
}

std::vector<TurntableObject> synth_turntable(const TurntableConfig& cfg) {
  if (cfg.n_objects < 1 || cfg.views < 1) throw InvalidArgument("turntable needs objects and views");
  std::vector<TurntableObject> out;
  std::mt19937_64 rng(cfg.seed);
  const int w = cfg.width;
  const int h = cfg.height;
  for (int o = 0; o < cfg.n_objects; ++o) {
    // Profile r(z) for z in [-1, 1]: a few cosine harmonics around a base radius.
    const double base = uniform(rng, 0.45, 0.7);
    std::array<double, 3> harm{};
    std::array<double, 3> harm_phase{};
    for (int i = 0; i < 3; ++i) {
      harm[i] = uniform(rng, -0.12, 0.12);
      harm_phase[i] = uniform(rng, 0.0, kTwoPi);
    }
    const double half_height = uniform(rng, 0.6, 0.9);
    // Surface texture over (angle, z): integer angular frequencies keep it periodic.
    struct Wave {
      int m;
      double kz, phase, amp;
    };
    std::vector<Wave> waves;
    for (int i = 0; i < 4; ++i) {
      waves.push_back({static_cast<int>(uniform(rng, 1.0, 5.0)), uniform(rng, -6.0, 6.0),
                       uniform(rng, 0.0, kTwoPi), uniform(rng, 0.08, 0.18)});
    }
    const double albedo = uniform(rng, 0.45, 0.65);

    TurntableObject obj;
    obj.object_id = synth_object_id(o);
    const double scale = 0.45 * std::min(w, h);
    for (int v = 0; v < cfg.views; ++v) {
      const double yaw = kTwoPi * v / cfg.views;
      std::vector<float> luma(static_cast<std::size_t>(w) * h, 0.0F);
      for (int y = 0; y < h; ++y) {
        const double z = -((y - (h - 1) / 2.0) / scale) / half_height;
        if (std::abs(z) > 1.0) continue;
        double r = base;
        for (int i = 0; i < 3; ++i) r += harm[i] * std::cos((i + 1) * std::numbers::pi * z + harm_phase[i]);
        r = std::max(r, 0.15);
        for (int x = 0; x < w; ++x) {
          const double xs = (x - (w - 1) / 2.0) / scale;
          if (std::abs(xs) >= r) continue;
          const double local = std::asin(xs / r);
          const double angle = yaw + local;
          double t = albedo;
          for (const auto& wv : waves) t += wv.amp * std::sin(wv.m * angle + wv.kz * z + wv.phase);
          const double shade = 0.35 + 0.65 * std::cos(local);
          luma[static_cast<std::size_t>(y) * w + x] =
              static_cast<float>(std::clamp(t * shade, 0.0, 1.0));
        }
      }
      // Quantise like an 8-bit image on disk.
      for (float& l : luma) l = static_cast<float>(std::lround(l * 255.0F) / 255.0);
      obj.views.emplace_back(w, h, std::move(luma));
    }
    out.push_back(std::move(obj));
  }
  return out;
}

void synth_turntable_generate(const TurntableConfig& cfg, const std::filesystem::path& root) {
  for (const auto& obj : synth_turntable(cfg)) {
    const auto dir = root / obj.object_id;
    std::filesystem::create_directories(dir);
    for (std::size_t v = 0; v < obj.views.size(); ++v) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_r%zu.png", obj.object_id.c_str(), v * 5);
      write_png(dir / name, obj.views[v]);
    }
  }
}

}  // namespace dtt
