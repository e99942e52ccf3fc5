#include "dtt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>
#include <unordered_map>

#include "dtt/baselines.hpp"
#include "dtt/error.hpp"
#include "dtt/image_io.hpp"
#include "dtt/ingest.hpp"
#include "dtt/segcut.hpp"

namespace dtt {
namespace fs = std::filesystem;

namespace {

int wrap_view(int v) { return ((v % kAloiViews) + kAloiViews) % kAloiViews; }

std::vector<int> window_views(int start_deg, int delta_phi) {
  std::vector<int> out;
  const int first = start_deg / kAloiStepDegrees;
  for (int i = 0; i < delta_phi / kAloiStepDegrees; ++i) out.push_back(wrap_view(first + i));
  return out;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean_or_nan(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

PreparedSequence prepared_from_views(const std::string& id, const std::vector<Frame>& frames,
                                     const std::vector<const DescriptorGrid*>& grids) {
  PreparedSequence p;
  p.id = id;
  p.normalized.sequence = VideoSequence(id, frames);
  for (const Frame& f : frames) p.normalized.masks.emplace_back(f.width(), f.height(), true);
  p.normalized.scale_factors.assign(frames.size(), 1.0);
  for (const DescriptorGrid* g : grids) p.descriptors.push_back(*g);
  return p;
}

}  // namespace

void AloiProtocolConfig::validate() const {
  auto ok = [](int deg) { return deg % kAloiStepDegrees == 0; };
  if (delta_phi < kAloiStepDegrees || !ok(delta_phi) || delta_phi > 360) {
    throw InvalidArgument("delta_phi must be a multiple of 5 in [5, 360]");
  }
  for (int d : delta_alphas) {
    if (!ok(d) || d < 0) throw InvalidArgument("delta_alpha values must be non-negative multiples of 5");
  }
  for (int a : origins) {
    if (!ok(a) || a < 0 || a >= 360) throw InvalidArgument("origins must be multiples of 5 in [0, 360)");
  }
}

ViewWindows aloi_windows(int alpha, int delta_phi, int delta_alpha) {
  AloiProtocolConfig check;
  check.delta_phi = delta_phi;
  check.delta_alphas = {delta_alpha};
  check.origins = {((alpha % 360) + 360) % 360};
  if (alpha % kAloiStepDegrees != 0) throw InvalidArgument("alpha must be a multiple of 5");
  check.validate();
  return {window_views(alpha, delta_phi), window_views(alpha + delta_alpha, delta_phi)};
}

std::string method_name(Method m) {
  switch (m) {
    case Method::dtt:
      return "dtt";
    case Method::sift_cos:
      return "sift-cos";
    case Method::app_cos:
      return "app-cos";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "dtt") return Method::dtt;
  if (name == "sift-cos") return Method::sift_cos;
  if (name == "app-cos") return Method::app_cos;
  throw InvalidArgument("unknown method '" + name + "' (expected dtt, sift-cos or app-cos)");
}

std::vector<AloiObject> load_aloi(const fs::path& root, std::span<const std::string> objects) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IngestError(IngestErrc::missing_directory, "no such directory: " + root.string());
  std::vector<std::string> ids(objects.begin(), objects.end());
  if (ids.empty()) {
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_directory()) ids.push_back(e.path().filename().string());
    }
    std::sort(ids.begin(), ids.end());
  }
  static const std::regex angle_re(R"(_r(\d+)\.[A-Za-z]+$)");
  std::vector<AloiObject> out;
  for (const auto& id : ids) {
    const auto files = list_frame_files(root / id);
    if (files.size() != static_cast<std::size_t>(kAloiViews)) {
      throw IngestError(IngestErrc::no_frames, "object " + id + " has " + std::to_string(files.size()) +
                                                   " views, expected 72");
    }
    AloiObject obj;
    obj.id = id;
    obj.views.resize(kAloiViews);
    std::vector<bool> seen(kAloiViews, false);
    bool by_angle = true;
    for (const auto& f : files) {
      std::smatch m;
      const std::string name = f.filename().string();
      if (!std::regex_search(name, m, angle_re)) {
        by_angle = false;
        break;
      }
      const int angle = std::stoi(m[1].str());
      if (angle % kAloiStepDegrees != 0 || angle >= 360 || seen[angle / kAloiStepDegrees]) {
        by_angle = false;
        break;
      }
      seen[angle / kAloiStepDegrees] = true;
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
      int slot = static_cast<int>(i);
      if (by_angle) {
        std::smatch m;
        const std::string name = files[i].filename().string();
        std::regex_search(name, m, angle_re);
        slot = std::stoi(m[1].str()) / kAloiStepDegrees;
      }
      obj.views[slot] = read_image(files[i]);
    }
    for (const Frame& v : obj.views) {
      if (v.width() != obj.views.front().width() || v.height() != obj.views.front().height()) {
        throw IngestError(IngestErrc::mixed_dimensions, "object " + id + " mixes view sizes");
      }
    }
    out.push_back(std::move(obj));
  }
  if (out.empty()) throw IngestError(IngestErrc::no_frames, "no objects under " + root.string());
  return out;
}

EvalReport evaluate_aloi(std::span<const AloiObject> objects, const AloiProtocolConfig& protocol, Method method,
                         const PipelineConfig& pipeline, const EvalOptions& options) {
  protocol.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<const AloiObject*> objs;
  if (protocol.objects.empty()) {
    for (const auto& o : objects) objs.push_back(&o);
  } else {
    for (const auto& id : protocol.objects) {
      auto it = std::find_if(objects.begin(), objects.end(), [&](const AloiObject& o) { return o.id == id; });
      if (it == objects.end()) throw InvalidArgument("object " + id + " is not in the dataset");
      objs.push_back(&*it);
    }
  }
  if (objs.size() < 2) throw InvalidArgument("the protocol needs at least two objects");
  for (const AloiObject* o : objs) {
    if (o->views.size() != static_cast<std::size_t>(kAloiViews)) {
      throw IngestError(IngestErrc::no_frames, "object " + o->id + " does not have 72 views");
    }
  }
  std::vector<int> origins = protocol.origins;
  if (origins.empty()) {
    for (int a = 0; a < 360; a += kAloiStepDegrees) origins.push_back(a);
  }
  const std::size_t n_obj = objs.size();
  const std::size_t n_da = protocol.delta_alphas.size();
  const std::size_t n_or = origins.size();

  // Case index = (da * n_or + origin) * n_obj + object.
  struct Job {
    std::size_t da, origin, object;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < n_da; ++d)
    for (std::size_t a = 0; a < n_or; ++a)
      for (std::size_t o = 0; o < n_obj; ++o) jobs.push_back({d, a, o});
  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle_seed) {
    std::mt19937_64 rng(*options.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  auto view_deg = [&](std::size_t a) { return origins[a]; };
  std::vector<MatchResult> results(jobs.size());

  if (method == Method::dtt) {
    // Distinct window starts (in view units) needed as gallery or query.
    std::vector<bool> is_train(kAloiViews, false);
    std::vector<bool> needed(kAloiViews, false);
    for (std::size_t a = 0; a < n_or; ++a) {
      const int s = wrap_view(view_deg(a) / kAloiStepDegrees);
      is_train[s] = needed[s] = true;
      for (int da : protocol.delta_alphas) needed[wrap_view(s + da / kAloiStepDegrees)] = true;
    }
    const int win = protocol.delta_phi / kAloiStepDegrees;
    auto window_frames = [&](const AloiObject& o, int s) {
      std::vector<Frame> f;
      for (int i = 0; i < win; ++i) f.push_back(o.views[wrap_view(s + i)]);
      return f;
    };
    // prepared[o][s] is populated for needed window starts.
    std::vector<std::vector<PreparedSequence>> prepared(n_obj, std::vector<PreparedSequence>(kAloiViews));
    if (!pipeline.scale_norm) {
      std::vector<std::vector<DescriptorGrid>> view_grids(n_obj, std::vector<DescriptorGrid>(kAloiViews));
      parallel_for(
          n_obj * kAloiViews,
          [&](std::size_t i) {
            view_grids[i / kAloiViews][i % kAloiViews] =
                extract_grid(objs[i / kAloiViews]->views[i % kAloiViews], pipeline.grid);
          },
          options.threads);
      for (std::size_t o = 0; o < n_obj; ++o) {
        for (int s = 0; s < kAloiViews; ++s) {
          if (!needed[s]) continue;
          std::vector<const DescriptorGrid*> g;
          for (int i = 0; i < win; ++i) g.push_back(&view_grids[o][wrap_view(s + i)]);
          prepared[o][s] = prepared_from_views(objs[o]->id, window_frames(*objs[o], s), g);
        }
      }
    } else {
      std::vector<std::pair<std::size_t, int>> todo;
      for (std::size_t o = 0; o < n_obj; ++o)
        for (int s = 0; s < kAloiViews; ++s)
          if (needed[s]) todo.emplace_back(o, s);
      parallel_for(
          todo.size(),
          [&](std::size_t i) {
            const auto [o, s] = todo[i];
            prepared[o][s] = prepare_sequence(VideoSequence(objs[o]->id, window_frames(*objs[o], s)), pipeline);
          },
          options.threads);
    }
    // Codebook over every training window, in canonical object order. With
    // scale normalisation off each view is pooled once.
    std::vector<const PreparedSequence*> pool;
    if (!pipeline.scale_norm) {
      // Build one pseudo-sequence per object holding each training view once.
      std::vector<PreparedSequence> unique_views(n_obj);
      for (std::size_t o = 0; o < n_obj; ++o) {
        std::vector<bool> used(kAloiViews, false);
        for (int s = 0; s < kAloiViews; ++s) {
          if (!is_train[s]) continue;
          for (int i = 0; i < win; ++i) {
            const int v = wrap_view(s + i);
            if (used[v]) continue;
            used[v] = true;
            unique_views[o].descriptors.push_back(prepared[o][s].descriptors[i]);
          }
        }
      }
      for (const auto& u : unique_views) pool.push_back(&u);
      const Codebook cb = train_global_codebook(pool, pipeline);
      std::vector<std::vector<std::vector<WordGrid>>> words(n_obj, std::vector<std::vector<WordGrid>>(kAloiViews));
      std::vector<std::vector<GalleryModel>> models(n_obj, std::vector<GalleryModel>(kAloiViews));
      parallel_for(
          n_obj * kAloiViews,
          [&](std::size_t i) {
            const std::size_t o = i / kAloiViews;
            const int s = static_cast<int>(i % kAloiViews);
            if (!needed[s]) return;
            words[o][s] = quantize_sequence(prepared[o][s], cb);
            if (is_train[s] || pipeline.symmetric) {
              models[o][s] = train_model(objs[o]->id, prepared[o][s], words[o][s], cb, pipeline);
            }
          },
          options.threads);
      parallel_for(
          order.size(),
          [&](std::size_t idx) {
            const std::size_t c = order[idx];
            const Job& j = jobs[c];
            const int s = wrap_view(view_deg(j.origin) / kAloiStepDegrees);
            const int q = wrap_view(s + protocol.delta_alphas[j.da] / kAloiStepDegrees);
            GalleryModel query_model;
            const GalleryModel* qm = &models[j.object][q];
            if (!pipeline.symmetric) {
              query_model.object_id = objs[j.object]->id;
              query_model.codebook_fingerprint = models[j.object][s].codebook_fingerprint;
              query_model.words = words[j.object][q];
              qm = &query_model;
            }
            std::vector<GalleryScore> scores;
            for (std::size_t g = 0; g < n_obj; ++g) {
              scores.push_back({objs[g]->id, score_pair(*qm, models[g][s], pipeline)});
            }
            results[c] = rank(std::move(scores));
          },
          options.threads);
    } else {
      for (std::size_t o = 0; o < n_obj; ++o)
        for (int s = 0; s < kAloiViews; ++s)
          if (is_train[s]) pool.push_back(&prepared[o][s]);
      const Codebook cb = train_global_codebook(pool, pipeline);
      std::vector<std::vector<std::vector<WordGrid>>> words(n_obj, std::vector<std::vector<WordGrid>>(kAloiViews));
      std::vector<std::vector<GalleryModel>> models(n_obj, std::vector<GalleryModel>(kAloiViews));
      parallel_for(
          n_obj * kAloiViews,
          [&](std::size_t i) {
            const std::size_t o = i / kAloiViews;
            const int s = static_cast<int>(i % kAloiViews);
            if (!needed[s]) return;
            words[o][s] = quantize_sequence(prepared[o][s], cb);
            models[o][s] = train_model(objs[o]->id, prepared[o][s], words[o][s], cb, pipeline);
          },
          options.threads);
      parallel_for(
          order.size(),
          [&](std::size_t idx) {
            const std::size_t c = order[idx];
            const Job& j = jobs[c];
            const int s = wrap_view(view_deg(j.origin) / kAloiStepDegrees);
            const int q = wrap_view(s + protocol.delta_alphas[j.da] / kAloiStepDegrees);
            std::vector<GalleryScore> scores;
            for (std::size_t g = 0; g < n_obj; ++g) {
              scores.push_back({objs[g]->id, score_pair(models[j.object][q], models[g][s], pipeline)});
            }
            results[c] = rank(std::move(scores));
          },
          options.threads);
    }
  } else {
    // Max-max over window sets equals the maximum over view pairs, so the
    // per-view-pair maxima are computed once and shared by all cases.
    std::vector<std::vector<FeatureSet>> feats(n_obj, std::vector<FeatureSet>(kAloiViews));
    parallel_for(
        n_obj * kAloiViews,
        [&](std::size_t i) {
          const AloiObject& o = *objs[i / kAloiViews];
          const VideoSequence one(o.id, {o.views[i % kAloiViews]});
          feats[i / kAloiViews][i % kAloiViews] =
              method == Method::sift_cos ? sift_features(one, pipeline.grid) : appearance_features(one);
        },
        options.threads);
    const int win = protocol.delta_phi / kAloiStepDegrees;
    auto key = [&](std::size_t qo, int qv, std::size_t go, int gv) {
      return ((static_cast<std::uint64_t>(qo) * kAloiViews + qv) * n_obj + go) * kAloiViews + gv;
    };
    std::vector<std::uint64_t> needed_keys;
    for (const Job& j : jobs) {
      const int s = wrap_view(view_deg(j.origin) / kAloiStepDegrees);
      const int q = wrap_view(s + protocol.delta_alphas[j.da] / kAloiStepDegrees);
      for (std::size_t g = 0; g < n_obj; ++g)
        for (int i = 0; i < win; ++i)
          for (int m = 0; m < win; ++m) needed_keys.push_back(key(j.object, wrap_view(q + i), g, wrap_view(s + m)));
    }
    std::sort(needed_keys.begin(), needed_keys.end());
    needed_keys.erase(std::unique(needed_keys.begin(), needed_keys.end()), needed_keys.end());
    std::vector<double> pair_max(needed_keys.size());
    const double none = -std::numeric_limits<double>::infinity();
    parallel_for(
        needed_keys.size(),
        [&](std::size_t i) {
          std::uint64_t k = needed_keys[i];
          const int gv = static_cast<int>(k % kAloiViews);
          k /= kAloiViews;
          const std::size_t go = k % n_obj;
          k /= n_obj;
          const int qv = static_cast<int>(k % kAloiViews);
          const std::size_t qo = k / kAloiViews;
          const FeatureSet& a = feats[qo][qv];
          const FeatureSet& b = feats[go][gv];
          pair_max[i] = (a.empty() || b.empty()) ? none : maxmax_cosine(a, b);
        },
        options.threads);
    auto lookup = [&](std::uint64_t k) {
      return pair_max[static_cast<std::size_t>(std::lower_bound(needed_keys.begin(), needed_keys.end(), k) -
                                               needed_keys.begin())];
    };
    parallel_for(
        order.size(),
        [&](std::size_t idx) {
          const std::size_t c = order[idx];
          const Job& j = jobs[c];
          const int s = wrap_view(view_deg(j.origin) / kAloiStepDegrees);
          const int q = wrap_view(s + protocol.delta_alphas[j.da] / kAloiStepDegrees);
          std::vector<GalleryScore> scores;
          for (std::size_t g = 0; g < n_obj; ++g) {
            double best = none;
            for (int i = 0; i < win; ++i)
              for (int m = 0; m < win; ++m)
                best = std::max(best, lookup(key(j.object, wrap_view(q + i), g, wrap_view(s + m))));
            scores.push_back({objs[g]->id, std::isfinite(best) ? best : -1.0});
          }
          results[c] = rank(std::move(scores));
        },
        options.threads);
  }

  EvalReport report;
  report.method = method;
  report.delta_alphas = protocol.delta_alphas;
  report.rank1.assign(n_da, 0.0);
  report.samples.assign(n_da, 0);
  for (std::size_t c = 0; c < jobs.size(); ++c) {
    const Job& j = jobs[c];
    EvalCase ec;
    ec.object = objs[j.object]->id;
    ec.alpha = origins[j.origin];
    ec.delta_alpha = protocol.delta_alphas[j.da];
    ec.top = results[c].ranking.front();
    ec.correct = ec.top == ec.object;
    ec.separation = results[c].separation;
    report.rank1[j.da] += ec.correct ? 1.0 : 0.0;
    ++report.samples[j.da];
    report.cases.push_back(std::move(ec));
  }
  for (std::size_t d = 0; d < n_da; ++d) {
    if (report.samples[d] > 0) report.rank1[d] /= static_cast<double>(report.samples[d]);
  }
  report.seconds = elapsed_since(t0);
  return report;
}

EvalReport evaluate_aloi(const fs::path& root, const AloiProtocolConfig& protocol, Method method,
                         const PipelineConfig& pipeline, const EvalOptions& options) {
  const auto objects = load_aloi(root, protocol.objects);
  AloiProtocolConfig p = protocol;
  p.objects.clear();
  return evaluate_aloi(objects, p, method, pipeline, options);
}

void write_cases_csv(const fs::path& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "method,delta_alpha,alpha,object,top,correct,separation\n";
  out.precision(10);
  for (const auto& c : report.cases) {
    out << method_name(report.method) << ',' << c.delta_alpha << ',' << c.alpha << ',' << c.object << ','
        << c.top << ',' << (c.correct ? 1 : 0) << ',';
    if (c.separation) out << *c.separation;
    out << '\n';
  }
}

void write_curve_csv(const fs::path& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "method,delta_alpha,rank1,samples\n";
  out.precision(10);
  for (std::size_t d = 0; d < report.delta_alphas.size(); ++d) {
    out << method_name(report.method) << ',' << report.delta_alphas[d] << ',' << report.rank1[d] << ','
        << report.samples[d] << '\n';
  }
}

std::string summarize(const EvalReport& report) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(3);
  s << "method " << method_name(report.method) << ", " << report.cases.size() << " cases, " << report.seconds
    << " s\n";
  for (std::size_t d = 0; d < report.delta_alphas.size(); ++d) {
    s << "  delta_alpha " << report.delta_alphas[d] << ": rank-1 " << report.rank1[d] << " (" << report.samples[d]
      << " queries)\n";
  }
  return s.str();
}

SynthReport evaluate_synthetic(std::span<const SynthSequence> data, const PipelineConfig& pipeline,
                               const SynthEvalOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::size_t> gallery_idx;
  std::vector<std::size_t> query_idx;
  std::map<std::string, std::size_t> gallery_of;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!gallery_of.contains(data[i].object_id)) {
      gallery_of[data[i].object_id] = i;
      gallery_idx.push_back(i);
    } else {
      query_idx.push_back(i);
    }
  }
  if (gallery_idx.size() < 2) throw InvalidArgument("the benchmark needs at least two objects");
  if (query_idx.empty()) throw InvalidArgument("the benchmark needs at least one query sequence");

  std::vector<PreparedSequence> prepared(data.size());
  parallel_for(
      data.size(), [&](std::size_t i) { prepared[i] = prepare_sequence(data[i].sequence, pipeline); },
      options.threads);
  std::vector<const PreparedSequence*> pool;
  for (std::size_t g : gallery_idx) pool.push_back(&prepared[g]);
  const Codebook cb = train_global_codebook(pool, pipeline);

  std::vector<GalleryModel> models(data.size());
  parallel_for(
      data.size(),
      [&](std::size_t i) {
        models[i] = train_model(data[i].object_id, prepared[i], quantize_sequence(prepared[i], cb), cb, pipeline);
      },
      options.threads);

  std::vector<FeatureSet> sift(options.baselines ? data.size() : 0);
  std::vector<FeatureSet> app(options.baselines ? data.size() : 0);
  if (options.baselines) {
    parallel_for(
        data.size(),
        [&](std::size_t i) {
          sift[i] = sift_features(data[i].sequence, pipeline.grid);
          app[i] = appearance_features(data[i].sequence);
        },
        options.threads);
  }

  SynthReport report;
  report.queries.resize(query_idx.size());
  parallel_for(
      query_idx.size(),
      [&](std::size_t qi) {
        const std::size_t q = query_idx[qi];
        const SynthSequence& query = data[q];
        SynthQueryResult r;
        r.object = query.object_id;
        r.sequence = query.sequence_id;
        std::vector<GalleryScore> scores;
        std::vector<GalleryScore> sift_scores;
        std::vector<GalleryScore> app_scores;
        for (std::size_t g : gallery_idx) {
          ScoreDetail d = score_detailed(models[q].words, models[g].table, pipeline.scoring);
          double sim = d.similarity;
          if (pipeline.symmetric) sim = 0.5 * (sim + score(models[g].words, models[q], pipeline.scoring));
          scores.push_back({data[g].object_id, sim});
          if (options.baselines) {
            sift_scores.push_back({data[g].object_id, maxmax_cosine(sift[q], sift[g])});
            app_scores.push_back({data[g].object_id, maxmax_cosine(app[q], app[g])});
          }
        }
        r.dtt = rank(scores);
        const std::size_t top = gallery_of.at(r.dtt.ranking.front());
        const ScoreDetail best = score_detailed(models[q].words, models[top].table, pipeline.scoring);
        if (options.baselines) {
          r.sift_cos = rank(std::move(sift_scores));
          r.app_cos = rank(std::move(app_scores));
        }
        const int w = query.sequence.width();
        const int h = query.sequence.height();
        const auto fg = rasterize_foreground(best.tracks, best.graph.labels, w, h, pipeline.grid);
        const auto& factors = prepared[q].normalized.scale_factors;
        r.scale_factors = factors;
        for (std::size_t n = 0; n < fg.size() && n < query.ground_truth.size(); ++n) {
          const Mask original = rescale_mask(fg[n], 1.0 / factors[n]);
          r.frame_iou.push_back(mask_iou(original, query.ground_truth[n]));
        }
        report.queries[qi] = std::move(r);
      },
      options.threads);

  std::vector<double> dtt_sep, sift_sep, app_sep, ious;
  double dtt_ok = 0, sift_ok = 0, app_ok = 0;
  for (const auto& r : report.queries) {
    if (r.dtt.top_is(r.object)) {
      ++dtt_ok;
      if (r.dtt.separation) dtt_sep.push_back(*r.dtt.separation);
    }
    if (r.sift_cos && r.sift_cos->top_is(r.object)) {
      ++sift_ok;
      if (r.sift_cos->separation) sift_sep.push_back(*r.sift_cos->separation);
    }
    if (r.app_cos && r.app_cos->top_is(r.object)) {
      ++app_ok;
      if (r.app_cos->separation) app_sep.push_back(*r.app_cos->separation);
    }
    ious.insert(ious.end(), r.frame_iou.begin(), r.frame_iou.end());
  }
  const double nq = static_cast<double>(report.queries.size());
  report.dtt_rank1 = dtt_ok / nq;
  report.sift_rank1 = options.baselines ? sift_ok / nq : std::numeric_limits<double>::quiet_NaN();
  report.app_rank1 = options.baselines ? app_ok / nq : std::numeric_limits<double>::quiet_NaN();
  report.dtt_separation = mean_or_nan(dtt_sep);
  report.sift_separation = mean_or_nan(sift_sep);
  report.app_separation = mean_or_nan(app_sep);
  report.mean_iou = mean_or_nan(ious);
  report.seconds = elapsed_since(t0);
  return report;
}

void write_synth_csv(const fs::path& path, const SynthReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "query,object,method,rank,gallery,similarity\n";
  out.precision(10);
  auto emit = [&](const SynthQueryResult& r, const std::string& method, const MatchResult& m) {
    for (std::size_t i = 0; i < m.ranking.size(); ++i) {
      out << r.object << '/' << r.sequence << ',' << r.object << ',' << method << ',' << i + 1 << ','
          << m.ranking[i] << ',' << m.similarities[i] << '\n';
    }
  };
  for (const auto& r : report.queries) {
    emit(r, "dtt", r.dtt);
    if (r.sift_cos) emit(r, "sift-cos", *r.sift_cos);
    if (r.app_cos) emit(r, "app-cos", *r.app_cos);
  }
}

std::string summarize(const SynthReport& report) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(3);
  s << report.queries.size() << " queries, " << report.seconds << " s\n";
  s << "  dtt:      rank-1 " << report.dtt_rank1 << ", mean separation " << report.dtt_separation << '\n';
  if (!std::isnan(report.sift_rank1)) {
    s << "  sift-cos: rank-1 " << report.sift_rank1 << ", mean separation " << report.sift_separation << '\n';
    s << "  app-cos:  rank-1 " << report.app_rank1 << ", mean separation " << report.app_separation << '\n';
  }
  s << "  mean foreground IoU " << report.mean_iou << '\n';
  return s.str();
}

}  // namespace dtt
