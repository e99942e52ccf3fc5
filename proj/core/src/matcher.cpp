#include "dtt/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dtt/binary_io.hpp"
#include "dtt/error.hpp"

namespace dtt {

ScoreDetail score_detailed(std::span<const WordGrid> query, const TransitionTable& table,
                           const ScoreOptions& options) {
  for (const auto& g : query) {
    if (g.k != table.k()) throw DimensionMismatch("query vocabulary differs from the table");
  }
  ScoreDetail d;
  d.tracks = infer_tracks(query, table);
  d.graph = segment(build_graph(d.tracks, options.graph));
  d.energy = d.graph.energy();
  d.foreground = d.graph.foreground_count();
  double sum = 0.0;
  if (d.foreground > 0) {
    for (std::size_t i = 0; i < d.tracks.size(); ++i) {
      if (d.graph.labels[i] == Label::foreground) sum += d.tracks[i].mean_log;
    }
    d.similarity = std::exp(sum / static_cast<double>(d.foreground));
  } else {
    for (const auto& t : d.tracks) sum += t.mean_log;
    d.similarity =
        std::exp(sum / static_cast<double>(d.tracks.size())) * options.empty_foreground_penalty;
  }
  return d;
}

double score(std::span<const WordGrid> query, const GalleryModel& model, const ScoreOptions& options) {
  if (model.codebook_k != 0 && model.codebook_k != model.table.k()) {
    throw FormatError("model table and codebook disagree on k");
  }
  return score_detailed(query, model.table, options).similarity;
}

MatchResult rank(std::vector<GalleryScore> scores) {
  if (scores.empty()) throw InvalidArgument("cannot rank against an empty gallery");
  std::stable_sort(scores.begin(), scores.end(), [](const GalleryScore& a, const GalleryScore& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.id < b.id;
  });
  MatchResult r;
  for (auto& s : scores) {
    r.ranking.push_back(s.id);
    r.similarities.push_back(s.similarity);
  }
  if (r.similarities.size() >= 2 && r.similarities[1] > 0.0) {
    r.separation = r.similarities[0] / r.similarities[1];
  }
  return r;
}

MatchResult rank(std::span<const WordGrid> query, std::span<const GalleryModel> models,
                 const ScoreOptions& options) {
  std::vector<GalleryScore> scores;
  scores.reserve(models.size());
  for (const auto& m : models) scores.push_back({m.object_id, score(query, m, options)});
  return rank(std::move(scores));
}

namespace {
constexpr char kMetaMagic[5] = "META";
constexpr char kWordsMagic[5] = "WGRS";
constexpr std::uint16_t kMetaVersion = 1;
}  // namespace

void save_model(const std::filesystem::path& path, const GalleryModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  model.table.write(out);
  binio::put_magic(out, kMetaMagic);
  binio::put<std::uint16_t>(out, kMetaVersion);
  binio::put_string(out, model.object_id);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.codebook_k));
  binio::put<std::uint64_t>(out, model.codebook_fingerprint);
  binio::put<std::uint32_t>(out, model.frame_count);
  binio::put_string(out, model.training_date);
  binio::put_magic(out, kWordsMagic);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.words.size()));
  if (!model.words.empty()) {
    const WordGrid& g0 = model.words.front();
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(g0.grid_w));
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(g0.grid_h));
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(g0.patch_size));
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(g0.stride));
    for (const auto& g : model.words) {
      if (g.grid_w != g0.grid_w || g.grid_h != g0.grid_h) throw DimensionMismatch("word grids differ");
      for (auto w : g.words) binio::put<std::uint16_t>(out, static_cast<std::uint16_t>(w));
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

GalleryModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  GalleryModel m;
  m.table = TransitionTable::read(in);
  binio::expect_magic(in, kMetaMagic);
  if (binio::get<std::uint16_t>(in) != kMetaVersion) throw FormatError("unsupported META version");
  m.object_id = binio::get_string(in);
  m.codebook_k = static_cast<int>(binio::get<std::uint32_t>(in));
  m.codebook_fingerprint = binio::get<std::uint64_t>(in);
  m.frame_count = binio::get<std::uint32_t>(in);
  m.training_date = binio::get_string(in);
  if (m.codebook_k != m.table.k()) throw FormatError("model table and codebook disagree on k");
  binio::expect_magic(in, kWordsMagic);
  const auto frames = binio::get<std::uint32_t>(in);
  if (frames > 100000) throw FormatError("implausible frame count");
  if (frames > 0) {
    WordGrid proto;
    proto.grid_w = static_cast<int>(binio::get<std::uint32_t>(in));
    proto.grid_h = static_cast<int>(binio::get<std::uint32_t>(in));
    proto.patch_size = static_cast<int>(binio::get<std::uint32_t>(in));
    proto.stride = static_cast<int>(binio::get<std::uint32_t>(in));
    proto.k = m.table.k();
    if (proto.grid_w <= 0 || proto.grid_h <= 0 || proto.stride <= 0 ||
        static_cast<long long>(proto.grid_w) * proto.grid_h > (1LL << 26)) {
      throw FormatError("implausible word grid size");
    }
    for (int j = 0; j < proto.grid_h; ++j) {
      for (int i = 0; i < proto.grid_w; ++i) proto.loci.push_back({i * proto.stride, j * proto.stride});
    }
    for (std::uint32_t f = 0; f < frames; ++f) {
      WordGrid g = proto;
      g.words.resize(static_cast<std::size_t>(g.grid_w) * g.grid_h);
      for (auto& w : g.words) {
        w = binio::get<std::uint16_t>(in);
        if (w >= m.table.k()) throw FormatError("stored word outside vocabulary");
      }
      m.words.push_back(std::move(g));
    }
  }
  return m;
}

}  // namespace dtt
