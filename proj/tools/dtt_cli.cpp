#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dtt/codebook.hpp"
#include "dtt/densegrid.hpp"
#include "dtt/error.hpp"
#include "dtt/harness.hpp"
#include "dtt/image_io.hpp"
#include "dtt/ingest.hpp"
#include "dtt/matcher.hpp"
#include "dtt/pipeline.hpp"
#include "dtt/segcut.hpp"
#include "dtt/synth.hpp"

namespace fs = std::filesystem;
using namespace dtt;

namespace {

struct GlobalFlags {
  int k = kDefaultVocabularySize;
  int patch_size = 20;
  double stride_ratio = 0.1;
  double t_threshold = kDefaultSuccessionThreshold;
  double alpha_smoothing = 0.0;
  int delta_phi = 40;
  std::string method = "dtt";
  std::uint64_t seed = 1;
  bool seed_given = false;  // the generators keep their own default seeds otherwise
  bool no_scale_norm = false;
  bool symmetric = false;
  std::size_t max_samples = 60000;
  unsigned threads = 0;
};

PipelineConfig pipeline_from(const GlobalFlags& g) {
  PipelineConfig cfg;
  cfg.k = g.k;
  cfg.grid.patch_size = g.patch_size;
  cfg.grid.stride_ratio = g.stride_ratio;
  cfg.succession_threshold = g.t_threshold;
  cfg.alpha = g.alpha_smoothing;
  cfg.seed = g.seed;
  cfg.scale_norm = !g.no_scale_norm;
  cfg.symmetric = g.symmetric;
  cfg.kmeans.max_samples = g.max_samples;
  cfg.grid.validate();
  if (cfg.succession_threshold <= 0.0) throw InvalidArgument("--t-threshold must be positive");
  return cfg;
}

std::string format_double(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::string frame_name(const char* stem, std::size_t n, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu.%s", stem, n, ext);
  return buf;
}

std::vector<fs::path> grid_files(const fs::path& input) {
  if (!fs::is_directory(input)) return {input};
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(input)) {
    if (e.is_regular_file() && e.path().extension() == ".dgrd") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Learns the query's own model so that symmetric scoring can use it.
GalleryModel query_model(const PreparedSequence& prepared, const Codebook& cb, const PipelineConfig& cfg) {
  return train_model(prepared.id, prepared, quantize_sequence(prepared, cb), cb, cfg);
}

void run_extract(const GlobalFlags& g, const fs::path& sequence_dir, const fs::path& out_dir) {
  const PipelineConfig cfg = pipeline_from(g);
  const PreparedSequence prepared = prepare_sequence(load_sequence(sequence_dir), cfg);
  fs::create_directories(out_dir);
  std::ofstream scales(out_dir / "scale_factors.csv");
  scales << "frame,scale_factor\n";
  for (std::size_t n = 0; n < prepared.descriptors.size(); ++n) {
    save_descriptor_grid(out_dir / frame_name("grid", n, "dgrd"), prepared.descriptors[n]);
    write_mask_pgm(out_dir / frame_name("mask", n, "pgm"), prepared.normalized.masks[n]);
    scales << n << ',' << format_double(prepared.normalized.scale_factors[n]) << '\n';
  }
  std::cout << prepared.id << ": " << prepared.descriptors.size() << " frames, "
            << prepared.descriptors.front().size() << " descriptors per frame -> " << out_dir.string() << '\n';
}

void run_codebook(const GlobalFlags& g, const std::vector<fs::path>& inputs, const fs::path& out,
                  const std::optional<fs::path>& csv) {
  const PipelineConfig cfg = pipeline_from(g);
  std::vector<float> pool;
  int dim = 0;
  std::size_t files = 0;
  for (const fs::path& in : inputs) {
    for (const fs::path& f : grid_files(in)) {
      const DescriptorGrid grid = load_descriptor_grid(f);
      if (dim == 0) dim = grid.dim;
      if (grid.dim != dim) throw DimensionMismatch("descriptor grids of different dimensions: " + f.string());
      pool.insert(pool.end(), grid.data.begin(), grid.data.end());
      ++files;
    }
  }
  if (files == 0) throw InvalidArgument("no descriptor grids found");
  KMeansTrace trace;
  const Codebook cb = train_codebook(pool, dim, cfg.k, cfg.seed, cfg.kmeans, &trace);
  save_codebook(out, cb);
  if (csv) export_codebook_csv(*csv, cb);
  std::cout << "codebook k=" << cb.k << " from " << trace.samples << " descriptors (" << files << " grids), "
            << trace.iterations << " iterations, distortion "
            << format_double(trace.distortion.empty() ? 0.0 : trace.distortion.back()) << " -> " << out.string()
            << '\n';
}

void run_train(const GlobalFlags& g, const fs::path& sequence_dir, const fs::path& codebook_path,
               const fs::path& out, std::string object_id, const std::string& date) {
  PipelineConfig cfg = pipeline_from(g);
  cfg.training_date = date;
  const Codebook cb = load_codebook(codebook_path);
  cfg.k = cb.k;
  const PreparedSequence prepared = prepare_sequence(load_sequence(sequence_dir), cfg);
  if (object_id.empty()) object_id = prepared.id;
  GalleryModel model = query_model(prepared, cb, cfg);
  model.object_id = object_id;
  save_model(out, model);
  std::uint64_t transitions = 0;
  for (int j = 0; j < model.table.k(); ++j) transitions += model.table.row_total(j);
  std::cout << object_id << ": " << model.frame_count << " frames, " << transitions << " transitions -> "
            << out.string() << '\n';
}

void run_match(const GlobalFlags& g, const fs::path& query_dir, const fs::path& codebook_path,
               const std::vector<fs::path>& model_paths, const std::optional<fs::path>& csv) {
  PipelineConfig cfg = pipeline_from(g);
  const Codebook cb = load_codebook(codebook_path);
  cfg.k = cb.k;
  const PreparedSequence prepared = prepare_sequence(load_sequence(query_dir, SequenceRole::query), cfg);
  const GalleryModel query = query_model(prepared, cb, cfg);
  std::vector<GalleryScore> scores;
  for (const fs::path& p : model_paths) {
    const GalleryModel gallery = load_model(p);
    scores.push_back({gallery.object_id, score_pair(query, gallery, cfg)});
  }
  const MatchResult result = rank(std::move(scores));
  std::ostringstream table;
  table << "query,gallery,similarity,rank\n";
  for (std::size_t r = 0; r < result.ranking.size(); ++r) {
    table << prepared.id << ',' << result.ranking[r] << ',' << format_double(result.similarities[r], 9) << ','
          << r + 1 << '\n';
  }
  if (csv) {
    std::ofstream(*csv) << table.str();
  } else {
    std::cout << table.str();
  }
  std::cout << "query " << prepared.id << ": best " << result.ranking.front();
  if (result.separation) std::cout << ", separation " << format_double(*result.separation, 4);
  std::cout << '\n';
}

void run_segment(const GlobalFlags& g, const fs::path& query_dir, const fs::path& codebook_path,
                 const fs::path& model_path, const fs::path& out_dir) {
  PipelineConfig cfg = pipeline_from(g);
  const Codebook cb = load_codebook(codebook_path);
  cfg.k = cb.k;
  const GalleryModel model = load_model(model_path);
  if (model.codebook_fingerprint != cb.fingerprint()) {
    throw InvalidArgument("the model was not trained with this codebook");
  }
  const VideoSequence seq = load_sequence(query_dir, SequenceRole::query);
  const PreparedSequence prepared = prepare_sequence(seq, cfg);
  const ScoreDetail detail = score_detailed(quantize_sequence(prepared, cb), model.table, cfg.scoring);
  const auto masks = rasterize_foreground(detail.tracks, detail.graph.labels, seq.width(), seq.height(), cfg.grid);
  fs::create_directories(out_dir);
  for (std::size_t n = 0; n < masks.size(); ++n) {
    const Mask original = rescale_mask(masks[n], 1.0 / prepared.normalized.scale_factors[n]);
    write_mask_pgm(out_dir / frame_name("mask", n, "pgm"), original);
  }
  std::cout << "tracks " << detail.tracks.size() << ", foreground " << detail.foreground << ", energy "
            << format_double(detail.energy, 9) << ", similarity " << format_double(detail.similarity, 9) << '\n';
}

std::vector<int> parse_angles(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find(':');
    if (dash == std::string::npos) {
      out.push_back(std::stoi(item));
      continue;
    }
    // first:last or first:last:step
    std::vector<int> parts;
    std::stringstream range(item);
    std::string p;
    while (std::getline(range, p, ':')) parts.push_back(std::stoi(p));
    const int step = parts.size() > 2 ? parts[2] : kAloiStepDegrees;
    if (step <= 0) throw InvalidArgument("range step must be positive");
    for (int a = parts[0]; a <= parts[1]; a += step) out.push_back(a);
  }
  return out;
}

std::vector<std::string> aloi_subset(const fs::path& root, const std::vector<std::string>& listed, int count) {
  if (!listed.empty()) return listed;
  std::vector<std::string> all;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) all.push_back(e.path().filename().string());
  }
  std::sort(all.begin(), all.end());
  if (count > 0 && static_cast<std::size_t>(count) < all.size()) all.resize(static_cast<std::size_t>(count));
  return all;
}

void run_evaluate_aloi(const GlobalFlags& g, const fs::path& root, const std::vector<std::string>& objects,
                       int object_count, const std::string& delta_alphas, const std::string& origins,
                       bool scale_norm, const std::optional<fs::path>& csv_prefix) {
  PipelineConfig cfg = pipeline_from(g);
  cfg.scale_norm = scale_norm && !g.no_scale_norm;
  AloiProtocolConfig protocol;
  protocol.delta_phi = g.delta_phi;
  if (!delta_alphas.empty()) protocol.delta_alphas = parse_angles(delta_alphas);
  if (!origins.empty()) protocol.origins = parse_angles(origins);
  protocol.objects = aloi_subset(root, objects, object_count);
  protocol.validate();
  EvalOptions options;
  options.threads = g.threads;
  const EvalReport report = evaluate_aloi(root, protocol, parse_method(g.method), cfg, options);
  std::cout << summarize(report);
  if (csv_prefix) {
    write_curve_csv(fs::path(csv_prefix->string() + "_curve.csv"), report);
    write_cases_csv(fs::path(csv_prefix->string() + "_cases.csv"), report);
  }
}

void run_synth(const GlobalFlags& g, const fs::path& root, int objects, int sequences, int frames,
               bool turntable) {
  if (objects < 2) throw InvalidArgument("--objects must be at least 2");
  if (turntable) {
    TurntableConfig cfg;
    cfg.n_objects = objects;
    if (g.seed_given) cfg.seed = g.seed;
    synth_turntable_generate(cfg, root);
    std::cout << "turntable: " << objects << " objects x " << cfg.views << " views -> " << root.string() << '\n';
    return;
  }
  SynthConfig cfg;
  cfg.n_objects = objects;
  cfg.n_sequences = sequences;
  cfg.frames = frames;
  if (g.seed_given) cfg.seed = g.seed;
  synth_generate(cfg, root);
  std::cout << "synthetic: " << objects << " objects x " << sequences << " sequences x " << frames
            << " frames -> " << root.string() << '\n';
}

void run_evaluate_synth(const GlobalFlags& g, std::uint64_t data_seed, bool baselines,
                        const std::optional<fs::path>& csv) {
  const PipelineConfig cfg = pipeline_from(g);
  SynthConfig sc;
  sc.seed = data_seed;
  SynthEvalOptions options;
  options.baselines = baselines;
  options.threads = g.threads;
  const SynthReport report = evaluate_synthetic(synth_sequences(sc), cfg, options);
  std::cout << summarize(report);
  if (csv) write_synth_csv(*csv, report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video object retrieval with descriptor transition tables"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--k", g.k, "Vocabulary size")->capture_default_str()->check(CLI::Range(2, 65535));
  app.add_option("--patch-size", g.patch_size, "Patch side in pixels")->capture_default_str();
  app.add_option("--stride-ratio", g.stride_ratio, "Grid stride as a fraction of the patch size")
      ->capture_default_str();
  app.add_option("--t-threshold", g.t_threshold, "Normalised frame distance for possibly successive frames")
      ->capture_default_str();
  app.add_option("--alpha-smoothing", g.alpha_smoothing, "Additive smoothing of the table (0 selects 1/k)")
      ->capture_default_str();
  app.add_option("--delta-phi", g.delta_phi, "Viewpoint window width in degrees")->capture_default_str();
  app.add_option("--method", g.method, "Retrieval method")
      ->check(CLI::IsMember({"dtt", "sift-cos", "app-cos"}))
      ->capture_default_str();
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed for k-means and the generators")->capture_default_str();
  app.add_flag("--no-scale-norm", g.no_scale_norm, "Skip motion-parallax scale normalisation");
  app.add_flag("--symmetric", g.symmetric, "Average both scoring directions");
  app.add_option("--max-samples", g.max_samples, "k-means training subsample (0 keeps all)")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)");

  auto* extract = app.add_subcommand("extract", "Scale-normalise a sequence and write descriptor grids")->fallthrough();
  fs::path ex_seq, ex_out;
  extract->add_option("sequence", ex_seq, "Frame directory")->required()->check(CLI::ExistingDirectory);
  extract->add_option("-o,--out", ex_out, "Output directory")->required();

  auto* codebook = app.add_subcommand("codebook", "Train a codebook from descriptor grids")->fallthrough();
  std::vector<fs::path> cb_inputs;
  fs::path cb_out;
  std::optional<fs::path> cb_csv;
  codebook->add_option("grids", cb_inputs, "Grid files, or directories searched recursively for .dgrd files")->required();
  codebook->add_option("-o,--out", cb_out, "Codebook file")->required();
  codebook->add_option("--csv", cb_csv, "Also export the centroids as CSV");

  auto* train = app.add_subcommand("train", "Learn a gallery model from one sequence")->fallthrough();
  fs::path tr_seq, tr_cb, tr_out;
  std::string tr_id, tr_date;
  train->add_option("sequence", tr_seq, "Frame directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("-c,--codebook", tr_cb, "Codebook file")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--out", tr_out, "Model file")->required();
  train->add_option("--object-id", tr_id, "Object label (default: directory name)");
  train->add_option("--date", tr_date, "Training date stored in the model");

  auto* match = app.add_subcommand("match", "Rank gallery models for a query sequence")->fallthrough();
  fs::path ma_seq, ma_cb;
  std::vector<fs::path> ma_models;
  std::optional<fs::path> ma_csv;
  match->add_option("sequence", ma_seq, "Query frame directory")->required()->check(CLI::ExistingDirectory);
  match->add_option("-c,--codebook", ma_cb, "Codebook file")->required()->check(CLI::ExistingFile);
  match->add_option("-m,--models", ma_models, "Gallery model files")->required()->check(CLI::ExistingFile);
  match->add_option("--csv", ma_csv, "Write the ranking CSV here instead of stdout");

  auto* segment = app.add_subcommand("segment", "Write foreground masks of a query under one model")->fallthrough();
  fs::path se_seq, se_cb, se_model, se_out;
  segment->add_option("sequence", se_seq, "Query frame directory")->required()->check(CLI::ExistingDirectory);
  segment->add_option("-c,--codebook", se_cb, "Codebook file")->required()->check(CLI::ExistingFile);
  segment->add_option("-m,--model", se_model, "Gallery model file")->required()->check(CLI::ExistingFile);
  segment->add_option("-o,--out", se_out, "Mask directory")->required();

  auto* aloi = app.add_subcommand("evaluate-aloi", "Sliding-window viewpoint protocol on ALOI")->fallthrough();
  fs::path al_root;
  std::vector<std::string> al_objects;
  int al_count = 0;
  std::string al_delta_alphas, al_origins;
  bool al_scale_norm = false;
  std::optional<fs::path> al_csv;
  aloi->add_option("root", al_root, "ALOI root with one directory per object")->required()->check(
      CLI::ExistingDirectory);
  aloi->add_option("--objects", al_objects, "Object directory names");
  aloi->add_option("--object-count", al_count, "Use the first N objects in name order");
  aloi->add_option("--delta-alpha", al_delta_alphas, "Angles, e.g. 0:70 or 0,40,70")->capture_default_str();
  aloi->add_option("--origins", al_origins, "Origins, e.g. 0:355:5 (default: all 72)");
  aloi->add_flag("--scale-norm", al_scale_norm, "Enable scale normalisation (off by default for turntable data)");
  aloi->add_option("--csv", al_csv, "CSV prefix; writes <prefix>_curve.csv and <prefix>_cases.csv");

  auto* synth = app.add_subcommand("synth", "Generate the synthetic datasets")->fallthrough();
  fs::path sy_root;
  int sy_objects = 10, sy_sequences = 2, sy_frames = 10;
  bool sy_turntable = false;
  synth->add_option("root", sy_root, "Output directory")->required();
  synth->add_option("--objects", sy_objects, "Number of objects")->capture_default_str();
  synth->add_option("--sequences", sy_sequences, "Sequences per object")->capture_default_str();
  synth->add_option("--frames", sy_frames, "Frames per sequence")->capture_default_str();
  synth->add_flag("--turntable", sy_turntable, "Write 72-view turntable objects in the ALOI layout instead");

  auto* esynth = app.add_subcommand("evaluate-synth", "Run the synthetic clutter benchmark")->fallthrough();
  std::uint64_t es_seed = SynthConfig{}.seed;
  bool es_no_baselines = false;
  std::optional<fs::path> es_csv;
  esynth->add_option("--data-seed", es_seed, "Generator seed")->capture_default_str();
  esynth->add_flag("--no-baselines", es_no_baselines, "Skip SIFT+COS and Appearance+COS");
  esynth->add_option("--csv", es_csv, "Per-query ranking CSV");

  CLI11_PARSE(app, argc, argv);
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*extract) run_extract(g, ex_seq, ex_out);
    if (*codebook) run_codebook(g, cb_inputs, cb_out, cb_csv);
    if (*train) run_train(g, tr_seq, tr_cb, tr_out, tr_id, tr_date);
    if (*match) run_match(g, ma_seq, ma_cb, ma_models, ma_csv);
    if (*segment) run_segment(g, se_seq, se_cb, se_model, se_out);
    if (*aloi) run_evaluate_aloi(g, al_root, al_objects, al_count, al_delta_alphas, al_origins, al_scale_norm, al_csv);
    if (*synth) run_synth(g, sy_root, sy_objects, sy_sequences, sy_frames, sy_turntable);
    if (*esynth) run_evaluate_synth(g, es_seed, !es_no_baselines, es_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
