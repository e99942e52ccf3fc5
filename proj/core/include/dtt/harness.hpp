#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtt/matcher.hpp"
#include "dtt/pipeline.hpp"
#include "dtt/synth.hpp"

namespace dtt {

inline constexpr int kAloiViews = 72;
inline constexpr int kAloiStepDegrees = 5;

// Sliding-window turntable protocol. Empty `objects` means every object in
// the dataset; empty `origins` means all 72 origins 0, 5, ..., 355.
struct AloiProtocolConfig {
  int delta_phi = 40;
  std::vector<int> delta_alphas{0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70};
  std::vector<std::string> objects;
  std::vector<int> origins;

  // Throws InvalidArgument unless every angle is a multiple of 5 and delta_phi >= 5.
  void validate() const;
};

struct ViewWindows {
  std::vector<int> train;
  std::vector<int> query;
};

// train = views in [alpha, alpha + delta_phi), query = views in
// [alpha + delta_alpha, alpha + delta_alpha + delta_phi), both modulo 360.
ViewWindows aloi_windows(int alpha, int delta_phi, int delta_alpha);

enum class Method { dtt, sift_cos, app_cos };

std::string method_name(Method m);
// Accepts "dtt", "sift-cos" and "app-cos". Throws InvalidArgument otherwise.
Method parse_method(const std::string& name);

struct AloiObject {
  std::string id;
  std::vector<Frame> views;  // 72 views, index v at v * 5 degrees
};

// Reads <root>/<object>/ directories. Files named <anything>_r<angle>.<ext>
// (the ALOI convention) are placed by angle; otherwise the 72 images are taken
// in lexicographic order. Throws IngestError when a directory does not hold
// exactly 72 views.
std::vector<AloiObject> load_aloi(const std::filesystem::path& root, std::span<const std::string> objects = {});

struct EvalCase {
  std::string object;
  int alpha = 0;
  int delta_alpha = 0;
  std::string top;
  bool correct = false;
  std::optional<double> separation;
};

struct EvalReport {
  Method method = Method::dtt;
  std::vector<int> delta_alphas;
  std::vector<double> rank1;           // aligned with delta_alphas
  std::vector<std::size_t> samples;    // aligned with delta_alphas
  std::vector<EvalCase> cases;         // sorted by (delta_alpha, alpha, object)
  double seconds = 0.0;
};

struct EvalOptions {
  unsigned threads = 0;  // 0 picks the hardware concurrency
  // When set, cases are processed in an order shuffled with this seed. The
  // report must not change.
  std::optional<std::uint64_t> shuffle_seed;
};

EvalReport evaluate_aloi(std::span<const AloiObject> objects, const AloiProtocolConfig& protocol, Method method,
                         const PipelineConfig& pipeline, const EvalOptions& options = {});
EvalReport evaluate_aloi(const std::filesystem::path& root, const AloiProtocolConfig& protocol, Method method,
                         const PipelineConfig& pipeline, const EvalOptions& options = {});

// Columns: method,delta_alpha,alpha,object,top,correct,separation
void write_cases_csv(const std::filesystem::path& path, const EvalReport& report);
// Columns: method,delta_alpha,rank1,samples
void write_curve_csv(const std::filesystem::path& path, const EvalReport& report);
std::string summarize(const EvalReport& report);

// Synthetic clutter benchmark: sequence 0 of each object is the gallery and
// every other sequence is a query.
struct SynthQueryResult {
  std::string object;
  std::string sequence;
  MatchResult dtt;
  std::optional<MatchResult> sift_cos;
  std::optional<MatchResult> app_cos;
  std::vector<double> frame_iou;  // top-ranked model's foreground vs ground truth
  std::vector<double> scale_factors;
};

struct SynthReport {
  std::vector<SynthQueryResult> queries;
  double dtt_rank1 = 0.0;
  double sift_rank1 = 0.0;
  double app_rank1 = 0.0;
  // Mean separation over correctly recognised queries; NaN when there are none.
  double dtt_separation = 0.0;
  double sift_separation = 0.0;
  double app_separation = 0.0;
  double mean_iou = 0.0;  // over all query frames
  double seconds = 0.0;
};

struct SynthEvalOptions {
  bool baselines = true;
  unsigned threads = 0;
};

SynthReport evaluate_synthetic(std::span<const SynthSequence> data, const PipelineConfig& pipeline,
                               const SynthEvalOptions& options = {});

// Columns: query,object,method,rank,gallery,similarity
void write_synth_csv(const std::filesystem::path& path, const SynthReport& report);
std::string summarize(const SynthReport& report);

}  // namespace dtt
