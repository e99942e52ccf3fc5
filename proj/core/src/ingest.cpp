#include "dtt/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dtt/error.hpp"
#include "dtt/image_io.hpp"

namespace dtt {

namespace fs = std::filesystem;

std::vector<fs::path> list_frame_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IngestError(IngestErrc::missing_directory, "no such directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

VideoSequence load_sequence(const fs::path& dir, SequenceRole role) {
  const auto files = list_frame_files(dir);
  if (files.empty()) throw IngestError(IngestErrc::no_frames, "no frames in " + dir.string());
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) {
    Frame frame = read_image(f);
    if (!frames.empty() &&
        (frame.width() != frames.front().width() || frame.height() != frames.front().height())) {
      throw IngestError(IngestErrc::mixed_dimensions,
                        "frame " + f.filename().string() + " differs in size from " +
                            files.front().filename().string());
    }
    frames.push_back(std::move(frame));
  }
  auto name = fs::path(dir).lexically_normal().filename().string();
  if (name.empty()) name = fs::path(dir).lexically_normal().parent_path().filename().string();
  return VideoSequence(std::move(name), std::move(frames), role);
}

double frame_distance(const Frame& a, const Frame& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatch("frame_distance: frames differ in size");
  }
  double diff = 0.0;
  double ref = 0.0;
  const auto la = a.luma();
  const auto lb = b.luma();
  for (std::size_t i = 0; i < la.size(); ++i) {
    const double d = static_cast<double>(la[i]) - lb[i];
    diff += d * d;
    ref += static_cast<double>(la[i]) * la[i];
  }
  if (ref == 0.0) return diff == 0.0 ? 0.0 : kInfiniteDistance;
  return std::sqrt(diff) / std::sqrt(ref);
}

void save_sequence(const fs::path& dir, const VideoSequence& seq) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.png", i);
    write_png(dir / name, seq[i]);
  }
}

}  // namespace dtt
