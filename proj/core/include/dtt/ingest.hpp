#pragma once

#include <filesystem>
#include <limits>

#include "dtt/image.hpp"

namespace dtt {

// Sentinel returned by frame_distance when the reference frame is black and
// the other frame is not.
inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

// Loads every PNG/PGM file of a directory in lexicographic filename order.
// Subdirectories and other files are ignored. The sequence id is the
// directory name.
VideoSequence load_sequence(const std::filesystem::path& dir,
                            SequenceRole role = SequenceRole::gallery);

// Image files of a directory in the order load_sequence reads them.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

// Normalized image-space distance ||a - b|| / ||a||. Asymmetric: the norm of
// the first argument is the reference.
double frame_distance(const Frame& a, const Frame& b);

// Writes frames as frame_%04d.png into dir (created if missing).
void save_sequence(const std::filesystem::path& dir, const VideoSequence& seq);

}  // namespace dtt
