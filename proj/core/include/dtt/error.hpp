#pragma once

#include <stdexcept>
#include <string>

namespace dtt {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two inputs that must share a shape (frames, flow fields, descriptor
// dimensions, word-grid dimensions) do not.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A serialized model, grid or codebook file is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

enum class IngestErrc {
  missing_directory,
  no_frames,
  mixed_dimensions,
  undecodable,
};

class IngestError : public Error {
 public:
  IngestError(IngestErrc code, const std::string& what) : Error(what), code_(code) {}
  IngestErrc code() const noexcept { return code_; }

 private:
  IngestErrc code_;
};

}  // namespace dtt
