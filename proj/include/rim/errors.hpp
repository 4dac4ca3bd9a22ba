#pragma once

#include <stdexcept>
#include <string>

namespace rim {

// Bad command line or unusable combination of flags. CLI exit code 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent file content (dataset, checkpoint, config, CSV).
// CLI exit code 2.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Checkpoint container readable but written by an incompatible architecture
// or container revision.
class CheckpointVersionError : public FormatError {
 public:
  explicit CheckpointVersionError(const std::string& msg) : FormatError(msg) {}
};

// Checkpoint payload truncated or failing its checksum.
class CheckpointCorruptError : public FormatError {
 public:
  explicit CheckpointCorruptError(const std::string& msg) : FormatError(msg) {}
};

// Checkpoint tensor table does not describe a disjoint, in-bounds layout
// matching the declared architecture.
class CheckpointShapeError : public FormatError {
 public:
  explicit CheckpointShapeError(const std::string& msg) : FormatError(msg) {}
};

// Non-finite value reached the training loop. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A frame whose pre-normalization energy is zero cannot be scaled to unit
// energy; callers either reject the frame or resample the scene.
class NormalizeError : public std::runtime_error {
 public:
  explicit NormalizeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rim
