#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "rim/common.hpp"
#include "rim/sim/dataset.hpp"
#include "rim/sim/radar.hpp"

namespace rim::io {

// Binary dataset container: a fixed header, frame-major float64 payload
// (input then label per frame, little-endian), then one JSON metadata line
// per frame describing the scene that produced it.
struct DatasetHeader {
  std::uint32_t version = 1;
  std::uint32_t frame_count = 0;
  std::uint32_t frame_len = kFrameLen;
  double sample_rate_hz = 0.0;
  std::uint64_t base_seed = 0;
};

struct Dataset {
  DatasetHeader header;
  std::vector<sim::BeatFrame> frames;
  std::vector<sim::RadarScene> scenes;  // provenance, aligned with frames
};

// Streams frames straight to disk so dataset size is not bounded by memory.
class RimdFileSink : public sim::FrameSink {
 public:
  RimdFileSink(const std::string& path, std::uint32_t expected_frames, double sample_rate_hz,
               std::uint64_t base_seed);
  ~RimdFileSink() override;

  void on_frame(const sim::BeatFrame& frame, const sim::RadarScene& scene) override;
  void finalize();

 private:
  std::ofstream out_;
  std::string path_;
  std::uint32_t expected_ = 0;
  std::uint32_t written_ = 0;
  std::string metadata_;
  bool finalized_ = false;
};

// Collects frames in memory; used by tests and the evaluation pipeline.
class MemorySink : public sim::FrameSink {
 public:
  explicit MemorySink(double sample_rate_hz, std::uint64_t base_seed);
  void on_frame(const sim::BeatFrame& frame, const sim::RadarScene& scene) override;

  Dataset take() { return std::move(dataset_); }
  const Dataset& dataset() const { return dataset_; }

 private:
  Dataset dataset_;
};

std::string scene_metadata_line(const sim::BeatFrame& frame, const sim::RadarScene& scene);

// Loads and fully validates a dataset; throws FormatError with the offending
// offset or line on any inconsistency.
Dataset read_rimd(const std::string& path);

void write_rimd(const std::string& path, const Dataset& dataset);

}  // namespace rim::io
