#pragma once

#include <cstdint>

#include "rim/sim/radar.hpp"
#include "rim/sim/sampler.hpp"

namespace rim::sim {

struct DatasetSummary {
  std::uint64_t frames = 0;
  std::uint64_t resampled = 0;  // scenes redrawn after a degenerate frame
  double elapsed_s = 0.0;
};

// Receives frames in generation order together with their scene provenance.
class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual void on_frame(const BeatFrame& frame, const RadarScene& scene) = 0;
};

// Emits `count` frames, each one chirp (drawn uniformly from the 75-chirp
// frame) of an independently sampled scene. Fully deterministic in
// (count, base_seed, config). Throws std::invalid_argument for count == 0.
DatasetSummary generate_dataset(std::uint64_t count, std::uint64_t base_seed,
                                const SamplerConfig& config, FrameSink& sink);

}  // namespace rim::sim
