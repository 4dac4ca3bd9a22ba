#include "rim/sim/dataset.hpp"

#include <chrono>
#include <stdexcept>

#include "rim/errors.hpp"
#include "rim/rng.hpp"
#include "rim/sim/synth.hpp"

namespace rim::sim {

namespace {
constexpr std::uint64_t kChirpStream = 0x63686972ULL;
constexpr int kMaxResamples = 16;
}  // namespace

DatasetSummary generate_dataset(std::uint64_t count, std::uint64_t base_seed,
                                const SamplerConfig& config, FrameSink& sink) {
  if (count == 0) {
    throw std::invalid_argument("generate_dataset: count must be at least 1");
  }
  config.validate();

  const auto start = std::chrono::steady_clock::now();
  DatasetSummary summary;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t frame_seed = mix_seed(base_seed, i);
    for (int attempt = 0;; ++attempt) {
      const RadarScene scene = sample_scene(frame_seed, config);
      Rng chirp_rng(mix_seed(frame_seed, kChirpStream));
      const int chirp =
          static_cast<int>(chirp_rng.below(static_cast<std::uint64_t>(scene.victim.num_chirps)));
      try {
        const BeatFrame frame = synthesize_frame(scene, chirp);
        sink.on_frame(frame, scene);
        break;
      } catch (const NormalizeError&) {
        if (attempt >= kMaxResamples) {
          throw NormalizeError("generate_dataset: scene resampling exhausted");
        }
        ++summary.resampled;
        frame_seed = mix_seed(frame_seed, 0x72657472ULL + static_cast<std::uint64_t>(attempt));
      }
    }
    ++summary.frames;
  }
  summary.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

}  // namespace rim::sim
