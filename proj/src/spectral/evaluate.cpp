#include "rim/spectral/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "rim/common.hpp"
#include "rim/errors.hpp"

namespace rim::spectral {

std::string method_id(Method method) {
  switch (method) {
    case Method::kNone: return "none";
    case Method::kTdt: return "tdt";
    case Method::kEnvelope: return "envelope";
    case Method::kProposed: return "proposed";
  }
  return "unknown";
}

std::string method_label(Method method) {
  if (method == Method::kEnvelope) return "envelope (reconstruction)";
  return method_id(method);
}

Method method_from_id(const std::string& id) {
  if (id == "none") return Method::kNone;
  if (id == "tdt") return Method::kTdt;
  if (id == "envelope") return Method::kEnvelope;
  if (id == "proposed") return Method::kProposed;
  throw UsageError("unknown method: " + id + " (expected none, tdt, envelope, proposed)");
}

namespace {

void renormalize(std::vector<double>& x) {
  double energy = 0.0;
  for (double v : x) energy += v * v;
  if (energy <= 0.0) return;
  const double inv = 1.0 / std::sqrt(energy);
  for (double& v : x) v *= inv;
}

}  // namespace

EvalReport evaluate_methods(const io::Dataset& dataset, const std::vector<Method>& methods,
                            const nn::GruNetwork* model, const EvalOptions& options,
                            SpectrumCapture* capture) {
  if (dataset.frames.empty()) {
    throw std::invalid_argument("evaluate_methods: empty dataset");
  }
  if (dataset.frames.size() != dataset.scenes.size()) {
    throw FormatError("evaluate_methods: dataset has no aligned scene metadata");
  }
  if (methods.empty()) {
    throw UsageError("evaluate_methods: no methods requested");
  }
  bool wants_model = false;
  for (Method m : methods) wants_model |= m == Method::kProposed;
  if (wants_model && model == nullptr) {
    throw UsageError("the proposed method needs a model checkpoint");
  }

  // Batched inference for the proposed method, chunked to bound memory.
  std::vector<std::vector<double>> model_outputs;
  if (wants_model) {
    model_outputs.resize(dataset.frames.size());
    constexpr std::size_t kChunk = 128;
    for (std::size_t begin = 0; begin < dataset.frames.size(); begin += kChunk) {
      const std::size_t end = std::min(dataset.frames.size(), begin + kChunk);
      Eigen::MatrixXd inputs(kFrameLen, static_cast<Eigen::Index>(end - begin));
      for (std::size_t i = begin; i < end; ++i) {
        for (int t = 0; t < kFrameLen; ++t) {
          inputs(t, static_cast<Eigen::Index>(i - begin)) =
              dataset.frames[i].input[static_cast<std::size_t>(t)];
        }
      }
      const Eigen::MatrixXd outputs =
          nn::forward_batch(*model, inputs, nn::RunMode::kInference);
      for (std::size_t i = begin; i < end; ++i) {
        std::vector<double> frame(static_cast<std::size_t>(kFrameLen));
        for (int t = 0; t < kFrameLen; ++t) {
          frame[static_cast<std::size_t>(t)] = outputs(t, static_cast<Eigen::Index>(i - begin));
        }
        model_outputs[i] = std::move(frame);
      }
    }
  }

  EvalReport report;
  report.scenario_count = dataset.frames.size();
  std::map<std::string, std::pair<double, std::uint64_t>> sums;  // label -> (sum, count)

  for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
    const sim::BeatFrame& frame = dataset.frames[i];
    const sim::RadarScene& scene = dataset.scenes[i];
    for (Method method : methods) {
      std::vector<double> mitigated;
      switch (method) {
        case Method::kNone:
          mitigated = baseline::passthrough(frame.input);
          break;
        case Method::kTdt:
          mitigated = baseline::tdt_mitigate(frame.input, options.mitigation);
          break;
        case Method::kEnvelope:
          mitigated = baseline::envelope_mitigate(frame.input, options.mitigation);
          break;
        case Method::kProposed:
          mitigated = model_outputs[i];
          break;
      }
      renormalize(mitigated);

      const RangeSpectrum spectrum = range_fft(mitigated, options.window,
                                               scene.victim.sample_rate_hz,
                                               scene.victim.slope());
      EvalRow row;
      row.scene_seed = scene.rng_seed;
      row.method = method_label(method);
      row.srinr_db = srinr_db(spectrum, scene.targets, scene.victim);
      for (const Peak& peak : detect_peaks(spectrum, options.max_peaks)) {
        row.detected_ranges_m.push_back(peak.range_m);
      }
      auto& agg = sums[row.method];
      agg.first += row.srinr_db;
      agg.second += 1;
      report.per_scenario.push_back(std::move(row));

      if (capture != nullptr) {
        char name[64];
        std::snprintf(name, sizeof(name), "frame_%04zu_%s", i, method_id(method).c_str());
        capture->spectra.emplace_back(name, spectrum);
      }
    }
  }

  // Aggregate entries follow the requested method order.
  for (Method method : methods) {
    const auto& agg = sums.at(method_label(method));
    report.aggregate.emplace_back(method_label(method),
                                  agg.first / static_cast<double>(agg.second));
  }
  return report;
}

}  // namespace rim::spectral
