#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rim/baselines/mitigation.hpp"
#include "rim/io/rimd.hpp"
#include "rim/nn/gru.hpp"
#include "rim/spectral/spectrum.hpp"

namespace rim::spectral {

enum class Method { kNone, kTdt, kEnvelope, kProposed };

// Flag/file identifier of a method.
std::string method_id(Method method);
// Human-readable label used in reports. The envelope method is a
// reconstruction from its one-line description, and is flagged as such.
std::string method_label(Method method);
// Throws UsageError on unknown names.
Method method_from_id(const std::string& id);

struct EvalRow {
  std::uint64_t scene_seed = 0;
  std::string method;
  double srinr_db = 0.0;
  std::vector<double> detected_ranges_m;
};

struct EvalReport {
  std::uint64_t scenario_count = 0;
  std::vector<std::pair<std::string, double>> aggregate;  // label -> mean SRINR
  std::vector<EvalRow> per_scenario;
};

struct EvalOptions {
  baseline::MitigationConfig mitigation;
  WindowKind window = WindowKind::kHann;
  int max_peaks = 4;
};

// Optionally captures the mitigated spectrum of every (frame, method) pair
// for CSV export.
struct SpectrumCapture {
  std::vector<std::pair<std::string, RangeSpectrum>> spectra;  // "frame_xxxx_method"
};

// Applies every requested method to every frame, rescales to unit energy,
// and scores SRINR against the frame's true targets. The model is required
// exactly when the proposed method is requested.
EvalReport evaluate_methods(const io::Dataset& dataset, const std::vector<Method>& methods,
                            const nn::GruNetwork* model, const EvalOptions& options = {},
                            SpectrumCapture* capture = nullptr);

}  // namespace rim::spectral
