#pragma once

#include <string>

#include "rim/spectral/evaluate.hpp"
#include "rim/train/trainer.hpp"

namespace rim::io {

// Deterministic JSON document: fixed key order, %.17g floats, so identical
// evaluations serialize to identical bytes.
std::string eval_report_json(const spectral::EvalReport& report);
void write_eval_report(const std::string& path, const spectral::EvalReport& report);

// JSON lines: one record per batch, then one per epoch.
void write_train_log(const std::string& path, const train::TrainLog& log);

}  // namespace rim::io
