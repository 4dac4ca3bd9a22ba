#include "rim/io/report.hpp"

#include <fstream>

#include "rim/errors.hpp"
#include "rim/io/json_writer.hpp"

namespace rim::io {

std::string eval_report_json(const spectral::EvalReport& report) {
  JsonWriter w;
  w.begin_object();
  w.key("scenario_count").value(static_cast<std::uint64_t>(report.scenario_count));
  w.key("aggregate").begin_object();
  for (const auto& [label, mean] : report.aggregate) {
    w.key(label).value(mean);
  }
  w.end_object();
  w.key("per_scenario").begin_array();
  for (const spectral::EvalRow& row : report.per_scenario) {
    w.begin_object();
    w.key("scene_seed").value(static_cast<std::uint64_t>(row.scene_seed));
    w.key("method").value(row.method);
    w.key("srinr_db").value(row.srinr_db);
    w.key("detected_ranges_m").begin_array();
    for (double r : row.detected_ranges_m) w.value(r);
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

void write_eval_report(const std::string& path, const spectral::EvalReport& report) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) {
    throw FormatError("cannot open report for writing: " + path);
  }
  const std::string json = eval_report_json(report);
  out.write(json.data(), static_cast<std::streamsize>(json.size()));
  if (!out) {
    throw FormatError("report write failed: " + path);
  }
}

void write_train_log(const std::string& path, const train::TrainLog& log) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) {
    throw FormatError("cannot open training log for writing: " + path);
  }
  for (const train::BatchStat& b : log.batches) {
    JsonWriter w;
    w.begin_object();
    w.key("kind").value("batch");
    w.key("step").value(b.step);
    w.key("epoch").value(b.epoch);
    w.key("batch").value(b.batch_index);
    w.key("loss").value(b.loss);
    w.key("grad_norm").value(b.grad_norm);
    w.end_object();
    out << w.str() << '\n';
  }
  for (const train::EpochStat& e : log.epochs) {
    JsonWriter w;
    w.begin_object();
    w.key("kind").value("epoch");
    w.key("epoch").value(e.epoch);
    w.key("train_loss").value(e.train_loss);
    w.key("val_loss").value(e.val_loss);
    w.key("seconds").value(e.seconds);
    w.end_object();
    out << w.str() << '\n';
  }
  if (!out) {
    throw FormatError("training log write failed: " + path);
  }
}

}  // namespace rim::io
