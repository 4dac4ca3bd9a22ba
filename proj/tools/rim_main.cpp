// Command line for the chirp-sequence radar interference mitigation pipeline:
// dataset generation, GRU denoiser training, method benchmarking, and
// single-frame mitigation.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rim/common.hpp"
#include "rim/errors.hpp"
#include "rim/io/csv.hpp"
#include "rim/io/report.hpp"
#include "rim/io/rimd.hpp"
#include "rim/io/scenario_config.hpp"
#include "rim/nn/checkpoint.hpp"
#include "rim/sim/dataset.hpp"
#include "rim/sim/synth.hpp"
#include "rim/spectral/evaluate.hpp"
#include "rim/train/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitNumeric = 3;

struct GenerateArgs {
  std::string config_path;
  std::uint64_t count = 0;
  std::uint64_t seed = 1;
  std::string out_path;
};

struct TrainArgs {
  std::string data_path, val_path, ckpt_path, log_path;
  rim::train::TrainConfig config;
};

struct EvaluateArgs {
  std::string data_path, model_path, report_path, spectra_dir, config_path;
  std::string methods = "none,tdt,envelope";
};

struct MitigateArgs {
  std::string in_path, model_path, out_path;
  double sample_rate_hz = 20.0e6;
  double slope_hz_per_s = 5.0e12;  // 150 MHz over 30 us
};

rim::io::ScenarioConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return {};
  return rim::io::load_scenario_config(path);
}

int run_generate(const GenerateArgs& args) {
  if (args.count == 0) {
    throw rim::UsageError("--count must be at least 1");
  }
  const rim::io::ScenarioConfig config = load_config_or_default(args.config_path);
  rim::io::RimdFileSink sink(args.out_path, static_cast<std::uint32_t>(args.count),
                             config.sampler.radar.sample_rate_hz, args.seed);
  const rim::sim::DatasetSummary summary =
      rim::sim::generate_dataset(args.count, args.seed, config.sampler, sink);
  sink.finalize();
  std::printf("wrote %llu frames to %s (%llu scenes resampled) in %.2f s\n",
              static_cast<unsigned long long>(summary.frames), args.out_path.c_str(),
              static_cast<unsigned long long>(summary.resampled), summary.elapsed_s);
  return kExitOk;
}

int run_train(const TrainArgs& args) {
  const rim::io::Dataset data = rim::io::read_rimd(args.data_path);
  if (data.header.frame_len != static_cast<std::uint32_t>(rim::kFrameLen)) {
    throw rim::FormatError("dataset frame length " + std::to_string(data.header.frame_len) +
                           " does not match the " + std::to_string(rim::kFrameLen) +
                           "-sample network input");
  }

  std::vector<rim::sim::BeatFrame> train_frames, val_frames;
  if (!args.val_path.empty()) {
    train_frames = data.frames;
    const rim::io::Dataset val = rim::io::read_rimd(args.val_path);
    if (val.header.frame_len != data.header.frame_len) {
      throw rim::FormatError("validation dataset frame length differs from training data");
    }
    val_frames = val.frames;
  } else {
    const auto [train_idx, val_idx] =
        rim::train::split_train_val(data.frames.size(), args.config.val_fraction);
    for (std::uint32_t i : train_idx) train_frames.push_back(data.frames[i]);
    for (std::uint32_t i : val_idx) val_frames.push_back(data.frames[i]);
  }
  std::printf("training on %zu frames, validating on %zu\n", train_frames.size(),
              val_frames.size());

  rim::train::CheckpointCallback periodic;
  if (args.config.checkpoint_every > 0) {
    const std::string base = args.ckpt_path;
    periodic = [base](const rim::nn::GruNetwork& net, const std::string& label) {
      rim::nn::save_network(net, base + "." + label);
    };
  }

  const auto progress = [](const rim::train::EpochStat& e) {
    std::fprintf(stderr, "epoch %3d: train %.6f val %.6f (%.1f s)\n", e.epoch, e.train_loss,
                 e.val_loss, e.seconds);
  };
  const rim::train::TrainResult result =
      rim::train::train(args.config, train_frames, val_frames, periodic, progress);

  rim::nn::save_network(result.best, args.ckpt_path);
  rim::nn::save_network(result.final, args.ckpt_path + ".final");
  const std::string log_path = args.log_path.empty() ? args.ckpt_path + ".log.jsonl"
                                                     : args.log_path;
  rim::io::write_train_log(log_path, result.log);

  if (!result.log.epochs.empty()) {
    std::printf("best validation loss %.6f at epoch %d (%lld steps); checkpoints: %s, %s.final\n",
                result.best_val_loss, result.best_epoch,
                static_cast<long long>(result.log.steps), args.ckpt_path.c_str(),
                args.ckpt_path.c_str());
  } else {
    std::printf("no epochs requested; wrote the initialized network to %s\n",
                args.ckpt_path.c_str());
  }
  return kExitOk;
}

int run_evaluate(const EvaluateArgs& args) {
  const rim::io::Dataset data = rim::io::read_rimd(args.data_path);

  std::vector<rim::spectral::Method> methods;
  std::string token;
  for (char c : args.methods + ",") {
    if (c == ',') {
      if (!token.empty()) methods.push_back(rim::spectral::method_from_id(token));
      token.clear();
    } else {
      token += c;
    }
  }
  bool wants_model = false;
  for (rim::spectral::Method m : methods) {
    wants_model |= m == rim::spectral::Method::kProposed;
  }
  if (wants_model && args.model_path.empty()) {
    throw rim::UsageError("--model is required when the proposed method is evaluated");
  }
  if (!wants_model && !args.model_path.empty()) {
    throw rim::UsageError("--model given but the proposed method was not requested");
  }

  rim::nn::GruNetwork model;
  if (wants_model) {
    model = rim::nn::load_network(args.model_path);
  }

  rim::spectral::EvalOptions options;
  if (!args.config_path.empty()) {
    options.mitigation = rim::io::load_scenario_config(args.config_path).mitigation;
  }

  rim::spectral::SpectrumCapture capture;
  rim::spectral::SpectrumCapture* capture_ptr = args.spectra_dir.empty() ? nullptr : &capture;
  const rim::spectral::EvalReport report = rim::spectral::evaluate_methods(
      data, methods, wants_model ? &model : nullptr, options, capture_ptr);

  rim::io::write_eval_report(args.report_path, report);
  if (!args.spectra_dir.empty()) {
    std::filesystem::create_directories(args.spectra_dir);
    for (const auto& [name, spectrum] : capture.spectra) {
      rim::io::write_spectrum_csv(args.spectra_dir + "/" + name + ".csv", spectrum);
    }
  }

  std::printf("evaluated %llu scenarios\n",
              static_cast<unsigned long long>(report.scenario_count));
  for (const auto& [label, mean] : report.aggregate) {
    std::printf("  mean SRINR %-26s %8.3f dB\n", label.c_str(), mean);
  }
  std::printf("report: %s\n", args.report_path.c_str());
  return kExitOk;
}

int run_mitigate(const MitigateArgs& args) {
  std::vector<double> frame = rim::io::read_frame_csv(args.in_path, rim::kFrameLen);
  try {
    rim::sim::normalize_unit_energy(frame);
  } catch (const rim::NormalizeError& e) {
    throw rim::FormatError(std::string("input frame: ") + e.what());
  }

  const rim::nn::GruNetwork model = rim::nn::load_network(args.model_path);
  const std::vector<double> cleaned =
      rim::nn::network_forward(model, frame, rim::nn::RunMode::kInference);

  rim::io::write_frame_csv(args.out_path, cleaned);
  const rim::spectral::RangeSpectrum in_spec = rim::spectral::range_fft(
      frame, rim::spectral::WindowKind::kHann, args.sample_rate_hz, args.slope_hz_per_s);
  const rim::spectral::RangeSpectrum out_spec = rim::spectral::range_fft(
      cleaned, rim::spectral::WindowKind::kHann, args.sample_rate_hz, args.slope_hz_per_s);
  rim::io::write_spectrum_csv(args.out_path + ".input_spectrum.csv", in_spec);
  rim::io::write_spectrum_csv(args.out_path + ".output_spectrum.csv", out_spec);
  std::printf("wrote %s and range spectra alongside it\n", args.out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chirp-sequence radar interference mitigation pipeline"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Synthesize a beat-frame dataset");
  generate->add_option("--config", gen.config_path, "Scenario config file");
  generate->add_option("--count", gen.count, "Number of frames")->required();
  generate->add_option("--seed", gen.seed, "Base RNG seed");
  generate->add_option("--out", gen.out_path, "Output .rimd path")->required();

  TrainArgs tr;
  CLI::App* train = app.add_subcommand("train", "Train the GRU denoiser");
  train->add_option("--data", tr.data_path, "Training dataset (.rimd)")->required();
  train->add_option("--val", tr.val_path,
                    "Validation dataset (.rimd); split from --data if absent");
  train->add_option("--ckpt-out", tr.ckpt_path, "Best-checkpoint output path")->required();
  train->add_option("--log", tr.log_path, "Training log path (JSON lines)");
  train->add_option("--epochs", tr.config.epochs, "Training epochs");
  train->add_option("--batch", tr.config.batch_size, "Batch size");
  train->add_option("--lr", tr.config.learning_rate, "Adam learning rate");
  train->add_option("--hidden", tr.config.hidden_size, "Hidden state size");
  train->add_option("--layers", tr.config.num_layers, "Bidirectional GRU layers");
  train->add_option("--dropout", tr.config.dropout_rate, "Dropout rate");
  train->add_option("--clip", tr.config.clip_norm, "Gradient clipping norm");
  train->add_option("--seed", tr.config.seed, "Training seed");
  train->add_option("--val-fraction", tr.config.val_fraction, "Validation split fraction");
  train->add_option("--checkpoint-every", tr.config.checkpoint_every,
                    "Periodic checkpoint interval in batches (0 = off)");
  train->add_option("--threads", tr.config.num_threads, "Worker threads");

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Benchmark mitigation methods");
  evaluate->add_option("--data", ev.data_path, "Evaluation dataset (.rimd)")->required();
  evaluate->add_option("--methods", ev.methods, "Comma list of none,tdt,envelope,proposed");
  evaluate->add_option("--model", ev.model_path, "Checkpoint for the proposed method");
  evaluate->add_option("--report", ev.report_path, "JSON report output")->required();
  evaluate->add_option("--spectra-dir", ev.spectra_dir, "Directory for per-frame spectrum CSVs");
  evaluate->add_option("--config", ev.config_path, "Scenario config (baseline parameters)");

  MitigateArgs mit;
  CLI::App* mitigate = app.add_subcommand("mitigate", "Clean one frame with a trained model");
  mitigate->add_option("--in", mit.in_path, "Input frame CSV (one sample per line)")->required();
  mitigate->add_option("--model", mit.model_path, "Checkpoint path")->required();
  mitigate->add_option("--out", mit.out_path, "Cleaned frame CSV")->required();
  mitigate->add_option("--sample-rate", mit.sample_rate_hz, "Sample rate for spectra (Hz)");
  mitigate->add_option("--slope", mit.slope_hz_per_s, "Chirp slope for range mapping (Hz/s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return run_generate(gen);
    if (train->parsed()) return run_train(tr);
    if (evaluate->parsed()) return run_evaluate(ev);
    if (mitigate->parsed()) return run_mitigate(mit);
    std::cerr << "no subcommand given\n";
    return kExitUsage;
  } catch (const rim::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rim::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const rim::NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const rim::NormalizeError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
