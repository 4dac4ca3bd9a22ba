#include "rim/io/rimd.hpp"

#include <cstring>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rim/errors.hpp"
#include "rim/io/json_writer.hpp"

namespace rim::io {

namespace {

constexpr char kMagic[4] = {'R', 'I', 'M', 'D'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 8 + 8;

std::string header_bytes(const DatasetHeader& header) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  auto append = [&out](const auto& v) {
    char buf[sizeof(v)];
    std::memcpy(buf, &v, sizeof(v));
    out.append(buf, sizeof(v));
  };
  append(header.version);
  append(header.frame_count);
  append(header.frame_len);
  append(header.sample_rate_hz);
  append(header.base_seed);
  return out;
}

void append_frame_payload(std::string& out, const sim::BeatFrame& frame) {
  out.append(reinterpret_cast<const char*>(frame.input.data()),
             frame.input.size() * sizeof(double));
  out.append(reinterpret_cast<const char*>(frame.label.data()),
             frame.label.size() * sizeof(double));
}

const char* kind_name(sim::InterfererKind kind) {
  return kind == sim::InterfererKind::kSawtooth ? "sawtooth" : "triangle";
}

sim::InterfererKind kind_from_name(const std::string& name) {
  if (name == "sawtooth") return sim::InterfererKind::kSawtooth;
  if (name == "triangle") return sim::InterfererKind::kTriangle;
  throw FormatError("dataset metadata: unknown interferer kind " + name);
}

sim::RadarScene scene_from_json(const nlohmann::json& j) {
  sim::RadarScene scene;
  scene.rng_seed = j.at("scene_seed").get<std::uint64_t>();
  scene.noise_std = j.at("noise_std").get<double>();
  const auto& victim = j.at("victim");
  scene.victim.carrier_hz = victim.at("carrier_hz").get<double>();
  scene.victim.sweep_bandwidth_hz = victim.at("bandwidth_hz").get<double>();
  scene.victim.chirp_duration_s = victim.at("chirp_s").get<double>();
  scene.victim.num_chirps = victim.at("num_chirps").get<int>();
  scene.victim.sample_rate_hz = victim.at("sample_rate_hz").get<double>();
  scene.victim.lpf_cutoff_hz = victim.at("lpf_cutoff_hz").get<double>();
  for (const auto& t : j.at("targets")) {
    sim::Target target;
    target.range_m = t.at("range_m").get<double>();
    target.velocity_mps = t.at("velocity_mps").get<double>();
    target.amplitude = t.at("amplitude").get<double>();
    scene.targets.push_back(target);
  }
  for (const auto& i : j.at("interferers")) {
    sim::Interferer inter;
    inter.carrier_hz = i.at("carrier_hz").get<double>();
    inter.sweep_bandwidth_hz = i.at("bandwidth_hz").get<double>();
    inter.chirp_duration_s = i.at("chirp_s").get<double>();
    inter.kind = kind_from_name(i.at("kind").get<std::string>());
    inter.range_m = i.at("range_m").get<double>();
    inter.amplitude = i.at("amplitude").get<double>();
    inter.start_offset_s = i.at("start_offset_s").get<double>();
    scene.interferers.push_back(inter);
  }
  return scene;
}

}  // namespace

std::string scene_metadata_line(const sim::BeatFrame& frame, const sim::RadarScene& scene) {
  JsonWriter w;
  w.begin_object();
  w.key("scene_seed").value(static_cast<std::uint64_t>(scene.rng_seed));
  w.key("chirp_index").value(frame.chirp_index);
  w.key("valid_len").value(frame.valid_len);
  w.key("noise_std").value(scene.noise_std);
  w.key("victim").begin_object();
  w.key("carrier_hz").value(scene.victim.carrier_hz);
  w.key("bandwidth_hz").value(scene.victim.sweep_bandwidth_hz);
  w.key("chirp_s").value(scene.victim.chirp_duration_s);
  w.key("num_chirps").value(scene.victim.num_chirps);
  w.key("sample_rate_hz").value(scene.victim.sample_rate_hz);
  w.key("lpf_cutoff_hz").value(scene.victim.lpf_cutoff_hz);
  w.end_object();
  w.key("targets").begin_array();
  for (const sim::Target& t : scene.targets) {
    w.begin_object();
    w.key("range_m").value(t.range_m);
    w.key("velocity_mps").value(t.velocity_mps);
    w.key("amplitude").value(t.amplitude);
    w.end_object();
  }
  w.end_array();
  w.key("interferers").begin_array();
  for (const sim::Interferer& i : scene.interferers) {
    w.begin_object();
    w.key("carrier_hz").value(i.carrier_hz);
    w.key("bandwidth_hz").value(i.sweep_bandwidth_hz);
    w.key("chirp_s").value(i.chirp_duration_s);
    w.key("kind").value(kind_name(i.kind));
    w.key("range_m").value(i.range_m);
    w.key("amplitude").value(i.amplitude);
    w.key("start_offset_s").value(i.start_offset_s);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

RimdFileSink::RimdFileSink(const std::string& path, std::uint32_t expected_frames,
                           double sample_rate_hz, std::uint64_t base_seed)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), expected_(expected_frames) {
  if (!out_) {
    throw FormatError("cannot open dataset for writing: " + path);
  }
  DatasetHeader header;
  header.frame_count = expected_frames;
  header.sample_rate_hz = sample_rate_hz;
  header.base_seed = base_seed;
  const std::string bytes = header_bytes(header);
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

RimdFileSink::~RimdFileSink() {
  if (!finalized_ && written_ == expected_) {
    try {
      finalize();
    } catch (...) {
      // destructor must not throw; an unfinished file fails validation on read
    }
  }
}

void RimdFileSink::on_frame(const sim::BeatFrame& frame, const sim::RadarScene& scene) {
  std::string payload;
  append_frame_payload(payload, frame);
  out_.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out_) {
    throw FormatError("dataset write failed: " + path_);
  }
  metadata_ += scene_metadata_line(frame, scene);
  metadata_ += '\n';
  ++written_;
}

void RimdFileSink::finalize() {
  if (finalized_) return;
  if (written_ != expected_) {
    throw FormatError("dataset sink finalized with " + std::to_string(written_) +
                      " frames, expected " + std::to_string(expected_));
  }
  out_.write(metadata_.data(), static_cast<std::streamsize>(metadata_.size()));
  out_.flush();
  if (!out_) {
    throw FormatError("dataset write failed: " + path_);
  }
  finalized_ = true;
}

MemorySink::MemorySink(double sample_rate_hz, std::uint64_t base_seed) {
  dataset_.header.sample_rate_hz = sample_rate_hz;
  dataset_.header.base_seed = base_seed;
}

void MemorySink::on_frame(const sim::BeatFrame& frame, const sim::RadarScene& scene) {
  dataset_.frames.push_back(frame);
  dataset_.scenes.push_back(scene);
  dataset_.header.frame_count = static_cast<std::uint32_t>(dataset_.frames.size());
}

Dataset read_rimd(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open dataset: " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < kHeaderBytes) {
    throw FormatError("dataset truncated: header needs " + std::to_string(kHeaderBytes) +
                      " bytes, file has " + std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a RIMD dataset: bad magic");
  }
  Dataset dataset;
  std::size_t pos = sizeof(kMagic);
  auto read = [&bytes, &pos](auto& v) {
    std::memcpy(&v, bytes.data() + pos, sizeof(v));
    pos += sizeof(v);
  };
  read(dataset.header.version);
  read(dataset.header.frame_count);
  read(dataset.header.frame_len);
  read(dataset.header.sample_rate_hz);
  read(dataset.header.base_seed);

  if (dataset.header.version != 1) {
    throw FormatError("unsupported dataset version " + std::to_string(dataset.header.version));
  }
  if (dataset.header.frame_len == 0 || dataset.header.frame_len > 1 << 20) {
    throw FormatError("dataset frame length out of range");
  }

  const std::size_t frame_bytes =
      2ULL * dataset.header.frame_len * sizeof(double);
  const std::size_t payload_bytes = frame_bytes * dataset.header.frame_count;
  if (bytes.size() < kHeaderBytes + payload_bytes) {
    throw FormatError("dataset truncated: payload ends at byte " +
                      std::to_string(kHeaderBytes + payload_bytes) + ", file has " +
                      std::to_string(bytes.size()));
  }

  dataset.frames.reserve(dataset.header.frame_count);
  for (std::uint32_t f = 0; f < dataset.header.frame_count; ++f) {
    sim::BeatFrame frame;
    frame.input.resize(dataset.header.frame_len);
    frame.label.resize(dataset.header.frame_len);
    std::memcpy(frame.input.data(), bytes.data() + pos,
                dataset.header.frame_len * sizeof(double));
    pos += dataset.header.frame_len * sizeof(double);
    std::memcpy(frame.label.data(), bytes.data() + pos,
                dataset.header.frame_len * sizeof(double));
    pos += dataset.header.frame_len * sizeof(double);
    dataset.frames.push_back(std::move(frame));
  }

  // Metadata: exactly one JSON line per frame.
  std::istringstream meta(bytes.substr(pos));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    ++line_no;
    if (line_no > dataset.header.frame_count) break;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("dataset metadata line " + std::to_string(line_no) +
                        " is not valid JSON: " + e.what());
    }
    try {
      dataset.scenes.push_back(scene_from_json(j));
      sim::BeatFrame& frame = dataset.frames[line_no - 1];
      frame.chirp_index = j.at("chirp_index").get<int>();
      frame.valid_len = j.at("valid_len").get<int>();
      frame.scene_seed = j.at("scene_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("dataset metadata line " + std::to_string(line_no) +
                        " missing fields: " + e.what());
    }
  }
  if (line_no != dataset.header.frame_count) {
    throw FormatError("dataset metadata has " + std::to_string(line_no) +
                      " records, expected " + std::to_string(dataset.header.frame_count));
  }
  return dataset;
}

void write_rimd(const std::string& path, const Dataset& dataset) {
  if (dataset.frames.size() != dataset.scenes.size()) {
    throw FormatError("write_rimd: frames and scenes misaligned");
  }
  RimdFileSink sink(path, static_cast<std::uint32_t>(dataset.frames.size()),
                    dataset.header.sample_rate_hz, dataset.header.base_seed);
  for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
    sink.on_frame(dataset.frames[i], dataset.scenes[i]);
  }
  sink.finalize();
}

}  // namespace rim::io
