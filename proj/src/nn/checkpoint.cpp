#include "rim/nn/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "rim/errors.hpp"
#include "rim/io/json_writer.hpp"

namespace rim::nn {

namespace {

constexpr char kMagic[4] = {'R', 'I', 'M', 'C'};
constexpr std::uint32_t kContainerVersion = 1;

std::uint64_t fnv1a64(const char* data, std::size_t size) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= static_cast<unsigned char>(data[i]);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

template <typename T>
void append_raw(std::string& out, const T& value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T read_raw(const std::string& bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) {
    throw CheckpointCorruptError("checkpoint truncated at byte " + std::to_string(pos));
  }
  T value;
  std::memcpy(&value, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

std::string save_network_bytes(const GruNetwork& net) {
  GruNetwork& mutable_net = const_cast<GruNetwork&>(net);
  const std::vector<TensorRef> tensors = tensor_table(mutable_net);

  std::string blob;
  std::uint64_t offset = 0;

  io::JsonWriter manifest;
  manifest.begin_object();
  manifest.key("arch").value(net.arch_tag());
  manifest.key("hidden_size").value(net.hidden_size);
  manifest.key("num_layers").value(net.num_layers());
  manifest.key("seq_len").value(net.seq_len);
  manifest.key("merge").value("sum");
  manifest.key("dropout").value(net.dropout_rate);
  manifest.key("tensors").begin_array();
  for (const TensorRef& ref : tensors) {
    manifest.begin_object();
    manifest.key("name").value(ref.name);
    manifest.key("rows").value(static_cast<std::int64_t>(ref.rows));
    manifest.key("cols").value(static_cast<std::int64_t>(ref.cols));
    manifest.key("offset").value(static_cast<std::uint64_t>(offset));
    manifest.end_object();
    const std::size_t bytes = static_cast<std::size_t>(ref.size()) * sizeof(double);
    blob.append(reinterpret_cast<const char*>(ref.data), bytes);
    offset += bytes;
  }
  manifest.end_array();
  manifest.end_object();

  std::string out;
  out.append(kMagic, sizeof(kMagic));
  append_raw(out, kContainerVersion);
  append_raw(out, static_cast<std::uint64_t>(manifest.str().size()));
  out += manifest.str();
  append_raw(out, static_cast<std::uint64_t>(blob.size()));
  out += blob;
  append_raw(out, fnv1a64(blob.data(), blob.size()));
  return out;
}

GruNetwork load_network_bytes(const std::string& bytes) {
  std::size_t pos = 0;
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointCorruptError("not a checkpoint: bad magic");
  }
  pos = sizeof(kMagic);
  const auto version = read_raw<std::uint32_t>(bytes, pos);
  if (version != kContainerVersion) {
    throw CheckpointVersionError("unsupported checkpoint container version " +
                                 std::to_string(version));
  }
  const auto manifest_len = read_raw<std::uint64_t>(bytes, pos);
  if (pos + manifest_len > bytes.size()) {
    throw CheckpointCorruptError("checkpoint truncated inside the manifest");
  }
  const std::string manifest_text = bytes.substr(pos, manifest_len);
  pos += manifest_len;

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_text);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointCorruptError(std::string("checkpoint manifest is not valid JSON: ") +
                                 e.what());
  }

  const auto blob_len = read_raw<std::uint64_t>(bytes, pos);
  if (pos + blob_len + sizeof(std::uint64_t) > bytes.size()) {
    throw CheckpointCorruptError("checkpoint truncated inside the weight blob");
  }
  const char* blob = bytes.data() + pos;
  pos += blob_len;
  const auto stored_checksum = read_raw<std::uint64_t>(bytes, pos);
  if (fnv1a64(blob, blob_len) != stored_checksum) {
    throw CheckpointCorruptError("checkpoint blob checksum mismatch");
  }

  GruNetwork net;
  try {
    const int hidden = manifest.at("hidden_size").get<int>();
    const int layers = manifest.at("num_layers").get<int>();
    const int seq_len = manifest.at("seq_len").get<int>();
    const double dropout = manifest.at("dropout").get<double>();
    net = make_network(hidden, layers, seq_len, dropout, 0);
    if (manifest.at("arch").get<std::string>() != net.arch_tag()) {
      throw CheckpointVersionError("checkpoint architecture tag mismatch: " +
                                   manifest.at("arch").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointCorruptError(std::string("checkpoint manifest missing fields: ") + e.what());
  }

  std::vector<TensorRef> tensors = tensor_table(net);
  const auto& table = manifest.at("tensors");
  if (!table.is_array() || table.size() != tensors.size()) {
    throw CheckpointShapeError("checkpoint tensor table has wrong entry count");
  }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> regions;  // offset, length
  std::uint64_t total_bytes = 0;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& entry = table[i];
    std::string name;
    std::uint64_t rows = 0, cols = 0, offset = 0;
    try {
      name = entry.at("name").get<std::string>();
      rows = entry.at("rows").get<std::uint64_t>();
      cols = entry.at("cols").get<std::uint64_t>();
      offset = entry.at("offset").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw CheckpointCorruptError(std::string("checkpoint tensor entry malformed: ") + e.what());
    }
    TensorRef& ref = tensors[i];
    if (name != ref.name || rows != static_cast<std::uint64_t>(ref.rows) ||
        cols != static_cast<std::uint64_t>(ref.cols)) {
      throw CheckpointShapeError("checkpoint tensor " + name +
                                 " does not match the declared architecture");
    }
    const std::uint64_t length = rows * cols * sizeof(double);
    if (offset + length > blob_len) {
      throw CheckpointShapeError("checkpoint tensor " + name + " exceeds the blob");
    }
    regions.emplace_back(offset, length);
    total_bytes += length;
    std::memcpy(ref.data, blob + offset, length);
  }
  std::sort(regions.begin(), regions.end());
  for (std::size_t i = 1; i < regions.size(); ++i) {
    if (regions[i].first < regions[i - 1].first + regions[i - 1].second) {
      throw CheckpointShapeError("checkpoint tensor regions overlap");
    }
  }
  if (total_bytes != blob_len) {
    throw CheckpointShapeError("checkpoint blob size does not match the tensor table");
  }
  return net;
}

void save_network(const GruNetwork& net, const std::string& path) {
  const std::string bytes = save_network_bytes(net);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("cannot open checkpoint for writing: " + path);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw FormatError("checkpoint write failed: " + path);
  }
}

GruNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open checkpoint: " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_network_bytes(bytes);
}

}  // namespace rim::nn
