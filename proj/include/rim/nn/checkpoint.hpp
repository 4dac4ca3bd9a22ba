#pragma once

#include <string>

#include "rim/nn/gru.hpp"

namespace rim::nn {

// Checkpoint container: "RIMC" magic, container version, a JSON manifest
// (architecture tag, sizes, named tensor table with byte offsets), the
// little-endian float64 weight blob, and a 64-bit FNV-1a checksum of the
// blob. load(save(net)) restores parameters bit-exactly.
std::string save_network_bytes(const GruNetwork& net);
GruNetwork load_network_bytes(const std::string& bytes);

void save_network(const GruNetwork& net, const std::string& path);
GruNetwork load_network(const std::string& path);

}  // namespace rim::nn
