#include "rim/io/scenario_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rim/errors.hpp"

namespace rim::io {

namespace {

std::string trim(const std::string& s) {
  const std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw FormatError("config key " + key + ": cannot parse number '" + value + "'");
  }
  return parsed;
}

int parse_int(const std::string& key, const std::string& value) {
  const double parsed = parse_number(key, value);
  const int as_int = static_cast<int>(parsed);
  if (static_cast<double>(as_int) != parsed) {
    throw FormatError("config key " + key + ": expected an integer, got '" + value + "'");
  }
  return as_int;
}

}  // namespace

ScenarioConfig parse_scenario_config_text(const std::string& text) {
  ScenarioConfig config;
  std::istringstream in(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw FormatError("config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "radar" && section != "scene" && section != "baselines") {
        throw FormatError("config line " + std::to_string(line_no) + ": unknown section [" +
                          section + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw FormatError("config line " + std::to_string(line_no) + ": key outside any section");
    }

    sim::RadarBounds& radar = config.sampler.radar;
    sim::SceneBounds& scene = config.sampler.scene;
    baseline::MitigationConfig& mitigation = config.mitigation;
    if (section == "radar") {
      if (key == "f_min") radar.carrier_min_hz = parse_number(key, value);
      else if (key == "f_max") radar.carrier_max_hz = parse_number(key, value);
      else if (key == "B_min") radar.bandwidth_min_hz = parse_number(key, value);
      else if (key == "B_max") radar.bandwidth_max_hz = parse_number(key, value);
      else if (key == "Tchirp_min") radar.chirp_min_s = parse_number(key, value);
      else if (key == "Tchirp_max") radar.chirp_max_s = parse_number(key, value);
      else if (key == "f_s") radar.sample_rate_hz = parse_number(key, value);
      else if (key == "lpf_cutoff") radar.lpf_cutoff_hz = parse_number(key, value);
      else throw FormatError("config: unknown key '" + key + "' in section [radar]");
    } else if (section == "scene") {
      if (key == "range_min_m") scene.range_min_m = parse_number(key, value);
      else if (key == "range_max_m") scene.range_max_m = parse_number(key, value);
      else if (key == "velocity_min_kmh") scene.velocity_min_mps = parse_number(key, value) / 3.6;
      else if (key == "velocity_max_kmh") scene.velocity_max_mps = parse_number(key, value) / 3.6;
      else if (key == "targets_min") scene.targets_min = parse_int(key, value);
      else if (key == "targets_max") scene.targets_max = parse_int(key, value);
      else if (key == "interferers_min") scene.interferers_min = parse_int(key, value);
      else if (key == "interferers_max") scene.interferers_max = parse_int(key, value);
      else if (key == "snr_min_db") scene.snr_min_db = parse_number(key, value);
      else if (key == "snr_max_db") scene.snr_max_db = parse_number(key, value);
      else throw FormatError("config: unknown key '" + key + "' in section [scene]");
    } else {
      if (key == "tdt_beta") mitigation.tdt_beta = parse_number(key, value);
      else if (key == "tdt_replace") mitigation.tdt_replace = baseline::tdt_replace_from_string(value);
      else if (key == "envelope_window") mitigation.envelope_window = parse_int(key, value);
      else throw FormatError("config: unknown key '" + key + "' in section [baselines]");
    }
  }

  try {
    config.sampler.validate();
    config.mitigation.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return config;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open config: " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario_config_text(text);
}

}  // namespace rim::io
