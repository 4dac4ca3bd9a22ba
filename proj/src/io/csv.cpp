#include "rim/io/csv.hpp"

#include <cstdlib>
#include <fstream>

#include "rim/errors.hpp"
#include "rim/io/json_writer.hpp"

namespace rim::io {

std::vector<double> read_frame_csv(const std::string& path, int expected_len) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open frame CSV: " + path);
  }
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0') {
      throw FormatError("frame CSV line " + std::to_string(line_no) + ": not a number: '" +
                        line + "'");
    }
    values.push_back(v);
  }
  if (static_cast<int>(values.size()) != expected_len) {
    throw FormatError("frame CSV has " + std::to_string(values.size()) + " samples, expected " +
                      std::to_string(expected_len));
  }
  return values;
}

void write_frame_csv(const std::string& path, std::span<const double> frame) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw FormatError("cannot open frame CSV for writing: " + path);
  }
  for (double v : frame) {
    out << JsonWriter::format_double(v) << '\n';
  }
  if (!out) {
    throw FormatError("frame CSV write failed: " + path);
  }
}

void write_spectrum_csv(const std::string& path, const spectral::RangeSpectrum& spectrum) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw FormatError("cannot open spectrum CSV for writing: " + path);
  }
  out << "bin_hz,range_m,power_db\n";
  for (std::size_t i = 0; i < spectrum.power_db.size(); ++i) {
    const double bin_hz = spectrum.bin_width_hz * static_cast<double>(i);
    out << JsonWriter::format_double(bin_hz) << ','
        << JsonWriter::format_double(spectrum.range_of_bin(static_cast<int>(i))) << ','
        << JsonWriter::format_double(spectrum.power_db[i]) << '\n';
  }
  if (!out) {
    throw FormatError("spectrum CSV write failed: " + path);
  }
}

}  // namespace rim::io
