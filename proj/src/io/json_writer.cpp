#include "rim/io/json_writer.hpp"

#include <cmath>
#include <cstdio>

#include "rim/errors.hpp"

namespace rim::io {

std::string JsonWriter::format_double(double v) {
  if (!std::isfinite(v)) {
    throw NumericError("JSON writer: non-finite number");
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string JsonWriter::escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void JsonWriter::before_value() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!stack_.empty() && has_entries_.back()) {
    out_ += ',';
  }
  if (!has_entries_.empty()) {
    has_entries_.back() = true;
  }
}

JsonWriter& JsonWriter::begin_object() {
  before_value();
  out_ += '{';
  stack_.push_back('{');
  has_entries_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  stack_.pop_back();
  has_entries_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  before_value();
  out_ += '[';
  stack_.push_back('[');
  has_entries_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  stack_.pop_back();
  has_entries_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
  if (!has_entries_.empty() && has_entries_.back()) {
    out_ += ',';
  }
  if (!has_entries_.empty()) {
    has_entries_.back() = true;
  }
  out_ += '"';
  out_ += escape(name);
  out_ += "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  before_value();
  const std::string s = format_double(v);
  // %.17g prints integral doubles without a decimal point; keep them doubles.
  if (s.find_first_of(".eE") == std::string::npos) {
    out_ += s + ".0";
  } else {
    out_ += s;
  }
  return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  before_value();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  before_value();
  out_ += '"';
  out_ += escape(v);
  out_ += '"';
  return *this;
}

}  // namespace rim::io
