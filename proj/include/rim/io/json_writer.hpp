#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rim::io {

// Append-only JSON emitter with insertion-order keys and %.17g float
// formatting, so identical inputs always serialize to identical bytes.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double v);  // throws NumericError on non-finite values
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v) { return value(std::string(v)); }

  const std::string& str() const { return out_; }

  static std::string format_double(double v);
  static std::string escape(const std::string& s);

 private:
  void before_value();

  std::string out_;
  std::vector<char> stack_;        // '{' or '['
  std::vector<bool> has_entries_;  // per open container
  bool pending_key_ = false;
};

}  // namespace rim::io
