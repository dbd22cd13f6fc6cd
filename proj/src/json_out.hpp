// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fairot/data.hpp"

namespace fairot::detail {

inline std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
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

// Streaming JSON writer with deterministic layout and doubles rendered at
// 12 significant digits, which nlohmann's default dump does not offer.
class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& os) : os_(os) {}

  JsonWriter& key(std::string_view k) {
    separate();
    os_ << '"' << json_escape(k) << "\": ";
    after_key_ = true;
    return *this;
  }

  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  void string(std::string_view v) {
    separate();
    os_ << '"' << json_escape(v) << '"';
  }
  void number(double v) {
    separate();
    os_ << format_number(v);
  }
  void integer(long long v) {
    separate();
    os_ << v;
  }
  void unsigned_integer(unsigned long long v) {
    separate();
    os_ << v;
  }
  void boolean(bool v) {
    separate();
    os_ << (v ? "true" : "false");
  }
  void null() {
    separate();
    os_ << "null";
  }

 private:
  void open(char c) {
    separate();
    os_ << c;
    members_.push_back(0);
  }
  void close(char c) {
    os_ << '\n' << std::string(2 * (members_.size() - 1), ' ') << c;
    members_.pop_back();
    if (members_.empty()) os_ << '\n';
  }
  void separate() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (!members_.empty()) {
      if (members_.back()++ > 0) os_ << ',';
      os_ << '\n' << std::string(2 * members_.size(), ' ');
    }
  }

  std::ostream& os_;
  std::vector<int> members_;
  bool after_key_ = false;
};

}  // namespace fairot::detail
