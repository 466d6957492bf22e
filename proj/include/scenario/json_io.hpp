#pragma once

// Canonical JSON conventions shared by every file format: sorted keys,
// 2-space indent, '\n' line ends, a trailing newline, and doubles written as
// the shortest decimal that round-trips to the same binary64 value.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "scenario/error.hpp"

namespace scenario {

using Json = nlohmann::json;

inline std::string format_number(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::SchemaViolation, "non-finite number cannot be serialized");
  if (value == 0.0) value = 0.0;  // fold -0
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error(ErrorCode::SchemaViolation, "number formatting failed");
  return std::string(buf.data(), end);
}

namespace detail {

inline void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

inline void write_canonical(const Json& j, std::string& out, int depth) {
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      // nlohmann's default object_t is a std::map, so iteration is key-sorted.
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        indent(out, depth + 1);
        out += Json(it.key()).dump();
        out += ": ";
        write_canonical(it.value(), out, depth + 1);
      }
      out += '\n';
      indent(out, depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i != 0) out += ",\n";
        indent(out, depth + 1);
        write_canonical(j[i], out, depth + 1);
      }
      out += '\n';
      indent(out, depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_number(j.get<double>());
      return;
    default:
      out += j.dump(-1, ' ', false, Json::error_handler_t::strict);
      return;
  }
}

}  // namespace detail

inline std::string canonical_dump(const Json& j) {
  std::string out;
  detail::write_canonical(j, out, 0);
  out += '\n';
  return out;
}

/// Parses JSON text; malformed input raises SyntaxError with line/column.
inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorCode::SyntaxError, what, line, column);
  }
}

// Schema accessors: a missing field or a wrong type is a SchemaViolation.
namespace schema {

inline const Json& field(const Json& obj, std::string_view context, const char* key) {
  if (!obj.is_object()) throw Error(ErrorCode::SchemaViolation, std::string(context) + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error(ErrorCode::SchemaViolation, std::string(context) + ": missing field '" + key + "'");
  return *it;
}

inline const Json* optional_field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

inline std::string string_of(const Json& j, std::string_view context) {
  if (!j.is_string()) throw Error(ErrorCode::SchemaViolation, std::string(context) + ": expected a string");
  return j.get<std::string>();
}

inline std::string string_field(const Json& obj, std::string_view context, const char* key) {
  return string_of(field(obj, context, key), std::string(context) + "." + key);
}

inline double number_of(const Json& j, std::string_view context) {
  if (!j.is_number()) throw Error(ErrorCode::SchemaViolation, std::string(context) + ": expected a number");
  return j.get<double>();
}

inline double number_field(const Json& obj, std::string_view context, const char* key) {
  return number_of(field(obj, context, key), std::string(context) + "." + key);
}

inline const Json& array_field(const Json& obj, std::string_view context, const char* key) {
  const Json& j = field(obj, context, key);
  if (!j.is_array())
    throw Error(ErrorCode::SchemaViolation, std::string(context) + "." + key + ": expected an array");
  return j;
}

inline const Json& object_field(const Json& obj, std::string_view context, const char* key) {
  const Json& j = field(obj, context, key);
  if (!j.is_object())
    throw Error(ErrorCode::SchemaViolation, std::string(context) + "." + key + ": expected an object");
  return j;
}

inline void expect_format(const Json& doc, std::string_view expected) {
  const std::string got = string_field(doc, "document", "format");
  if (got != expected)
    throw Error(ErrorCode::SchemaViolation,
                "unsupported format '" + got + "', expected '" + std::string(expected) + "'");
}

}  // namespace schema

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace scenario
