#include "wkbgo/report.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace wkbgo {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256_hex: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

nlohmann::json make_report(const std::string& command, const std::string& scenario_sha256,
                           const nlohmann::json& resolved, const nlohmann::json& results) {
  nlohmann::json r;
  r["tool"] = kToolName;
  r["version"] = kToolVersion;
  r["command"] = command;
  r["scenario_sha256"] = scenario_sha256;
  r["resolved"] = resolved;
  r["results"] = results;
  r["content_sha256"] = sha256_hex(r.dump());
  return r;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) { row(std::move(header)); }

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != columns_) throw std::invalid_argument("CsvTable: row width differs from header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      text_ += c;
    } else {
      text_ += '"';
      for (char ch : c) {
        if (ch == '"') text_ += '"';
        text_ += ch;
      }
      text_ += '"';
    }
  }
  text_ += '\n';
  return *this;
}

std::string CsvTable::str() const { return text_; }

}  // namespace wkbgo
