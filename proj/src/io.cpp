/*
 * Copyright 2026 The deepgp-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace deepgp {

namespace {

constexpr char kMagic[4] = {'D', 'G', 'P', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const std::string& s, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_tensor(const Tensor& t) {
  std::uint64_t count = 1;
  for (auto d : t.shape) count *= d;
  if (count != t.data.size()) fail(ErrorKind::Domain, "tensor shape does not match its data");
  const std::string header = json{{"dtype", "float64"}, {"shape", t.shape}, {"meta", t.meta}}.dump();
  std::string out(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  out.reserve(out.size() + 8 * t.data.size());
  for (double v : t.data) put_f64(out, v);
  return out;
}

Tensor decode_tensor(const std::string& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    fail(ErrorKind::Validation, "not a DGPT tensor file");
  const auto hlen = get_le(bytes, 4, 4);
  if (8 + hlen > bytes.size()) fail(ErrorKind::Validation, "truncated tensor header");
  json header;
  try {
    header = json::parse(bytes.substr(8, hlen));
  } catch (const json::exception& e) {
    fail(ErrorKind::Validation, std::string("bad tensor header: ") + e.what());
  }
  if (header.value("dtype", "") != "float64") fail(ErrorKind::Validation, "unsupported tensor dtype");
  Tensor t;
  t.shape = header.at("shape").get<std::vector<std::uint64_t>>();
  t.meta = header.value("meta", json::object());
  std::uint64_t count = 1;
  for (auto d : t.shape) count *= d;
  const std::size_t base = 8 + hlen;
  if (bytes.size() != base + 8 * count) fail(ErrorKind::Validation, "tensor payload size mismatch");
  t.data.resize(count);
  for (std::uint64_t i = 0; i < count; ++i)
    t.data[i] = std::bit_cast<double>(get_le(bytes, base + 8 * i, 8));
  return t;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  fail(ErrorKind::Validation, "CSV has no column '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    if (!l.empty() && l.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(in, line)) fail(ErrorKind::Validation, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size())
      fail(ErrorKind::Validation, "CSV line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                                      " fields, expected " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[v & 0xf];
    v >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Validation, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace deepgp
