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

#ifndef DEEPGP_IO_HPP
#define DEEPGP_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json_util.hpp"

namespace deepgp {

// Tensor container: "DGPT", little-endian u32 header length, a JSON header
// {"dtype": "float64", "shape": [...], "meta": {...}}, then the values as
// little-endian float64 in row-major order.
struct Tensor {
  std::vector<std::uint64_t> shape;
  std::vector<double> data;
  json meta = json::object();
};

std::string encode_tensor(const Tensor& t);
Tensor decode_tensor(const std::string& bytes);

/// Parses a numeric CSV with a header row. Returns column names and rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string hex64(std::uint64_t v);

std::string read_file(const std::string& path);

}  // namespace deepgp

#endif  // DEEPGP_IO_HPP
