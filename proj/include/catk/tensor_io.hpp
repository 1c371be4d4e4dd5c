// Copyright 2026 The CATK Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "catk/error.hpp"
#include "catk/tensor.hpp"

// CATF, the on-disk tensor format shared by every subcommand:
//   bytes 0-3   magic "CATF"
//   bytes 4-7   version, u32 little-endian, currently 1
//   byte  8     rank, u8 (1..8)
//   then        rank dims, u64 little-endian each
//   then        row-major payload, IEEE-754 binary64 little-endian
// CSV is accepted as a convenience for rank <= 2 (dispatch on the ".csv"
// extension): one row per line, comma-separated; a single line reads back
// as a rank-1 tensor.

namespace catk {

inline constexpr char kCatfMagic[4] = {'C', 'A', 'T', 'F'};
inline constexpr std::uint32_t kCatfVersion = 1;
inline constexpr std::size_t kCatfMaxRank = 8;

namespace detail {

inline void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

inline std::string encode_catf(const Tensor& t) {
  std::string out;
  out.append(kCatfMagic, 4);
  detail::put_u32_le(out, kCatfVersion);
  out.push_back(static_cast<char>(t.rank()));
  for (std::size_t d : t.shape()) detail::put_u64_le(out, d);
  for (double v : t.data())
    detail::put_u64_le(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

inline Tensor decode_catf(const std::string& bytes, const std::string& path) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t n = bytes.size();
  if (n < 4 || std::memcmp(bytes.data(), kCatfMagic, 4) != 0)
    throw IoError(path, 0, "bad magic, expected \"CATF\"");
  if (n < 8) throw IoError(path, 4, "truncated before version field");
  const std::uint32_t version = detail::get_u32_le(p + 4);
  if (version != kCatfVersion)
    throw IoError(path, 4, "unsupported version " + std::to_string(version));
  if (n < 9) throw IoError(path, 8, "truncated before rank field");
  const std::size_t rank = p[8];
  if (rank == 0 || rank > kCatfMaxRank)
    throw IoError(path, 8, "invalid rank " + std::to_string(rank));
  std::uint64_t off = 9;
  if (n < off + 8 * rank)
    throw IoError(path, n, "truncated inside dimension list");
  std::vector<std::size_t> shape(rank);
  std::uint64_t count = 1;
  for (std::size_t a = 0; a < rank; ++a) {
    const std::uint64_t d = detail::get_u64_le(p + off);
    if (d == 0) throw IoError(path, off, "zero dimension");
    if (count > (std::uint64_t{1} << 32) / d)
      throw IoError(path, off, "tensor too large");
    shape[a] = static_cast<std::size_t>(d);
    count *= d;
    off += 8;
  }
  const std::uint64_t want = off + 8 * count;
  if (n != want)
    throw IoError(path, n < want ? n : want,
                  "payload length mismatch, expected " + std::to_string(want) +
                      " bytes total, got " + std::to_string(n));
  std::vector<double> data(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    data[i] = std::bit_cast<double>(detail::get_u64_le(p + off));
    off += 8;
  }
  try {
    return Tensor(std::move(shape), std::move(data));
  } catch (const InvalidInput& e) {
    throw IoError(path, 9 + 8 * rank, e.what());
  }
}

inline Tensor read_csv_tensor(const std::string& text, const std::string& path) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
          ++used;
        if (used != field.size()) throw std::invalid_argument(field);
        row.push_back(v);
      } catch (const std::exception&) {
        throw IoError(path, "line " + std::to_string(lineno) +
                                ": cannot parse \"" + field + "\" as a number");
      }
    }
    if (row.empty())
      throw IoError(path, "line " + std::to_string(lineno) + ": empty row");
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path, "line " + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path, "empty CSV");
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.front().size());
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  try {
    if (rows.size() == 1) return Tensor::vector(std::move(flat));
    return Tensor::matrix(rows.size(), rows.front().size(), std::move(flat));
  } catch (const InvalidInput& e) {
    throw IoError(path, e.what());
  }
}

inline std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError(path, "read failure");
  return std::move(buf).str();
}

/// Reads a tensor file; ".csv" files go through the CSV reader, everything
/// else is decoded as CATF.
inline Tensor read_tensor(const std::string& path) {
  const std::string bytes = slurp_file(path);
  if (detail::has_suffix(path, ".csv")) return read_csv_tensor(bytes, path);
  return decode_catf(bytes, path);
}

/// Writes a tensor; ".csv" paths get CSV (rank <= 2 only, full round-trip
/// precision), everything else CATF. read_tensor(write_tensor(t)) == t
/// bit-exactly for CATF.
inline void write_tensor(const Tensor& t, const std::string& path) {
  std::string payload;
  if (detail::has_suffix(path, ".csv")) {
    if (t.rank() > 2) throw InvalidInput("CSV output supports rank <= 2 only");
    const std::size_t cols = t.rank() == 2 ? t.shape()[1] : t.size();
    const std::size_t rows = t.size() / cols;
    char buf[64];
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", t[r * cols + c]);
        payload += buf;
        payload += (c + 1 == cols) ? '\n' : ',';
      }
    }
  } else {
    payload = encode_catf(t);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  out.flush();
  if (!out.good()) throw IoError(path, "write failure");
}

}  // namespace catk
