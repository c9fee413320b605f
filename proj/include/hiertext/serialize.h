// Copyright 2026 The hiertext Authors.
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

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "hiertext/error.h"
#include "hiertext/matrix.h"

// Little-endian binary checkpoint primitives. Doubles are copied bit-for-bit
// through uint64, so round trips are exact.
namespace hiertext::io {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

inline void write_double(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  write_u64(out, bits);
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_magic(std::ostream& out, const char magic[5]) { out.write(magic, 4); }

inline void write_matrix(std::ostream& out, const Matrix& m) {
  write_u64(out, m.rows());
  write_u64(out, m.cols());
  for (double v : m.flat()) write_double(out, v);
}

inline void write_vector(std::ostream& out, const Vector& v) {
  write_u64(out, v.size());
  for (double x : v) write_double(out, x);
}

inline void fail_if_eof(std::istream& in) {
  if (!in) throw BadCheckpoint("truncated checkpoint");
}

inline std::uint32_t read_u32(std::istream& in) {
  char buf[4];
  in.read(buf, 4);
  fail_if_eof(in);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

inline std::uint64_t read_u64(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  fail_if_eof(in);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

inline double read_double(std::istream& in) {
  std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

inline std::string read_string(std::istream& in) {
  std::string s(read_u64(in), '\0');
  in.read(s.data(), static_cast<std::streamsize>(s.size()));
  fail_if_eof(in);
  return s;
}

inline void read_magic(std::istream& in, const char magic[5]) {
  char buf[4];
  in.read(buf, 4);
  fail_if_eof(in);
  if (std::memcmp(buf, magic, 4) != 0) throw BadCheckpoint("bad checkpoint magic");
}

inline Matrix read_matrix(std::istream& in) {
  const std::size_t rows = read_u64(in);
  const std::size_t cols = read_u64(in);
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = read_double(in);
  return m;
}

inline Vector read_vector(std::istream& in) {
  Vector v(read_u64(in));
  for (double& x : v) x = read_double(in);
  return v;
}

}  // namespace hiertext::io
