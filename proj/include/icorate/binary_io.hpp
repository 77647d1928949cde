#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "icorate/common.hpp"

namespace icorate {

// Artifacts are little-endian. Doubles are stored as their IEEE-754 bit pattern so that
// a save/load round trip is bit-exact.
static_assert(std::endian::native == std::endian::little, "artifact I/O assumes a little-endian host");

class BinaryWriter {
public:
  BinaryWriter(const std::string& path, std::string_view magic, std::uint32_t version);

  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void str(const std::string& s);
  void strings(const std::vector<std::string>& items);
  void vector(const Vector& v);
  void matrix(const Matrix& m);
  void close();

private:
  void raw(const void* data, std::size_t n);

  std::ofstream out_;
  std::string path_;
};

class BinaryReader {
public:
  /// Opens and checks the header; throws when the magic or version differ.
  BinaryReader(const std::string& path, std::string_view magic, std::uint32_t version);

  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64();
  double f64();
  std::string str();
  std::vector<std::string> strings();
  Vector vector();
  Matrix matrix();

private:
  void raw(void* data, std::size_t n);

  std::ifstream in_;
  std::string path_;
};

}  // namespace icorate
