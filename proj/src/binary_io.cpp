#include "icorate/binary_io.hpp"

namespace icorate {

BinaryWriter::BinaryWriter(const std::string& path, std::string_view magic, std::uint32_t version)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) throw Error("cannot open '" + path + "' for writing");
  raw(magic.data(), magic.size());
  u32(version);
}

void BinaryWriter::raw(const void* data, std::size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out_) throw Error("write failed on '" + path_ + "'");
}

void BinaryWriter::str(const std::string& s) {
  u64(s.size());
  raw(s.data(), s.size());
}

void BinaryWriter::strings(const std::vector<std::string>& items) {
  u64(items.size());
  for (const auto& s : items) str(s);
}

void BinaryWriter::vector(const Vector& v) {
  u64(static_cast<std::uint64_t>(v.size()));
  raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

void BinaryWriter::matrix(const Matrix& m) {
  // Column-major, matching Eigen's default storage.
  u64(static_cast<std::uint64_t>(m.rows()));
  u64(static_cast<std::uint64_t>(m.cols()));
  raw(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

void BinaryWriter::close() {
  out_.close();
  if (!out_) throw Error("close failed on '" + path_ + "'");
}

BinaryReader::BinaryReader(const std::string& path, std::string_view magic, std::uint32_t version)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw Error("cannot open '" + path + "'");
  std::string got(magic.size(), '\0');
  raw(got.data(), got.size());
  if (got != magic) {
    throw InvalidInput("'" + path + "' is not a " + std::string(magic) + " artifact");
  }
  const std::uint32_t v = u32();
  if (v != version) {
    throw InvalidInput("'" + path + "' has format version " + std::to_string(v) + ", expected " +
                       std::to_string(version));
  }
}

void BinaryReader::raw(void* data, std::size_t n) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (!in_) throw InvalidInput("truncated artifact '" + path_ + "'");
}

std::uint32_t BinaryReader::u32() {
  std::uint32_t v;
  raw(&v, sizeof v);
  return v;
}

std::uint64_t BinaryReader::u64() {
  std::uint64_t v;
  raw(&v, sizeof v);
  return v;
}

std::int64_t BinaryReader::i64() {
  std::int64_t v;
  raw(&v, sizeof v);
  return v;
}

double BinaryReader::f64() {
  double v;
  raw(&v, sizeof v);
  return v;
}

std::string BinaryReader::str() {
  const auto n = u64();
  if (n > (1ULL << 32)) throw InvalidInput("corrupt string length in '" + path_ + "'");
  std::string s(n, '\0');
  raw(s.data(), n);
  return s;
}

std::vector<std::string> BinaryReader::strings() {
  const auto n = u64();
  if (n > (1ULL << 32)) throw InvalidInput("corrupt list length in '" + path_ + "'");
  std::vector<std::string> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(str());
  return out;
}

Vector BinaryReader::vector() {
  const auto n = u64();
  if (n > (1ULL << 34)) throw InvalidInput("corrupt vector length in '" + path_ + "'");
  Vector v(static_cast<Index>(n));
  raw(v.data(), sizeof(double) * n);
  return v;
}

Matrix BinaryReader::matrix() {
  const auto rows = u64();
  const auto cols = u64();
  if (rows > (1ULL << 32) || cols > (1ULL << 32)) {
    throw InvalidInput("corrupt matrix shape in '" + path_ + "'");
  }
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  raw(m.data(), sizeof(double) * rows * cols);
  return m;
}

}  // namespace icorate
