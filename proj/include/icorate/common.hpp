#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace icorate {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = Vec<double>;
using Matrix = Mat<double>;
using Index = Eigen::Index;

/// Base class of every error the library raises.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input that violates a documented precondition or file schema.
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// Shape mismatch between vectors / matrices handed to an operation.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

template <std::floating_point Scalar>
inline Scalar sigmoid(Scalar z) {
  if (z >= Scalar(0)) {
    return Scalar(1) / (Scalar(1) + std::exp(-z));
  }
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

/// Elementwise logistic function, usable on any Eigen expression.
template <class Derived>
inline auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return sigmoid(v); });
}

inline double log_sum_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// 64-bit FNV-1a. Stable across platforms; used to derive per-item seeds and config hashes.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

inline void require_dims(bool condition, const std::string& message) {
  if (!condition) throw DimensionMismatch(message);
}

}  // namespace icorate
