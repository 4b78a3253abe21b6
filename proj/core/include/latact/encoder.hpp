#pragma once

#include <functional>
#include <utility>

#include "latact/linalg.hpp"

namespace latact {

/// Anything that maps R^n -> R^m. The audits and the retrieval pipeline are
/// written against this interface so they can interrogate trained networks,
/// plain linear maps, and hand-built test encoders alike.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;
  virtual Vector encode(const Vector& x) const = 0;
};

/// f(x) = A x.
class LinearEncoder final : public Encoder {
 public:
  explicit LinearEncoder(Matrix a) : a_(std::move(a)) {}

  int input_dim() const override { return a_.cols(); }
  int output_dim() const override { return a_.rows(); }
  Vector encode(const Vector& x) const override;

  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
};

/// Wraps an arbitrary function as an encoder; input and output dims are
/// checked on every call.
class CallableEncoder final : public Encoder {
 public:
  CallableEncoder(int input_dim, int output_dim,
                  std::function<Vector(const Vector&)> fn)
      : input_dim_(input_dim), output_dim_(output_dim), fn_(std::move(fn)) {}

  int input_dim() const override { return input_dim_; }
  int output_dim() const override { return output_dim_; }
  Vector encode(const Vector& x) const override;

 private:
  int input_dim_;
  int output_dim_;
  std::function<Vector(const Vector&)> fn_;
};

}  // namespace latact
