#include "latact/encoder.hpp"

#include <stdexcept>
#include <string>

namespace latact {

Vector LinearEncoder::encode(const Vector& x) const { return matvec(a_, x); }

Vector CallableEncoder::encode(const Vector& x) const {
  if (x.dim() != input_dim_) {
    throw std::invalid_argument("encode: input dim " + std::to_string(x.dim()) +
                                " does not match encoder input dim " +
                                std::to_string(input_dim_));
  }
  Vector out = fn_(x);
  if (out.dim() != output_dim_) {
    throw std::logic_error("encoder callable returned dim " +
                           std::to_string(out.dim()) + ", expected " +
                           std::to_string(output_dim_));
  }
  return out;
}

}  // namespace latact
