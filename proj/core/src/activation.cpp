#include "latact/activation.hpp"

#include <cmath>
#include <stdexcept>

namespace latact {

namespace {

double sigmoid(double t) {
  // Branch on sign so the exponent never overflows.
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

double activate(ActivationKind kind, double t) {
  switch (kind) {
    case ActivationKind::Identity:
      return t;
    case ActivationKind::ReLU:
      return t > 0.0 ? t : 0.0;
    case ActivationKind::Sigmoid:
      return sigmoid(t);
    case ActivationKind::Tanh:
      return std::tanh(t);
  }
  throw std::logic_error("unhandled activation kind");
}

double activate_grad(ActivationKind kind, double t) {
  switch (kind) {
    case ActivationKind::Identity:
      return 1.0;
    case ActivationKind::ReLU:
      return t > 0.0 ? 1.0 : 0.0;
    case ActivationKind::Sigmoid: {
      const double s = sigmoid(t);
      return s * (1.0 - s);
    }
    case ActivationKind::Tanh: {
      const double th = std::tanh(t);
      return 1.0 - th * th;
    }
  }
  throw std::logic_error("unhandled activation kind");
}

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Identity:
      return "identity";
    case ActivationKind::ReLU:
      return "relu";
    case ActivationKind::Sigmoid:
      return "sigmoid";
    case ActivationKind::Tanh:
      return "tanh";
  }
  throw std::logic_error("unhandled activation kind");
}

const std::vector<std::string>& activation_tags() {
  static const std::vector<std::string> tags = {"identity", "relu", "sigmoid",
                                                "tanh"};
  return tags;
}

ActivationKind activation_from_string(const std::string& tag) {
  if (tag == "identity") return ActivationKind::Identity;
  if (tag == "relu") return ActivationKind::ReLU;
  if (tag == "sigmoid") return ActivationKind::Sigmoid;
  if (tag == "tanh") return ActivationKind::Tanh;
  std::string valid;
  for (const std::string& t : activation_tags()) {
    if (!valid.empty()) valid += ", ";
    valid += t;
  }
  throw std::invalid_argument("unknown activation '" + tag +
                              "' (valid: " + valid + ")");
}

}  // namespace latact
