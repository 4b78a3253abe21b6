#pragma once

#include <string>
#include <vector>

namespace latact {

// Scalar activations selectable for any layer. Sigmoid is strictly positive;
// ReLU is zero on all of (-inf, 0]; Tanh is zero at 0. Which of these holds
// at the latent layer decides whether a trained encoder can keep its zero
// image away from the origin.
enum class ActivationKind { Identity, ReLU, Sigmoid, Tanh };

double activate(ActivationKind kind, double t);

// Derivative of activate with respect to t. The ReLU subgradient at 0 is
// defined as 0; gradient checks must probe away from the kink.
double activate_grad(ActivationKind kind, double t);

std::string to_string(ActivationKind kind);

// Parses a lowercase tag; throws listing the valid tags.
ActivationKind activation_from_string(const std::string& tag);

const std::vector<std::string>& activation_tags();

}  // namespace latact
