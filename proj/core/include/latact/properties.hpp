#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "latact/encoder.hpp"
#include "latact/linalg.hpp"

namespace latact {

// Absolute tolerance under which an image counts as the zero vector
// (inputs are assumed to be of unit scale).
inline constexpr double kDefaultTauZero = 1e-9;
// Tolerance for an encoded dot-product order reversal to count.
inline constexpr double kDefaultTauOrder = 1e-9;
// Raw dot products closer than this are treated as ties, which force the
// encoded values to agree in either order.
inline constexpr double kRawTieTol = 1e-12;

// f(0) and whether it vanishes under tau_zero. A dimension-reducing encoder
// that preserves similarity order and non-zero vectors must keep f(0) away
// from the origin; a strictly positive latent activation guarantees that
// unconditionally, while ReLU and tanh latents can be driven to f(0) = 0.
struct ZeroImageReport {
  Vector zero_image;
  double norm_sq = 0.0;
  bool is_zero = false;
  double tau_zero = kDefaultTauZero;  // tolerance the flag was computed under
};

ZeroImageReport zero_image(const Encoder& f, double tau_zero = kDefaultTauZero);

// A non-zero input whose image vanished.
struct NonZeroWitness {
  int index = 0;  // position in the audited input list
  Vector input;
  double input_norm = 0.0;
  double image_norm = 0.0;
};

std::vector<NonZeroWitness> nonzero_preservation_audit(
    const Encoder& f, const std::vector<Vector>& inputs,
    double tau_zero = kDefaultTauZero);

struct OrderAuditReport {
  int triples_tested = 0;
  int violations = 0;
  double violation_rate = 0.0;
  double worst_margin = 0.0;
  std::uint64_t seed = 0;
};

// Draws seeded Gaussian triples (x, u, v), orders each pair so the raw dots
// satisfy <x,u> <= <x,v>, and counts encoded reversals beyond tau_order.
// Each triple's draw depends only on (seed, triple index).
OrderAuditReport order_preservation_audit(const Encoder& f, std::uint64_t seed,
                                          int triples,
                                          double tau_order = kDefaultTauOrder);

enum class ViolationKind { NonZeroViolation, OrderViolation, NoneFound };

std::string to_string(ViolationKind kind);

// Constructive witness that an encoder breaks one of the audited conditions.
// For an OrderViolation the raw dots satisfy <x,u> <= <x,v> (within the tie
// tolerance) while the encoded dots reverse by more than tau_order. For a
// NonZeroViolation the witness input is non-zero but its image vanishes.
struct ViolationCertificate {
  ViolationKind kind = ViolationKind::NoneFound;
  std::optional<Vector> witness_x;
  std::optional<Vector> witness_u;
  std::optional<Vector> witness_v;
  std::pair<double, double> raw_dots{0.0, 0.0};
  std::pair<double, double> encoded_dots{0.0, 0.0};
  double margin = 0.0;
};

// The violation that must exist for any dimension-reducing encoder whose
// zero image vanishes, found deterministically over the given basis:
//
//   1. If some basis vector's image vanishes, that is a non-zero-preservation
//      witness.
//   2. Otherwise the n images live in R^m with m < n, so they cannot be
//      mutually orthogonal; the first basis pair (scanned in lexicographic
//      order) whose images have a dot product beyond tau_order yields an
//      order-violating triple (x, u, v) with v = 0 or u = 0, because
//      <b_i, b_j> = <b_i, 0> = 0 while the encoded dots differ.
//
// Preconditions: f.output_dim() < f.input_dim(), the basis spans the input
// space, and norm(f(0)) <= tau_zero; violations throw std::invalid_argument.
// NoneFound is returned only when numerics defeat both scans, which signals
// a tolerance misconfiguration rather than a sound encoder.
ViolationCertificate certify_violation(const Encoder& f,
                                       const OrthogonalBasis& basis,
                                       double tau_zero = kDefaultTauZero,
                                       double tau_order = kDefaultTauOrder);

struct RankReport {
  int basis_dim = 0;
  int latent_dim = 0;
  int encoded_rank = 0;
  // A nontrivial combination with sum_i coeffs[i] * f(b_i) ~ 0, present
  // exactly when encoded_rank < basis_dim. Unit L2 norm.
  std::optional<std::vector<double>> dependent_coeffs;
};

// Stacks the encoded basis as matrix rows and reports its numerical rank.
// An encoder that kept the basis images orthogonal and non-zero would need
// encoded_rank = n, which is impossible when the latent width m is < n.
RankReport encoded_rank_check(const Encoder& f, const OrthogonalBasis& basis,
                              double rank_tol = kRankTol);

// max over inputs of |<f(0), f(u)> - |f(0)|^2|. If the encoder preserved
// similarity order exactly this would be 0 for every input: every image
// would lie in one hyperplane normal to f(0). For trained encoders it
// measures how far that premise is from holding.
double hyperplane_check(const Encoder& f, const std::vector<Vector>& inputs);

// JSON serialization (field names match the struct fields; see README).
void to_json(nlohmann::json& j, const ZeroImageReport& r);
void to_json(nlohmann::json& j, const NonZeroWitness& w);
void to_json(nlohmann::json& j, const OrderAuditReport& r);
void to_json(nlohmann::json& j, const ViolationCertificate& c);
void to_json(nlohmann::json& j, const RankReport& r);

}  // namespace latact
