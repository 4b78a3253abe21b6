#include "latact/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "latact/rng.hpp"

namespace latact {

ZeroImageReport zero_image(const Encoder& f, double tau_zero) {
  if (tau_zero < 0.0) throw std::invalid_argument("tau_zero must be >= 0");
  ZeroImageReport report{f.encode(Vector::zeros(f.input_dim())), 0.0, false,
                         tau_zero};
  report.norm_sq = dot(report.zero_image, report.zero_image);
  report.is_zero = std::sqrt(report.norm_sq) <= tau_zero;
  return report;
}

std::vector<NonZeroWitness> nonzero_preservation_audit(
    const Encoder& f, const std::vector<Vector>& inputs, double tau_zero) {
  std::vector<NonZeroWitness> witnesses;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double input_norm = norm(inputs[i]);
    if (input_norm <= tau_zero) continue;  // zero inputs are exempt
    const double image_norm = norm(f.encode(inputs[i]));
    if (image_norm <= tau_zero) {
      witnesses.push_back({static_cast<int>(i), inputs[i], input_norm,
                           image_norm});
    }
  }
  return witnesses;
}

OrderAuditReport order_preservation_audit(const Encoder& f, std::uint64_t seed,
                                          int triples, double tau_order) {
  if (triples < 1) throw std::invalid_argument("triples must be >= 1");
  const int n = f.input_dim();

  OrderAuditReport report;
  report.triples_tested = triples;
  report.seed = seed;
  report.worst_margin = -std::numeric_limits<double>::infinity();

  for (int t = 0; t < triples; ++t) {
    Rng rng(mix_seed(seed, seed_stream::kOrderTriples,
                     static_cast<std::uint64_t>(t)));
    auto draw = [&] {
      std::vector<double> e(static_cast<std::size_t>(n));
      for (double& v : e) v = rng.gaussian();
      return Vector::unchecked(std::move(e));
    };
    const Vector x = draw();
    Vector u = draw();
    Vector v = draw();

    double raw_u = dot(x, u);
    double raw_v = dot(x, v);
    if (raw_u > raw_v + kRawTieTol) {
      std::swap(u, v);
      std::swap(raw_u, raw_v);
    }
    const bool tie = std::fabs(raw_u - raw_v) <= kRawTieTol;

    const Vector fx = f.encode(x);
    const double enc_u = dot(fx, f.encode(u));
    const double enc_v = dot(fx, f.encode(v));
    // For ties the condition applies in both orders, forcing encoded
    // equality; otherwise only the reversal direction counts.
    const double margin = tie ? std::fabs(enc_u - enc_v) : enc_u - enc_v;

    report.worst_margin = std::max(report.worst_margin, margin);
    if (margin > tau_order) ++report.violations;
  }
  report.violation_rate =
      static_cast<double>(report.violations) / report.triples_tested;
  return report;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NonZeroViolation:
      return "NonZeroViolation";
    case ViolationKind::OrderViolation:
      return "OrderViolation";
    case ViolationKind::NoneFound:
      return "NoneFound";
  }
  throw std::logic_error("unhandled violation kind");
}

ViolationCertificate certify_violation(const Encoder& f,
                                       const OrthogonalBasis& basis,
                                       double tau_zero, double tau_order) {
  const int n = f.input_dim();
  const int m = f.output_dim();
  if (m >= n) {
    throw std::invalid_argument(
        "certify_violation: theorem inapplicable, requires latent dim " +
        std::to_string(m) + " < input dim " + std::to_string(n));
  }
  if (basis.dim() != n) {
    throw std::invalid_argument("certify_violation: basis dim " +
                                std::to_string(basis.dim()) +
                                " does not match encoder input dim " +
                                std::to_string(n));
  }
  const ZeroImageReport zero = zero_image(f, tau_zero);
  if (!zero.is_zero) {
    char tau_text[32];
    std::snprintf(tau_text, sizeof(tau_text), "%g", tau_zero);
    throw std::invalid_argument(
        "certify_violation: f(0) is not zero under tau_zero = " +
        std::string(tau_text) +
        " (run zero_image; the encoder already meets the necessary condition)");
  }

  // Step 1: a basis vector whose image vanishes breaks non-zero preservation.
  std::vector<Vector> images;
  images.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    images.push_back(f.encode(basis[i]));
    if (norm(images.back()) <= tau_zero) {
      ViolationCertificate cert;
      cert.kind = ViolationKind::NonZeroViolation;
      cert.witness_x = basis[i];
      cert.margin = norm(basis[i]);
      return cert;
    }
  }

  // Step 2: n non-zero images in R^m with m < n cannot be mutually
  // orthogonal. The first pair whose images correlate gives the triple:
  // the raw dots <b_i, b_j> and <b_i, 0> are both (near) zero, so ordering
  // must carry over to the encoded side, but there the values differ.
  const Vector zero_input = Vector::zeros(n);
  for (int i = 0; i < n; ++i) {
    const double enc_zero = dot(images[static_cast<std::size_t>(i)],
                                zero.zero_image);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = dot(images[static_cast<std::size_t>(i)],
                           images[static_cast<std::size_t>(j)]);
      ViolationCertificate cert;
      cert.kind = ViolationKind::OrderViolation;
      cert.witness_x = basis[i];
      if (d > 0.0) {
        // Encoded similarity to b_j exceeds encoded similarity to 0.
        cert.witness_u = basis[j];
        cert.witness_v = zero_input;
        cert.raw_dots = {dot(basis[i], basis[j]), 0.0};
        cert.encoded_dots = {d, enc_zero};
      } else {
        // Encoded similarity to 0 exceeds encoded similarity to b_j.
        cert.witness_u = zero_input;
        cert.witness_v = basis[j];
        cert.raw_dots = {0.0, dot(basis[i], basis[j])};
        cert.encoded_dots = {enc_zero, d};
      }
      cert.margin = cert.encoded_dots.first - cert.encoded_dots.second;
      if (cert.margin > tau_order) return cert;
    }
  }

  return {};  // NoneFound: tolerances defeated both scans
}

RankReport encoded_rank_check(const Encoder& f, const OrthogonalBasis& basis,
                              double rank_tol) {
  const int n = basis.dim();
  if (f.input_dim() != n) {
    throw std::invalid_argument("encoded_rank_check: basis dim mismatch");
  }

  std::vector<Vector> images;
  images.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) images.push_back(f.encode(basis[i]));

  const Matrix stacked = Matrix::from_rows(images);
  RankReport report;
  report.basis_dim = n;
  report.latent_dim = f.output_dim();
  report.encoded_rank = rank(stacked, rank_tol);

  if (report.encoded_rank < n) {
    // Coefficients a with sum_i a_i * f(b_i) = 0 form the null space of the
    // transposed stack.
    const std::optional<Vector> combo =
        null_space_vector(stacked.transposed(), rank_tol);
    if (combo) report.dependent_coeffs = combo->entries();
  }
  return report;
}

double hyperplane_check(const Encoder& f, const std::vector<Vector>& inputs) {
  if (inputs.empty()) {
    throw std::invalid_argument("hyperplane_check: inputs must be nonempty");
  }
  const Vector f0 = f.encode(Vector::zeros(f.input_dim()));
  const double f0_norm_sq = dot(f0, f0);
  double worst = 0.0;
  for (const Vector& u : inputs) {
    worst = std::max(worst, std::fabs(dot(f0, f.encode(u)) - f0_norm_sq));
  }
  return worst;
}

namespace {

nlohmann::json vector_json(const Vector& v) { return v.entries(); }

nlohmann::json optional_vector_json(const std::optional<Vector>& v) {
  if (!v) return nullptr;
  return vector_json(*v);
}

}  // namespace

void to_json(nlohmann::json& j, const ZeroImageReport& r) {
  j = nlohmann::json{{"zero_image", vector_json(r.zero_image)},
                     {"norm_sq", r.norm_sq},
                     {"is_zero", r.is_zero}};
}

void to_json(nlohmann::json& j, const NonZeroWitness& w) {
  j = nlohmann::json{{"index", w.index},
                     {"input", vector_json(w.input)},
                     {"input_norm", w.input_norm},
                     {"image_norm", w.image_norm}};
}

void to_json(nlohmann::json& j, const OrderAuditReport& r) {
  j = nlohmann::json{{"triples_tested", r.triples_tested},
                     {"violations", r.violations},
                     {"violation_rate", r.violation_rate},
                     {"worst_margin", r.worst_margin},
                     {"seed", r.seed}};
}

void to_json(nlohmann::json& j, const ViolationCertificate& c) {
  j = nlohmann::json{{"kind", to_string(c.kind)},
                     {"witness_x", optional_vector_json(c.witness_x)},
                     {"witness_u", optional_vector_json(c.witness_u)},
                     {"witness_v", optional_vector_json(c.witness_v)},
                     {"raw_dots", {c.raw_dots.first, c.raw_dots.second}},
                     {"encoded_dots", {c.encoded_dots.first, c.encoded_dots.second}},
                     {"margin", c.margin}};
}

void to_json(nlohmann::json& j, const RankReport& r) {
  j = nlohmann::json{{"basis_dim", r.basis_dim},
                     {"latent_dim", r.latent_dim},
                     {"encoded_rank", r.encoded_rank},
                     {"dependent_coeffs", r.dependent_coeffs
                                              ? nlohmann::json(*r.dependent_coeffs)
                                              : nlohmann::json(nullptr)}};
}

}  // namespace latact
