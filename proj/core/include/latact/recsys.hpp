#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "latact/encoder.hpp"
#include "latact/linalg.hpp"
#include "latact/properties.hpp"

namespace latact {

struct Entity {
  std::string id;
  Vector vec;
};

/// User and item feature vectors sharing one dimension, with unique ids
/// within each list.
class Dataset {
 public:
  Dataset(std::vector<Entity> users, std::vector<Entity> items);

  int dim() const { return dim_; }
  const std::vector<Entity>& users() const { return users_; }
  const std::vector<Entity>& items() const { return items_; }
  std::vector<Vector> all_vectors() const;  // users then items, training data

 private:
  int dim_ = 0;
  std::vector<Entity> users_;
  std::vector<Entity> items_;
};

struct RankingResult {
  std::string query_id;
  std::vector<std::pair<std::string, double>> ranked_items;  // score desc
  int k = 0;
};

// Exact full-scan dot-product scoring; ties broken by ascending item id.
// Returns min(k, item count) entries.
RankingResult top_k(const std::string& query_id, const Vector& query,
                    const std::vector<Entity>& items, int k);

// Same, but scores <f(query), f(item)>.
RankingResult top_k_latent(const Encoder& f, const std::string& query_id,
                           const Vector& query, const std::vector<Entity>& items,
                           int k);

// Kendall tau-a between two full rankings of the same item set:
// (concordant - discordant) / C(N,2) over all item pairs, with score ties
// counting as neither. Degenerate single-item rankings give 1.0.
double kendall_tau(const RankingResult& r1, const RankingResult& r2);

struct UserAgreement {
  std::string user_id;
  double tau = 0.0;
  double topk_overlap = 0.0;
  bool collapsed = false;
};

struct AgreementReport {
  double kendall_tau = 0.0;   // mean over users
  double topk_overlap = 0.0;  // mean over users
  std::vector<std::string> collapse_flags;
  std::vector<UserAgreement> per_user;
};

// Per-user raw vs latent rankings over the full item list. A user collapses
// when max - min of its latent scores is <= tau_order: the encoded query
// then carries no ranking information. The seed is reserved for sampled
// evaluation; the exhaustive evaluation here does not consume randomness.
AgreementReport evaluate_agreement(const Dataset& dataset, const Encoder& f,
                                   int k, std::uint64_t seed,
                                   double tau_order = kDefaultTauOrder);

// Seeded latent-factor data: one rank-r factor matrix (r = max(2, dim/4)),
// per-entity Gaussian coefficients, then a sparsity fraction of entries
// zeroed. Rows that end up all-zero are redrawn.
Dataset synth_dataset(int n_users, int n_items, int dim, double sparsity,
                      std::uint64_t seed);

// CSV layout: header "kind,id,v0,...", then one row per entity with
// kind in {user, item}. Errors name the offending row or id.
Dataset load_csv(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const AgreementReport& r);

}  // namespace latact
