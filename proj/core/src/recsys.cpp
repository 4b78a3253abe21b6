#include "latact/recsys.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "latact/errors.hpp"
#include "latact/rng.hpp"

namespace latact {

namespace {

void check_unique_ids(const std::vector<Entity>& entities, const char* kind) {
  std::set<std::string> seen;
  for (const Entity& e : entities) {
    if (!seen.insert(e.id).second) {
      throw std::invalid_argument("duplicate " + std::string(kind) + " id '" +
                                  e.id + "'");
    }
  }
}

}  // namespace

Dataset::Dataset(std::vector<Entity> users, std::vector<Entity> items)
    : users_(std::move(users)), items_(std::move(items)) {
  if (users_.empty() && items_.empty()) {
    throw std::invalid_argument("dataset is empty");
  }
  dim_ = users_.empty() ? items_.front().vec.dim() : users_.front().vec.dim();
  for (const Entity& e : users_) {
    if (e.vec.dim() != dim_) {
      throw std::invalid_argument("user '" + e.id + "' has dim " +
                                  std::to_string(e.vec.dim()) + ", expected " +
                                  std::to_string(dim_));
    }
  }
  for (const Entity& e : items_) {
    if (e.vec.dim() != dim_) {
      throw std::invalid_argument("item '" + e.id + "' has dim " +
                                  std::to_string(e.vec.dim()) + ", expected " +
                                  std::to_string(dim_));
    }
  }
  check_unique_ids(users_, "user");
  check_unique_ids(items_, "item");
}

std::vector<Vector> Dataset::all_vectors() const {
  std::vector<Vector> out;
  out.reserve(users_.size() + items_.size());
  for (const Entity& e : users_) out.push_back(e.vec);
  for (const Entity& e : items_) out.push_back(e.vec);
  return out;
}

namespace {

RankingResult rank_scored(const std::string& query_id,
                          std::vector<std::pair<std::string, double>> scored,
                          int k) {
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  const std::size_t keep =
      std::min(scored.size(), static_cast<std::size_t>(k));
  scored.resize(keep);
  return RankingResult{query_id, std::move(scored), k};
}

}  // namespace

RankingResult top_k(const std::string& query_id, const Vector& query,
                    const std::vector<Entity>& items, int k) {
  if (k < 1) throw std::invalid_argument("top_k: k must be >= 1");
  if (items.empty()) throw std::invalid_argument("top_k: item list is empty");
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(items.size());
  for (const Entity& item : items) {
    scored.emplace_back(item.id, dot(query, item.vec));
  }
  return rank_scored(query_id, std::move(scored), k);
}

RankingResult top_k_latent(const Encoder& f, const std::string& query_id,
                           const Vector& query, const std::vector<Entity>& items,
                           int k) {
  if (k < 1) throw std::invalid_argument("top_k: k must be >= 1");
  if (items.empty()) throw std::invalid_argument("top_k: item list is empty");
  const Vector latent_query = f.encode(query);
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(items.size());
  for (const Entity& item : items) {
    scored.emplace_back(item.id, dot(latent_query, f.encode(item.vec)));
  }
  return rank_scored(query_id, std::move(scored), k);
}

double kendall_tau(const RankingResult& r1, const RankingResult& r2) {
  std::map<std::string, double> s1, s2;
  for (const auto& [id, score] : r1.ranked_items) s1[id] = score;
  for (const auto& [id, score] : r2.ranked_items) s2[id] = score;
  if (s1.size() != r1.ranked_items.size() ||
      s2.size() != r2.ranked_items.size()) {
    throw std::invalid_argument("kendall_tau: rankings contain duplicate ids");
  }
  if (s1.size() != s2.size()) {
    throw std::invalid_argument("kendall_tau: rankings cover different item sets");
  }
  std::vector<std::pair<double, double>> scores;
  scores.reserve(s1.size());
  for (const auto& [id, score] : s1) {
    const auto it = s2.find(id);
    if (it == s2.end()) {
      throw std::invalid_argument("kendall_tau: item '" + id +
                                  "' missing from second ranking");
    }
    scores.emplace_back(score, it->second);
  }

  const std::size_t n = scores.size();
  if (n < 2) return 1.0;
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d1 = scores[i].first - scores[j].first;
      const double d2 = scores[i].second - scores[j].second;
      if (d1 == 0.0 || d2 == 0.0) continue;  // ties count as neither
      if ((d1 > 0.0) == (d2 > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
  return static_cast<double>(concordant - discordant) / pairs;
}

AgreementReport evaluate_agreement(const Dataset& dataset, const Encoder& f,
                                   int k, std::uint64_t seed,
                                   double tau_order) {
  (void)seed;
  if (k < 1) throw std::invalid_argument("evaluate_agreement: k must be >= 1");
  const std::vector<Entity>& items = dataset.items();
  if (items.empty()) {
    throw std::invalid_argument("evaluate_agreement: dataset has no items");
  }
  if (k > static_cast<int>(items.size())) {
    throw std::invalid_argument("evaluate_agreement: k exceeds item count");
  }
  if (f.input_dim() != dataset.dim()) {
    throw std::invalid_argument("evaluate_agreement: encoder input dim " +
                                std::to_string(f.input_dim()) +
                                " does not match dataset dim " +
                                std::to_string(dataset.dim()));
  }

  // Encode items once; full scans reuse the latent copies.
  std::vector<Entity> latent_items;
  latent_items.reserve(items.size());
  for (const Entity& item : items) {
    latent_items.push_back({item.id, f.encode(item.vec)});
  }

  AgreementReport report;
  const int full = static_cast<int>(items.size());
  double tau_sum = 0.0, overlap_sum = 0.0;
  for (const Entity& user : dataset.users()) {
    const RankingResult raw = top_k(user.id, user.vec, items, full);
    const RankingResult latent =
        top_k(user.id, f.encode(user.vec), latent_items, full);

    UserAgreement ua;
    ua.user_id = user.id;
    ua.tau = kendall_tau(raw, latent);

    std::set<std::string> raw_top, latent_top;
    for (int i = 0; i < k; ++i) {
      raw_top.insert(raw.ranked_items[static_cast<std::size_t>(i)].first);
      latent_top.insert(latent.ranked_items[static_cast<std::size_t>(i)].first);
    }
    int common = 0;
    for (const std::string& id : raw_top) common += latent_top.count(id);
    ua.topk_overlap = static_cast<double>(common) / k;

    double lo = latent.ranked_items.front().second;
    double hi = lo;
    for (const auto& [id, score] : latent.ranked_items) {
      lo = std::min(lo, score);
      hi = std::max(hi, score);
    }
    ua.collapsed = (hi - lo) <= tau_order;
    if (ua.collapsed) report.collapse_flags.push_back(user.id);

    tau_sum += ua.tau;
    overlap_sum += ua.topk_overlap;
    report.per_user.push_back(std::move(ua));
  }

  const double n_users = static_cast<double>(dataset.users().size());
  if (n_users > 0) {
    report.kendall_tau = tau_sum / n_users;
    report.topk_overlap = overlap_sum / n_users;
  }
  return report;
}

namespace {

std::string padded_id(char prefix, int index, int count) {
  int width = 1;
  for (int v = count - 1; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(index);
  std::string out(1, prefix);
  out.append(static_cast<std::size_t>(width) - digits.size(), '0');
  out += digits;
  return out;
}

}  // namespace

Dataset synth_dataset(int n_users, int n_items, int dim, double sparsity,
                      std::uint64_t seed) {
  if (n_users < 1 || n_items < 1 || dim < 1) {
    throw std::invalid_argument("synth_dataset: counts and dim must be >= 1");
  }
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw std::invalid_argument("synth_dataset: sparsity must lie in [0, 1)");
  }
  Rng rng(seed);

  const int r = std::max(2, dim / 4);
  std::vector<std::vector<double>> factors(
      static_cast<std::size_t>(r), std::vector<double>(static_cast<std::size_t>(dim)));
  for (auto& row : factors) {
    for (double& v : row) v = rng.gaussian();
  }

  auto draw_vector = [&] {
    while (true) {
      std::vector<double> coeffs(static_cast<std::size_t>(r));
      for (double& c : coeffs) c = rng.gaussian();
      std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
      for (int i = 0; i < r; ++i) {
        for (int j = 0; j < dim; ++j) {
          v[static_cast<std::size_t>(j)] +=
              coeffs[static_cast<std::size_t>(i)] *
              factors[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
      }
      bool any_nonzero = false;
      for (double& x : v) {
        if (rng.uniform() < sparsity) x = 0.0;
        any_nonzero = any_nonzero || x != 0.0;
      }
      if (any_nonzero) return Vector::unchecked(std::move(v));
    }
  };

  std::vector<Entity> users, items;
  users.reserve(static_cast<std::size_t>(n_users));
  items.reserve(static_cast<std::size_t>(n_items));
  for (int i = 0; i < n_users; ++i) {
    users.push_back({padded_id('u', i, n_users), draw_vector()});
  }
  for (int i = 0; i < n_items; ++i) {
    items.push_back({padded_id('i', i, n_items), draw_vector()});
  }
  return Dataset(std::move(users), std::move(items));
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open dataset file '" + path.string() +
                                "'");
  }

  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) throw ParseError("empty file, expected header", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_row(line);
  if (header.size() < 3 || header[0] != "kind" || header[1] != "id") {
    throw ParseError("expected header 'kind,id,v0,...'", line_no);
  }
  const int dim = static_cast<int>(header.size()) - 2;

  std::vector<Entity> users, items;
  std::set<std::string> user_ids, item_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_row(line);
    if (static_cast<int>(fields.size()) != dim + 2) {
      throw ParseError("row has " + std::to_string(fields.size()) +
                           " columns, expected " + std::to_string(dim + 2),
                       line_no);
    }
    const std::string& kind = fields[0];
    const std::string& id = fields[1];
    if (kind != "user" && kind != "item") {
      throw ParseError("kind must be 'user' or 'item', got '" + kind + "'",
                       line_no);
    }
    if (id.empty()) throw ParseError("empty id", line_no);

    std::vector<double> entries(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      const std::string& tok = fields[static_cast<std::size_t>(i) + 2];
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (tok.empty() || end != tok.c_str() + tok.size()) {
        throw ParseError("non-numeric value '" + tok + "' in column v" +
                             std::to_string(i),
                         line_no);
      }
      if (errno == ERANGE || !std::isfinite(v)) {
        throw ParseError("value '" + tok + "' in column v" + std::to_string(i) +
                             " is not finite",
                         line_no);
      }
      entries[static_cast<std::size_t>(i)] = v;
    }

    auto& ids = (kind == "user") ? user_ids : item_ids;
    if (!ids.insert(id).second) {
      throw ParseError("duplicate " + kind + " id '" + id + "'", line_no);
    }
    auto& list = (kind == "user") ? users : items;
    list.push_back({id, Vector::unchecked(std::move(entries))});
  }

  if (users.empty() && items.empty()) {
    throw ParseError("file contains no data rows", line_no);
  }
  return Dataset(std::move(users), std::move(items));
}

void to_json(nlohmann::json& j, const AgreementReport& r) {
  j = nlohmann::json{{"kendall_tau", r.kendall_tau},
                     {"topk_overlap", r.topk_overlap},
                     {"collapse_flags", r.collapse_flags}};
}

}  // namespace latact
