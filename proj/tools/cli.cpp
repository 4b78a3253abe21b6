#include "cli.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "latact/errors.hpp"
#include "latact/model_io.hpp"
#include "latact/nn.hpp"
#include "latact/properties.hpp"
#include "latact/recsys.hpp"
#include "latact/rng.hpp"

namespace fs = std::filesystem;

namespace latact::cli {

namespace {

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct SynthSpec {
  int users = 0;
  int items = 0;
  int dim = 0;
};

SynthSpec parse_synth_spec(const std::string& text) {
  SynthSpec spec;
  char extra = '\0';
  if (std::sscanf(text.c_str(), "%dx%dx%d%c", &spec.users, &spec.items,
                  &spec.dim, &extra) != 3 ||
      spec.users < 1 || spec.items < 1 || spec.dim < 1) {
    throw std::invalid_argument("--synth expects USERSxITEMSxDIM with positive "
                                "integers, e.g. 100x500x32, got '" +
                                text + "'");
  }
  return spec;
}

fs::path prepare_out_dir(const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<Vector> sample_gaussian_inputs(int count, int dim,
                                           std::uint64_t seed) {
  std::vector<Vector> inputs;
  inputs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, seed_stream::kAuditInputs,
                     static_cast<std::uint64_t>(i)));
    std::vector<double> e(static_cast<std::size_t>(dim));
    for (double& v : e) v = rng.gaussian();
    inputs.push_back(Vector::unchecked(std::move(e)));
  }
  return inputs;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data_path;
  std::string synth_spec;
  double sparsity = 0.0;
  int input_dim = 0;  // 0 = derive from data
  int latent = 0;
  std::string activation = "sigmoid";
  std::vector<int> hidden;
  std::string hidden_activation = "tanh";
  int epochs = 100;
  double learning_rate = 0.05;
  int batch_size = 32;
  double init_scale = 1.0;
  std::uint64_t seed = 1;
  bool enforce_compression = true;
  std::string out_dir = ".";
};

int run_train(const TrainArgs& args) {
  // Reject impossible shapes before touching any data.
  int declared_dim = args.input_dim;
  if (!args.synth_spec.empty()) {
    const SynthSpec spec = parse_synth_spec(args.synth_spec);
    if (declared_dim > 0 && declared_dim != spec.dim) {
      throw std::invalid_argument("--input-dim " + std::to_string(declared_dim) +
                                  " contradicts --synth dim " +
                                  std::to_string(spec.dim));
    }
    declared_dim = spec.dim;
  }
  if (args.enforce_compression && declared_dim > 0 && args.latent > declared_dim) {
    throw std::invalid_argument(
        "--latent " + std::to_string(args.latent) + " exceeds input dim " +
        std::to_string(declared_dim) +
        " while --enforce-compression is on; a compressing encoder needs "
        "latent <= input (pass --no-enforce-compression for control runs)");
  }
  if (args.data_path.empty() == args.synth_spec.empty()) {
    throw std::invalid_argument("exactly one of --data or --synth is required");
  }

  std::optional<Dataset> dataset;
  if (!args.data_path.empty()) {
    dataset.emplace(load_csv(args.data_path));
  } else {
    const SynthSpec spec = parse_synth_spec(args.synth_spec);
    dataset.emplace(
        synth_dataset(spec.users, spec.items, spec.dim, args.sparsity, args.seed));
  }
  const int n = dataset->dim();
  if (args.input_dim > 0 && args.input_dim != n) {
    throw std::invalid_argument("--input-dim " + std::to_string(args.input_dim) +
                                " does not match dataset dim " +
                                std::to_string(n));
  }
  if (args.enforce_compression && args.latent > n) {
    throw std::invalid_argument(
        "--latent " + std::to_string(args.latent) + " exceeds input dim " +
        std::to_string(n) + " while --enforce-compression is on");
  }

  const EncoderSpec spec = EncoderSpec::with_hidden(
      n, args.hidden, args.latent, activation_from_string(args.hidden_activation),
      activation_from_string(args.activation));
  MlpModel model = MlpModel::init_random(spec, args.seed, args.init_scale);

  TrainConfig cfg;
  cfg.learning_rate = args.learning_rate;
  cfg.epochs = args.epochs;
  cfg.batch_size = args.batch_size;
  cfg.seed = args.seed;
  cfg.init_scale = args.init_scale;
  TrainResult result = train(std::move(model), dataset->all_vectors(), cfg);

  const fs::path dir = prepare_out_dir(args.out_dir);
  save_model(result.model, dir / "model.txt");

  std::ostringstream loss_csv;
  loss_csv << "epoch,loss\n";
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    loss_csv << e << ',' << fmt_real(result.loss_history[e]) << '\n';
  }
  write_text_atomic(dir / "loss.csv", loss_csv.str());

  std::cout << "trained " << n << " -> " << args.latent << " ("
            << args.activation << " latent) on " << dataset->all_vectors().size()
            << " vectors for " << args.epochs << " epochs\n";
  if (!result.loss_history.empty()) {
    std::cout << "loss: " << fmt_real(result.loss_history.front()) << " -> "
              << fmt_real(result.loss_history.back()) << '\n';
  }
  std::cout << "wrote " << (dir / "model.txt").string() << " and "
            << (dir / "loss.csv").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

struct AuditArgs {
  std::string model_path;
  std::uint64_t seed = 1;
  int triples = 1000;
  int samples = 200;
  double tau_zero = kDefaultTauZero;
  double tau_order = kDefaultTauOrder;
  bool random_basis = false;
  std::string out_dir = ".";
};

int run_audit(const AuditArgs& args) {
  const MlpModel model = load_model(args.model_path);
  const int n = model.input_dim();
  const int m = model.latent_dim();

  const OrthogonalBasis basis =
      args.random_basis
          ? random_orthogonal_basis(n, mix_seed(args.seed, seed_stream::kBasis))
          : OrthogonalBasis::standard(n);
  const std::vector<Vector> inputs =
      sample_gaussian_inputs(args.samples, n, args.seed);

  const ZeroImageReport zero = zero_image(model, args.tau_zero);
  const std::vector<NonZeroWitness> nonzero_witnesses =
      nonzero_preservation_audit(model, inputs, args.tau_zero);
  const OrderAuditReport order =
      order_preservation_audit(model, args.seed, args.triples, args.tau_order);
  const double hyperplane_deviation = hyperplane_check(model, inputs);
  const RankReport rank_report = encoded_rank_check(model, basis);

  const bool hard_violation =
      (zero.is_zero && m < n) || !nonzero_witnesses.empty();

  nlohmann::json doc;
  doc["model"] = args.model_path;
  doc["input_dim"] = n;
  doc["latent_dim"] = m;
  doc["seed"] = args.seed;
  doc["tau_zero"] = args.tau_zero;
  doc["tau_order"] = args.tau_order;
  doc["samples"] = args.samples;
  doc["triples"] = args.triples;
  doc["basis"] = args.random_basis ? "random" : "standard";
  doc["zero_image"] = zero;
  doc["nonzero_preservation"] = {{"inputs_tested", args.samples},
                                 {"violations", nonzero_witnesses}};
  doc["order_preservation"] = order;
  doc["hyperplane"] = {{"inputs_tested", args.samples},
                       {"max_deviation", hyperplane_deviation}};
  doc["rank_check"] = rank_report;
  doc["hard_violation"] = hard_violation;

  const fs::path dir = prepare_out_dir(args.out_dir);
  write_text_atomic(dir / "audit.json", doc.dump(2) + "\n");

  std::cout << "zero image: |f(0)| = " << fmt_real(std::sqrt(zero.norm_sq))
            << (zero.is_zero ? " (ZERO under tau_zero)" : " (non-zero)") << '\n';
  std::cout << "non-zero preservation: " << nonzero_witnesses.size()
            << " violation(s) over " << args.samples << " inputs\n";
  std::cout << "order preservation: rate "
            << fmt_real(order.violation_rate) << " over " << order.triples_tested
            << " triples, worst margin " << fmt_real(order.worst_margin) << '\n';
  std::cout << "hyperplane deviation: " << fmt_real(hyperplane_deviation) << '\n';
  std::cout << "encoded basis rank: " << rank_report.encoded_rank << " of "
            << rank_report.basis_dim << " (latent dim " << rank_report.latent_dim
            << ")\n";
  std::cout << "wrote " << (dir / "audit.json").string() << '\n';

  if (hard_violation) {
    std::cout << "hard violation found\n";
    return kExitViolation;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

struct CertifyArgs {
  std::string model_path;
  std::uint64_t seed = 1;
  double tau_zero = kDefaultTauZero;
  double tau_order = kDefaultTauOrder;
  bool random_basis = false;
  std::string out_dir = ".";
};

int run_certify(const CertifyArgs& args) {
  const MlpModel model = load_model(args.model_path);
  const int n = model.input_dim();

  const OrthogonalBasis basis =
      args.random_basis
          ? random_orthogonal_basis(n, mix_seed(args.seed, seed_stream::kBasis))
          : OrthogonalBasis::standard(n);

  const ViolationCertificate cert =
      certify_violation(model, basis, args.tau_zero, args.tau_order);

  nlohmann::json doc;
  doc["model"] = args.model_path;
  doc["input_dim"] = n;
  doc["latent_dim"] = model.latent_dim();
  doc["basis"] = args.random_basis ? "random" : "standard";
  doc["tau_zero"] = args.tau_zero;
  doc["tau_order"] = args.tau_order;
  doc["certificate"] = cert;

  const fs::path dir = prepare_out_dir(args.out_dir);
  write_text_atomic(dir / "certificate.json", doc.dump(2) + "\n");
  std::cout << doc.dump(2) << '\n';

  if (cert.kind == ViolationKind::NoneFound) {
    std::cerr << "no violation found: tolerances defeated both scans "
                 "(tau_zero/tau_order likely misconfigured)\n";
    return kExitToleranceAlert;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// recommend
// ---------------------------------------------------------------------------

struct RecommendArgs {
  std::string model_path;
  std::string data_path;
  std::string synth_spec;
  double sparsity = 0.0;
  int k = 10;
  std::uint64_t seed = 1;
  double tau_order = kDefaultTauOrder;
  std::string out_dir = ".";
};

int run_recommend(const RecommendArgs& args) {
  if (args.data_path.empty() == args.synth_spec.empty()) {
    throw std::invalid_argument("exactly one of --data or --synth is required");
  }
  const MlpModel model = load_model(args.model_path);

  std::optional<Dataset> dataset;
  if (!args.data_path.empty()) {
    dataset.emplace(load_csv(args.data_path));
  } else {
    const SynthSpec spec = parse_synth_spec(args.synth_spec);
    dataset.emplace(
        synth_dataset(spec.users, spec.items, spec.dim, args.sparsity, args.seed));
  }
  if (dataset->dim() != model.input_dim()) {
    throw std::invalid_argument("model expects input dim " +
                                std::to_string(model.input_dim()) +
                                " but dataset has dim " +
                                std::to_string(dataset->dim()));
  }
  if (args.k > static_cast<int>(dataset->items().size())) {
    throw std::invalid_argument("--k " + std::to_string(args.k) +
                                " exceeds item count " +
                                std::to_string(dataset->items().size()));
  }

  const AgreementReport agreement =
      evaluate_agreement(*dataset, model, args.k, args.seed, args.tau_order);

  // Per-user top-k in both spaces.
  std::vector<Entity> latent_items;
  latent_items.reserve(dataset->items().size());
  for (const Entity& item : dataset->items()) {
    latent_items.push_back({item.id, model.encode(item.vec)});
  }
  std::ostringstream rankings_csv;
  rankings_csv << "user,space,rank,item,score\n";
  for (const Entity& user : dataset->users()) {
    const RankingResult raw = top_k(user.id, user.vec, dataset->items(), args.k);
    const RankingResult latent =
        top_k(user.id, model.encode(user.vec), latent_items, args.k);
    for (std::size_t i = 0; i < raw.ranked_items.size(); ++i) {
      rankings_csv << user.id << ",raw," << i + 1 << ','
                   << raw.ranked_items[i].first << ','
                   << fmt_real(raw.ranked_items[i].second) << '\n';
    }
    for (std::size_t i = 0; i < latent.ranked_items.size(); ++i) {
      rankings_csv << user.id << ",latent," << i + 1 << ','
                   << latent.ranked_items[i].first << ','
                   << fmt_real(latent.ranked_items[i].second) << '\n';
    }
  }

  std::ostringstream agreement_csv;
  agreement_csv << "user,tau,overlap\n";
  for (const UserAgreement& ua : agreement.per_user) {
    agreement_csv << ua.user_id << ',' << fmt_real(ua.tau) << ','
                  << fmt_real(ua.topk_overlap) << '\n';
  }

  nlohmann::json doc = agreement;

  const fs::path dir = prepare_out_dir(args.out_dir);
  write_text_atomic(dir / "rankings.csv", rankings_csv.str());
  write_text_atomic(dir / "agreement.csv", agreement_csv.str());
  write_text_atomic(dir / "agreement.json", doc.dump(2) + "\n");

  std::cout << "mean kendall tau " << fmt_real(agreement.kendall_tau)
            << ", mean top-" << args.k << " overlap "
            << fmt_real(agreement.topk_overlap) << ", "
            << agreement.collapse_flags.size() << " collapsed user(s)\n";
  std::cout << "wrote rankings.csv, agreement.csv, agreement.json under "
            << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{
      "latact: train autoencoder recommenders and audit their encoders for "
      "dimension reduction, dot-product order preservation, and non-zero "
      "preservation"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Train an autoencoder on a dataset and save the model");
  train_cmd->add_option("--data", train_args.data_path,
                        "dataset CSV (kind,id,v0,...)");
  train_cmd->add_option("--synth", train_args.synth_spec,
                        "synthetic dataset USERSxITEMSxDIM, e.g. 100x500x32");
  train_cmd->add_option("--sparsity", train_args.sparsity,
                        "zeroed fraction for --synth")
      ->check(CLI::Range(0.0, 0.999999));
  train_cmd->add_option("--input-dim", train_args.input_dim,
                        "expected input dim (validated against the data)");
  train_cmd->add_option("--latent", train_args.latent, "latent width")
      ->required()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--activation", train_args.activation,
                        "latent activation: identity|relu|sigmoid|tanh")
      ->capture_default_str();
  train_cmd
      ->add_option("--hidden", train_args.hidden,
                   "hidden encoder widths, comma separated")
      ->delimiter(',');
  train_cmd->add_option("--hidden-activation", train_args.hidden_activation,
                        "activation for hidden layers")
      ->capture_default_str();
  train_cmd->add_option("--epochs", train_args.epochs, "training epochs")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train_cmd->add_option("--lr", train_args.learning_rate, "learning rate")
      ->capture_default_str();
  train_cmd->add_option("--batch", train_args.batch_size, "mini-batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--init-scale", train_args.init_scale,
                        "weight init scale")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_args.seed, "seed for init and shuffling")
      ->capture_default_str();
  train_cmd->add_flag("--enforce-compression,!--no-enforce-compression",
                      train_args.enforce_compression,
                      "require latent <= input dim (on by default)");
  train_cmd->add_option("--out-dir", train_args.out_dir, "output directory")
      ->capture_default_str();

  AuditArgs audit_args;
  CLI::App* audit_cmd = app.add_subcommand(
      "audit", "Audit a saved model against the encoder conditions");
  audit_cmd->add_option("--model", audit_args.model_path, "model file")
      ->required();
  audit_cmd->add_option("--seed", audit_args.seed, "seed for sampled checks")
      ->capture_default_str();
  audit_cmd->add_option("--triples", audit_args.triples,
                        "sampled (x,u,v) triples for the order audit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  audit_cmd->add_option("--samples", audit_args.samples,
                        "sampled inputs for the non-zero and hyperplane checks")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  audit_cmd->add_option("--tau-zero", audit_args.tau_zero,
                        "norm threshold for a vanished image")
      ->capture_default_str();
  audit_cmd->add_option("--tau-order", audit_args.tau_order,
                        "threshold for an encoded order reversal")
      ->capture_default_str();
  audit_cmd->add_flag("--random-basis", audit_args.random_basis,
                      "use a seeded random orthogonal basis for the rank check");
  audit_cmd->add_option("--out-dir", audit_args.out_dir, "output directory")
      ->capture_default_str();

  CertifyArgs certify_args;
  CLI::App* certify_cmd = app.add_subcommand(
      "certify",
      "Construct a violation witness for a compressing encoder with f(0) = 0");
  certify_cmd->add_option("--model", certify_args.model_path, "model file")
      ->required();
  certify_cmd->add_option("--seed", certify_args.seed, "seed for --random-basis")
      ->capture_default_str();
  certify_cmd->add_option("--tau-zero", certify_args.tau_zero,
                          "norm threshold for a vanished image")
      ->capture_default_str();
  certify_cmd->add_option("--tau-order", certify_args.tau_order,
                          "threshold for an encoded order reversal")
      ->capture_default_str();
  certify_cmd->add_flag("--random-basis", certify_args.random_basis,
                        "scan a seeded random orthogonal basis instead of the "
                        "standard basis");
  certify_cmd->add_option("--out-dir", certify_args.out_dir, "output directory")
      ->capture_default_str();

  RecommendArgs rec_args;
  CLI::App* rec_cmd = app.add_subcommand(
      "recommend", "Compare raw-space and latent-space top-k recommendations");
  rec_cmd->add_option("--model", rec_args.model_path, "model file")->required();
  rec_cmd->add_option("--data", rec_args.data_path, "dataset CSV");
  rec_cmd->add_option("--synth", rec_args.synth_spec,
                      "synthetic dataset USERSxITEMSxDIM");
  rec_cmd->add_option("--sparsity", rec_args.sparsity,
                      "zeroed fraction for --synth")
      ->check(CLI::Range(0.0, 0.999999));
  rec_cmd->add_option("--k", rec_args.k, "recommendations per user")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  rec_cmd->add_option("--seed", rec_args.seed, "seed for --synth")
      ->capture_default_str();
  rec_cmd->add_option("--tau-order", rec_args.tau_order,
                      "tolerance for flagging a collapsed ranking")
      ->capture_default_str();
  rec_cmd->add_option("--out-dir", rec_args.out_dir, "output directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(train_args);
    if (*audit_cmd) return run_audit(audit_args);
    if (*certify_cmd) return run_certify(certify_args);
    if (*rec_cmd) return run_recommend(rec_args);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace latact::cli
