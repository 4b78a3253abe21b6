#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "latact/model_io.hpp"
#include "latact/nn.hpp"

using namespace latact;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("latact");
  for (const std::string& a : args) argv.push_back(a.c_str());

  std::ostringstream captured_out, captured_err;
  std::streambuf* old_out = std::cout.rdbuf(captured_out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(captured_err.rdbuf());
  CliResult result;
  result.code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  result.out = captured_out.str();
  result.err = captured_err.str();
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int count_data_rows(const std::string& csv) {
  int rows = -1;  // skip header
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  return rows;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& child) const {
    return (path / child).string();
  }
};

Layer layer_of(Matrix w, Vector b, ActivationKind act) {
  return Layer(std::move(w), std::move(b), act);
}

void save_identity_model(int dim, const std::string& path) {
  const MlpModel model(
      {layer_of(Matrix::identity(dim), Vector::zeros(dim), ActivationKind::Identity)},
      {layer_of(Matrix::identity(dim), Vector::zeros(dim), ActivationKind::Identity)});
  save_model(model, path);
}

void save_linear_model(Matrix a, const std::string& path) {
  const int n = a.cols();
  const int m = a.rows();
  const MlpModel model(
      {layer_of(std::move(a), Vector::zeros(m), ActivationKind::Identity)},
      {layer_of(Matrix(n, m), Vector::zeros(n), ActivationKind::Identity)});
  save_model(model, path);
}

}  // namespace

TEST_CASE("train writes a model and a loss history") {
  TempDir dir("cli_train_out");
  const CliResult r = run_cli({"train", "--synth", "30x60x12", "--latent", "4",
                               "--activation", "sigmoid", "--epochs", "50",
                               "--seed", "1", "--out-dir", dir / ""});
  CHECK(r.code == cli::kExitOk);
  CHECK(fs::exists(dir.path / "model.txt"));
  CHECK(count_data_rows(slurp(dir.path / "loss.csv")) == 50);

  const MlpModel model = load_model(dir.path / "model.txt");
  CHECK(model.input_dim() == 12);
  CHECK(model.latent_dim() == 4);
}

TEST_CASE("train rejects expansion when compression is enforced") {
  const CliResult r = run_cli({"train", "--latent", "64", "--input-dim", "32"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("--latent") != std::string::npos);

  // The same shape is allowed for control runs.
  TempDir dir("cli_train_wide");
  const CliResult ok = run_cli({"train", "--synth", "10x10x4", "--latent", "6",
                                "--no-enforce-compression", "--epochs", "1",
                                "--out-dir", dir / ""});
  CHECK(ok.code == cli::kExitOk);
}

TEST_CASE("train with zero epochs saves the initialization") {
  TempDir dir("cli_train_zero");
  const CliResult r = run_cli({"train", "--synth", "10x20x8", "--latent", "3",
                               "--epochs", "0", "--seed", "9", "--out-dir",
                               dir / ""});
  CHECK(r.code == cli::kExitOk);
  CHECK(count_data_rows(slurp(dir.path / "loss.csv")) == 0);
  const MlpModel saved = load_model(dir.path / "model.txt");
  const MlpModel expected = MlpModel::init_random(
      EncoderSpec::single_layer(8, 3, ActivationKind::Sigmoid), 9, 1.0);
  CHECK(serialize_model(saved) == serialize_model(expected));
}

TEST_CASE("train requires exactly one data source") {
  CHECK(run_cli({"train", "--latent", "2"}).code == cli::kExitUsage);
}

TEST_CASE("audit passes a sigmoid model and fails a dead relu model") {
  TempDir dir("cli_audit");

  const MlpModel sigmoid_model = MlpModel::init_random(
      EncoderSpec::single_layer(6, 3, ActivationKind::Sigmoid), 4);
  save_model(sigmoid_model, dir / "sigmoid.txt");
  const CliResult ok = run_cli({"audit", "--model", dir / "sigmoid.txt",
                                "--out-dir", dir / ""});
  CHECK(ok.code == cli::kExitOk);
  const nlohmann::json doc = nlohmann::json::parse(slurp(dir.path / "audit.json"));
  CHECK(doc["zero_image"]["is_zero"] == false);
  CHECK(doc["hard_violation"] == false);

  // ReLU with zero weights and bias -1 sends everything to zero.
  const MlpModel dead(
      {layer_of(Matrix(3, 6), Vector{-1, -1, -1}, ActivationKind::ReLU)},
      {layer_of(Matrix(6, 3), Vector::zeros(6), ActivationKind::Identity)});
  save_model(dead, dir / "dead.txt");
  const CliResult bad = run_cli({"audit", "--model", dir / "dead.txt",
                                 "--out-dir", dir / ""});
  CHECK(bad.code == cli::kExitViolation);
  const nlohmann::json bad_doc =
      nlohmann::json::parse(slurp(dir.path / "audit.json"));
  CHECK(bad_doc["zero_image"]["is_zero"] == true);
  CHECK(bad_doc["hard_violation"] == true);
}

TEST_CASE("audit of the identity model reports zero order violations") {
  TempDir dir("cli_audit_id");
  save_identity_model(5, dir / "id.txt");
  const CliResult r = run_cli({"audit", "--model", dir / "id.txt", "--triples",
                               "400", "--out-dir", dir / ""});
  CHECK(r.code == cli::kExitOk);
  const nlohmann::json doc = nlohmann::json::parse(slurp(dir.path / "audit.json"));
  CHECK(doc["order_preservation"]["violations"] == 0);
  CHECK(doc["order_preservation"]["violation_rate"] == 0.0);
  CHECK(doc["rank_check"]["encoded_rank"] == 5);
}

TEST_CASE("audit exit 2 on an unreadable model") {
  CHECK(run_cli({"audit", "--model", "no_such_model.txt"}).code ==
        cli::kExitUsage);
}

TEST_CASE("certify emits the dropped-coordinate witness") {
  TempDir dir("cli_certify_drop");
  save_linear_model(Matrix(2, 3, {1, 0, 0, 0, 1, 0}), dir / "proj.txt");
  const CliResult r = run_cli({"certify", "--model", dir / "proj.txt",
                               "--out-dir", dir / ""});
  CHECK(r.code == cli::kExitOk);
  const nlohmann::json doc =
      nlohmann::json::parse(slurp(dir.path / "certificate.json"));
  CHECK(doc["certificate"]["kind"] == "NonZeroViolation");
  CHECK(doc["certificate"]["witness_x"] == nlohmann::json({0.0, 0.0, 1.0}));
  // The certificate is also printed.
  CHECK(r.out.find("NonZeroViolation") != std::string::npos);
}

TEST_CASE("certify emits the hand-computed order witness") {
  TempDir dir("cli_certify_order");
  save_linear_model(Matrix(2, 3, {1, 0, 1, 0, 1, 1}), dir / "a.txt");
  const CliResult r = run_cli({"certify", "--model", dir / "a.txt", "--out-dir",
                               dir / ""});
  CHECK(r.code == cli::kExitOk);
  const nlohmann::json cert =
      nlohmann::json::parse(slurp(dir.path / "certificate.json"))["certificate"];
  CHECK(cert["kind"] == "OrderViolation");
  CHECK(cert["witness_x"] == nlohmann::json({1.0, 0.0, 0.0}));
  CHECK(cert["witness_u"] == nlohmann::json({0.0, 0.0, 1.0}));
  CHECK(cert["witness_v"] == nlohmann::json({0.0, 0.0, 0.0}));
  CHECK(cert["encoded_dots"] == nlohmann::json({1.0, 0.0}));
}

TEST_CASE("certify rejects encoders whose zero image survives") {
  TempDir dir("cli_certify_reject");
  const MlpModel model = MlpModel::init_random(
      EncoderSpec::single_layer(6, 3, ActivationKind::Sigmoid), 4);
  save_model(model, dir / "sigmoid.txt");
  const CliResult r = run_cli({"certify", "--model", dir / "sigmoid.txt",
                               "--out-dir", dir / ""});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("f(0) is not zero") != std::string::npos);
}

TEST_CASE("recommend under the identity model agrees everywhere") {
  TempDir dir("cli_rec_id");
  save_identity_model(8, dir / "id.txt");
  const CliResult r = run_cli({"recommend", "--model", dir / "id.txt", "--synth",
                               "6x30x8", "--k", "5", "--seed", "3", "--out-dir",
                               dir / ""});
  CHECK(r.code == cli::kExitOk);

  const nlohmann::json agreement =
      nlohmann::json::parse(slurp(dir.path / "agreement.json"));
  CHECK(agreement["kendall_tau"] == 1.0);
  CHECK(agreement["topk_overlap"] == 1.0);
  CHECK(agreement["collapse_flags"].empty());

  const std::string csv = slurp(dir.path / "agreement.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "user,tau,overlap");
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    CHECK(line.substr(line.find(',')) == ",1,1");
    ++rows;
  }
  CHECK(rows == 6);
}

TEST_CASE("recommend flags every user under a constant encoder") {
  TempDir dir("cli_rec_const");
  // Zero weights with a non-zero bias encode every input to the same point.
  const MlpModel constant(
      {layer_of(Matrix(2, 4), Vector{1.0, 0.5}, ActivationKind::Identity)},
      {layer_of(Matrix(4, 2), Vector::zeros(4), ActivationKind::Identity)});
  save_model(constant, dir / "const.txt");
  const CliResult r = run_cli({"recommend", "--model", dir / "const.txt",
                               "--synth", "5x12x4", "--k", "3", "--seed", "2",
                               "--out-dir", dir / ""});
  CHECK(r.code == cli::kExitOk);
  const nlohmann::json agreement =
      nlohmann::json::parse(slurp(dir.path / "agreement.json"));
  CHECK(agreement["collapse_flags"].size() == 5);
}

TEST_CASE("recommend rejects a model/dataset dim mismatch") {
  TempDir dir("cli_rec_mismatch");
  save_identity_model(8, dir / "id.txt");
  const CliResult r = run_cli({"recommend", "--model", dir / "id.txt", "--synth",
                               "4x10x6", "--out-dir", dir / ""});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("dim") != std::string::npos);
}

TEST_CASE("recommend is byte-identical across reruns") {
  TempDir dir("cli_rec_repeat");
  const MlpModel model = MlpModel::init_random(
      EncoderSpec::single_layer(6, 3, ActivationKind::Sigmoid), 6);
  save_model(model, dir / "m.txt");

  const std::vector<std::string> base = {"recommend", "--model", dir / "m.txt",
                                         "--synth", "8x25x6", "--k", "4",
                                         "--seed", "5"};
  std::vector<std::string> run_a = base;
  run_a.insert(run_a.end(), {"--out-dir", dir / "a"});
  std::vector<std::string> run_b = base;
  run_b.insert(run_b.end(), {"--out-dir", dir / "b"});
  REQUIRE(run_cli(run_a).code == cli::kExitOk);
  REQUIRE(run_cli(run_b).code == cli::kExitOk);

  for (const char* name : {"rankings.csv", "agreement.csv", "agreement.json"}) {
    CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
  }
}

TEST_CASE("diverging training exits 1 with a diagnostic") {
  TempDir dir("cli_train_diverge");
  const CliResult r = run_cli({"train", "--synth", "20x20x8", "--latent", "4",
                               "--activation", "identity", "--lr", "1e15",
                               "--epochs", "5", "--out-dir", dir / ""});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(r.err.find("non-finite loss") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "model.txt"));
}

TEST_CASE("certify and audit accept a random orthogonal basis") {
  TempDir dir("cli_random_basis");
  save_linear_model(Matrix(2, 3, {1, 0, 1, 0, 1, 1}), dir / "a.txt");
  const CliResult cert = run_cli({"certify", "--model", dir / "a.txt",
                                  "--random-basis", "--seed", "8", "--out-dir",
                                  dir / ""});
  CHECK(cert.code == cli::kExitOk);
  const nlohmann::json doc =
      nlohmann::json::parse(slurp(dir.path / "certificate.json"));
  CHECK(doc["basis"] == "random");
  CHECK(doc["certificate"]["kind"] == "OrderViolation");

  const CliResult audit = run_cli({"audit", "--model", dir / "a.txt",
                                   "--random-basis", "--seed", "8", "--out-dir",
                                   dir / ""});
  CHECK(audit.code == cli::kExitViolation);  // f(0) = 0 with m < n
  const nlohmann::json audit_doc =
      nlohmann::json::parse(slurp(dir.path / "audit.json"));
  CHECK(audit_doc["rank_check"]["encoded_rank"] == 2);
}

TEST_CASE("dataset errors surface with row context and exit 2") {
  TempDir dir("cli_bad_csv");
  {
    std::ofstream out(dir.path / "bad.csv", std::ios::binary);
    out << "kind,id,v0,v1\nuser,u1,1,2\nitem,i1,oops,2\n";
  }
  const CliResult r = run_cli({"train", "--data", dir / "bad.csv", "--latent",
                               "2", "--out-dir", dir / ""});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("unknown flags and missing subcommands exit 2") {
  CHECK(run_cli({"train", "--latent", "2", "--bogus"}).code == cli::kExitUsage);
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"--help"}).code == cli::kExitOk);
}
