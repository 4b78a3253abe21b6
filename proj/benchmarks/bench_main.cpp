#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "latact/linalg.hpp"
#include "latact/nn.hpp"
#include "latact/properties.hpp"
#include "latact/recsys.hpp"
#include "latact/rng.hpp"

using namespace latact;

namespace {

Vector random_vector(int dim, Rng& rng) {
  std::vector<double> e(static_cast<std::size_t>(dim));
  for (double& v : e) v = rng.gaussian();
  return Vector::unchecked(std::move(e));
}

Matrix random_matrix(int rows, int cols, Rng& rng) {
  std::vector<double> e(static_cast<std::size_t>(rows) * cols);
  for (double& v : e) v = rng.gaussian();
  return Matrix(rows, cols, std::move(e));
}

void BM_Dot(benchmark::State& state) {
  Rng rng(1);
  const int dim = static_cast<int>(state.range(0));
  const Vector a = random_vector(dim, rng);
  const Vector b = random_vector(dim, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dot(a, b));
  }
}
BENCHMARK(BM_Dot)->Arg(16)->Arg(64)->Arg(256);

void BM_EncodeSigmoid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = n / 4;
  const MlpModel model = MlpModel::init_random(
      EncoderSpec::single_layer(n, m, ActivationKind::Sigmoid), 2);
  Rng rng(3);
  const Vector x = random_vector(n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.encode(x));
  }
}
BENCHMARK(BM_EncodeSigmoid)->Arg(32)->Arg(128);

void BM_TopKRaw(benchmark::State& state) {
  const int items = static_cast<int>(state.range(0));
  const Dataset ds = synth_dataset(1, items, 32, 0.2, 4);
  Rng rng(5);
  const Vector query = random_vector(32, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(top_k("q", query, ds.items(), 10));
  }
}
BENCHMARK(BM_TopKRaw)->Arg(500)->Arg(5000);

// Retrieval over the compressed space: the scan cost drops with the latent
// width once items are encoded ahead of time.
void BM_TopKLatentPreencoded(benchmark::State& state) {
  const int items = static_cast<int>(state.range(0));
  const int n = 32, m = 8;
  const Dataset ds = synth_dataset(1, items, n, 0.2, 4);
  const MlpModel model = MlpModel::init_random(
      EncoderSpec::single_layer(n, m, ActivationKind::Sigmoid), 6);
  std::vector<Entity> latent_items;
  for (const Entity& item : ds.items()) {
    latent_items.push_back({item.id, model.encode(item.vec)});
  }
  Rng rng(7);
  const Vector query = model.encode(random_vector(n, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(top_k("q", query, latent_items, 10));
  }
}
BENCHMARK(BM_TopKLatentPreencoded)->Arg(500)->Arg(5000);

void BM_Rank(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(8);
  const Matrix m = random_matrix(n, n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank(m, 1e-9));
  }
}
BENCHMARK(BM_Rank)->Arg(16)->Arg(64);

void BM_RandomOrthogonalBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(random_orthogonal_basis(n, ++seed));
  }
}
BENCHMARK(BM_RandomOrthogonalBasis)->Arg(16)->Arg(64);

void BM_CertifyLinear(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = n / 2;
  Rng rng(9);
  const LinearEncoder f(random_matrix(m, n, rng));
  const OrthogonalBasis basis = OrthogonalBasis::standard(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(certify_violation(f, basis));
  }
}
BENCHMARK(BM_CertifyLinear)->Arg(8)->Arg(32);

void BM_OrderAudit(benchmark::State& state) {
  const MlpModel model = MlpModel::init_random(
      EncoderSpec::single_layer(32, 8, ActivationKind::Sigmoid), 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        order_preservation_audit(model, 1, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_OrderAudit)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
