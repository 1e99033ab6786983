#include <doctest.h>

#include <cstdlib>
#include <cstring>

#include "gridbesov/besov.hpp"
#include "gridbesov/experiments.hpp"
#include "gridbesov/parallel.hpp"
#include "gridbesov/transform.hpp"

using namespace gb;

TEST_SUITE_BEGIN("parallel");

TEST_CASE("parallel transforms match the serial reference bit for bit") {
  const GoodGrid g = build_dyadic(10);
  Rng rng(2024);
  StepFunction<Cplx> psi{&g, 10, {}};
  for (int64_t i = 0; i < g.cell_count(10); ++i)
    psi.values.push_back(Cplx(2.0 * rng.unit_d() - 1.0, 2.0 * rng.unit_d() - 1.0));

  const auto fs = analyze_frame(psi, 0.5, Exec::serial);
  const auto fp = analyze_frame(psi, 0.5, Exec::parallel);
  REQUIRE(fs.level == fp.level);
  CHECK(fs.constant == fp.constant);
  for (int k = 0; k < fs.level; ++k) {
    const auto& a = fs.a[static_cast<size_t>(k)];
    const auto& b = fp.a[static_cast<size_t>(k)];
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(Cplx)) == 0);
  }

  const auto bs = synthesize_frame(fs, 10, Exec::serial);
  const auto bp = synthesize_frame(fs, 10, Exec::parallel);
  CHECK(std::memcmp(bs.values.data(), bp.values.data(), bs.values.size() * sizeof(Cplx)) == 0);

  double err = 0;
  for (size_t i = 0; i < psi.values.size(); ++i)
    err = std::max(err, std::abs(bs.values[i] - psi.values[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("rational transforms are identical under either policy") {
  const GoodGrid g = build_uniform(4, 3);
  Rng rng(77);
  const auto psi = random_step<Rational>(g, 4, rng);
  const auto fs = analyze_frame(psi, 0.3, Exec::serial);
  const auto fp = analyze_frame(psi, 0.3, Exec::parallel);
  CHECK(fs.constant == fp.constant);
  for (int k = 0; k < 4; ++k) CHECK(fs.a[static_cast<size_t>(k)] == fp.a[static_cast<size_t>(k)]);
}

TEST_CASE("chunked reduction is independent of the execution policy") {
  std::vector<double> xs;
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) xs.push_back(2.0 * rng.unit_d() - 1.0);
  auto chunk_sum = [&](int64_t lo, int64_t hi) {
    double s = 0;
    for (int64_t i = lo; i < hi; ++i) s += xs[static_cast<size_t>(i)];
    return s;
  };
  const double a = chunked_reduce<double>(Exec::serial, 10000, 0.0, chunk_sum);
  const double b = chunked_reduce<double>(Exec::parallel, 10000, 0.0, chunk_sum);
  CHECK(a == b);
}

TEST_CASE("GRIDBESOV_THREADS caps the worker count") {
  const int before = worker_count();
  CHECK(before >= 1);
  setenv("GRIDBESOV_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  setenv("GRIDBESOV_THREADS", "not-a-number", 1);
  CHECK(worker_count() == before);
  unsetenv("GRIDBESOV_THREADS");
  CHECK(worker_count() == before);
}

TEST_CASE("experiment reports are deterministic") {
  const GoodGrid g = build_dyadic(5);
  ExperimentSpec spec;
  spec.kind = "duality";
  spec.s = 0.5;
  spec.depth = 5;
  spec.trials = 16;
  spec.seed = 99;
  const std::string a = run_experiment(g, spec).dump();
  const std::string b = run_experiment(g, spec).dump();
  CHECK(a == b);

  spec.kind = "dc-equiv";
  spec.trials = 4;
  spec.depth = 4;
  const std::string c = run_experiment(g, spec).dump();
  const std::string d = run_experiment(g, spec).dump();
  CHECK(c == d);
}

TEST_SUITE_END();
