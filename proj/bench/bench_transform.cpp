// Times the float-mode transform kernels serial vs OpenMP and checks that
// both paths produce bit-identical output (the parallel kernels partition by
// cell and reduce over a fixed chunk grid, so they must).

#include <chrono>
#include <cstring>
#include <iostream>

#include "gridbesov/besov.hpp"
#include "gridbesov/experiments.hpp"
#include "gridbesov/parallel.hpp"
#include "gridbesov/transform.hpp"

using namespace gb;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class Fn>
double time_best(int reps, Fn&& fn) {
  double best = 1e100;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

bool bit_equal(const std::vector<Cplx>& a, const std::vector<Cplx>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(Cplx)) == 0;
}

double frame_norm_minus(const CoeffFrame<Cplx>& f, Exec exec) {
  double total = ScalarOps<Cplx>::abs_d(f.constant);
  for (int k = 0; k < f.level; ++k) {
    const auto& row = f.a[static_cast<size_t>(k)];
    const int kk = k;
    total += chunked_reduce<double>(
        exec, static_cast<int64_t>(row.size()), 0.0, [&](int64_t lo, int64_t hi) {
          double part = 0;
          for (int64_t i = lo; i < hi; ++i) {
            const CellRef owner = f.grid->pair_owner(kk, i);
            part += std::abs(row[static_cast<size_t>(i)]) *
                    std::pow(f.grid->measure_d(owner), f.s);
          }
          return part;
        });
  }
  return total;
}

}  // namespace

int main(int argc, char** argv) {
  int depth = 17;
  int reps = 5;
  for (int i = 1; i < argc - 1; ++i) {
    if (!std::strcmp(argv[i], "--depth")) depth = std::atoi(argv[i + 1]);
    if (!std::strcmp(argv[i], "--reps")) reps = std::atoi(argv[i + 1]);
  }
  const double s = 0.5;

  std::cout << "building dyadic grid, depth " << depth << " ("
            << ((int64_t{2} << depth) - 1) << " cells), workers: " << worker_count() << "\n";
  const auto t0 = Clock::now();
  const GoodGrid g = build_dyadic(depth);
  std::cout << "  grid build: " << seconds_since(t0) << " s\n";

  Rng rng(42);
  StepFunction<Cplx> psi{&g, depth, {}};
  psi.values.reserve(static_cast<size_t>(g.cell_count(depth)));
  for (int64_t i = 0; i < g.cell_count(depth); ++i)
    psi.values.push_back(Cplx(2.0 * rng.unit_d() - 1.0, 2.0 * rng.unit_d() - 1.0));

  CoeffFrame<Cplx> frame_s, frame_p;
  const double t_an_s = time_best(reps, [&] { frame_s = analyze_frame(psi, s, Exec::serial); });
  const double t_an_p = time_best(reps, [&] { frame_p = analyze_frame(psi, s, Exec::parallel); });
  bool same = frame_s.constant == frame_p.constant;
  for (int k = 0; same && k < depth; ++k)
    same = bit_equal(frame_s.a[static_cast<size_t>(k)], frame_p.a[static_cast<size_t>(k)]);
  std::cout << "analyze    serial " << t_an_s << " s  parallel " << t_an_p << " s  speedup "
            << t_an_s / t_an_p << "  bit-identical " << (same ? "yes" : "NO") << "\n";

  StepFunction<Cplx> back_s, back_p;
  const double t_sy_s =
      time_best(reps, [&] { back_s = synthesize_frame(frame_s, depth, Exec::serial); });
  const double t_sy_p =
      time_best(reps, [&] { back_p = synthesize_frame(frame_s, depth, Exec::parallel); });
  const bool same_sy = bit_equal(back_s.values, back_p.values);
  std::cout << "synthesize serial " << t_sy_s << " s  parallel " << t_sy_p << " s  speedup "
            << t_sy_s / t_sy_p << "  bit-identical " << (same_sy ? "yes" : "NO") << "\n";

  double n_s = 0, n_p = 0;
  const double t_no_s = time_best(reps, [&] { n_s = frame_norm_minus(frame_s, Exec::serial); });
  const double t_no_p = time_best(reps, [&] { n_p = frame_norm_minus(frame_s, Exec::parallel); });
  std::cout << "norm       serial " << t_no_s << " s  parallel " << t_no_p << " s  speedup "
            << t_no_s / t_no_p << "  bit-identical " << (n_s == n_p ? "yes" : "NO") << "\n";

  double err = 0;
  for (size_t i = 0; i < psi.values.size(); ++i)
    err = std::max(err, std::abs(back_s.values[i] - psi.values[i]));
  std::cout << "reconstruction max abs error: " << err << "\n";

  const bool ok = same && same_sy && n_s == n_p && err < 1e-12;
  std::cout << (ok ? "OK" : "FAILED") << "\n";
  return ok ? 0 : 1;
}
