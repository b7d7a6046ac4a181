#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "imagery/kernels.hpp"
#include "oracle_helpers.hpp"

using imagery::kern::Ops;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n,
                               double lo = -10.0, double hi = 10.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

long double dot_ref(const std::vector<double>& a,
                    const std::vector<double>& b) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += static_cast<long double>(a[i]) * b[i];
  return acc;
}

long double sq_dist_ref(const std::vector<double>& a,
                        const std::vector<double>& b) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - b[i];
    acc += d * d;
  }
  return acc;
}

long double sum_ref(const std::vector<double>& a) {
  long double acc = 0.0L;
  for (double x : a) acc += x;
  return acc;
}

}  // namespace

TEST_CASE("backend selection reports a known name") {
  const std::string name = imagery::kern::backend_name();
  CHECK((name == "scalar" || name == "avx2"));
  // This project targets x86-64 CI hosts with AVX2; if that ever changes
  // the equivalence tests below silently reduce to scalar-only coverage.
  CHECK(imagery::kern::scalar_ops().name == std::string("scalar"));
}

TEST_CASE("reductions match a long-double reference (scalar and avx2)") {
  std::mt19937_64 rng(20240817);
  std::vector<const Ops*> backends{&imagery::kern::scalar_ops()};
  if (const Ops* v = imagery::kern::avx2_ops()) backends.push_back(v);

  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{2},
                        std::size_t{3}, std::size_t{4}, std::size_t{5},
                        std::size_t{7}, std::size_t{8}, std::size_t{15},
                        std::size_t{16}, std::size_t{33}, std::size_t{64},
                        std::size_t{67}, std::size_t{256}}) {
    const std::vector<double> a = random_vec(rng, n);
    const std::vector<double> b = random_vec(rng, n);
    const double dref = static_cast<double>(dot_ref(a, b));
    const double qref = static_cast<double>(sq_dist_ref(a, b));
    const double sref = static_cast<double>(sum_ref(a));
    double mref = 0.0;
    for (double x : a) mref = std::max(mref, std::fabs(x));

    for (const Ops* ops : backends) {
      INFO("backend ", ops->name, " n ", n);
      const double scale = std::max(1.0, std::fabs(dref));
      CHECK(std::fabs(ops->dot(a.data(), b.data(), n) - dref) <=
            1e-12 * scale);
      CHECK(std::fabs(ops->sq_dist(a.data(), b.data(), n) - qref) <=
            1e-12 * std::max(1.0, qref));
      CHECK(std::fabs(ops->sum(a.data(), n) - sref) <=
            1e-12 * std::max(1.0, std::fabs(sref)));
      // max_abs is pure comparison; it must be exact.
      CHECK(ops->max_abs(a.data(), n) == mref);
    }
  }
}

TEST_CASE("elementwise kernels are bit-identical across backends") {
  const Ops* avx2 = imagery::kern::avx2_ops();
  if (avx2 == nullptr) {
    MESSAGE("AVX2 backend unavailable; skipping cross-backend checks");
    return;
  }
  const Ops& scalar = imagery::kern::scalar_ops();
  std::mt19937_64 rng(8675309);

  for (std::size_t n = 0; n <= 67; ++n) {
    const std::vector<double> x = random_vec(rng, n);
    const std::vector<double> y = random_vec(rng, n);
    const std::vector<double> base = random_vec(rng, n);
    const double a = 1.0 / 3.0, b = -0.7071067811865476;

    std::vector<double> s1(n, 0.0), s2(n, 0.0);
    scalar.axpby(s1.data(), a, x.data(), b, y.data(), n);
    avx2->axpby(s2.data(), a, x.data(), b, y.data(), n);
    CHECK(s1 == s2);

    s1 = base;
    s2 = base;
    scalar.axpy(s1.data(), a, x.data(), n);
    avx2->axpy(s2.data(), a, x.data(), n);
    CHECK(s1 == s2);

    scalar.scale(s1.data(), b, x.data(), n);
    avx2->scale(s2.data(), b, x.data(), n);
    CHECK(s1 == s2);
  }
}

TEST_CASE("reduction backends agree within accumulation-order slack") {
  const Ops* avx2 = imagery::kern::avx2_ops();
  if (avx2 == nullptr) {
    MESSAGE("AVX2 backend unavailable; skipping cross-backend checks");
    return;
  }
  const Ops& scalar = imagery::kern::scalar_ops();
  std::mt19937_64 rng(424242);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 300);
    const std::vector<double> a = random_vec(rng, n);
    const std::vector<double> b = random_vec(rng, n);
    const double d1 = scalar.dot(a.data(), b.data(), n);
    const double d2 = avx2->dot(a.data(), b.data(), n);
    CHECK(std::fabs(d1 - d2) <= 1e-12 * std::max(1.0, std::fabs(d1)));
    const double q1 = scalar.sq_dist(a.data(), b.data(), n);
    const double q2 = avx2->sq_dist(a.data(), b.data(), n);
    CHECK(std::fabs(q1 - q2) <= 1e-12 * std::max(1.0, q1));
    CHECK(scalar.max_abs(a.data(), n) == avx2->max_abs(a.data(), n));
  }
}

TEST_CASE("IMAGERY_KERNELS forces the backend in the CLI") {
  const char* cli = std::getenv("IMAGERY_CLI");
  if (cli == nullptr) {
    MESSAGE("IMAGERY_CLI not set; skipping subprocess check");
    return;
  }
  const std::string dir = oracle::make_temp_dir("kernsel");
  oracle::write_file(dir + "/p.json",
                     "{\"text\":\"x\",\"entities\":[\"ox\",\"yak\"]}");
  const std::string base = std::string(cli) +
                           " --log-level debug semantics score --prompt " +
                           dir + "/p.json";
  auto grep_backend = [&](const std::string& env) {
    oracle::CmdResult r =
        oracle::run_cmd(env + base + " 2>&1 >/dev/null | head -1");
    return r.out;
  };
  const std::string forced_scalar = grep_backend("IMAGERY_KERNELS=scalar ");
  CHECK(forced_scalar.find("kernel backend: scalar") != std::string::npos);
  if (imagery::kern::avx2_ops() != nullptr) {
    const std::string forced_avx2 = grep_backend("IMAGERY_KERNELS=avx2 ");
    CHECK(forced_avx2.find("kernel backend: avx2") != std::string::npos);
  }
}
