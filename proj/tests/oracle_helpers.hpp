#pragma once

// Independent reference implementations used as test oracles. Everything
// here is written against the published definitions from scratch — no
// calls into imagery:: code paths under test — so agreement is evidence,
// not tautology.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// ---------------------------------------------------------------------------
// Gauss–Hermite quadrature (physicists' convention, weight e^{-z^2}),
// orthonormal-recurrence Newton iteration.
// ---------------------------------------------------------------------------
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussHermite gauss_hermite(std::size_t n) {
  GaussHermite gh;
  gh.nodes.assign(n, 0.0);
  gh.weights.assign(n, 0.0);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const std::size_t m = (n + 1) / 2;
  double z = 0.0, pp = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    if (i == 1) {
      z = std::sqrt(2.0 * n + 1.0) -
          1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 2) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 3) {
      z = 1.86 * z - 0.86 * gh.nodes[0];
    } else if (i == 4) {
      z = 1.91 * z - 0.91 * gh.nodes[1];
    } else {
      z = 2.0 * z - gh.nodes[i - 3];
    }
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 -
             std::sqrt(static_cast<double>(j - 1) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15) break;
    }
    gh.nodes[i - 1] = z;
    gh.nodes[n - i] = -z;
    gh.weights[i - 1] = 2.0 / (pp * pp);
    gh.weights[n - i] = gh.weights[i - 1];
  }
  return gh;
}

// ---------------------------------------------------------------------------
// Posterior-mean noise prediction for a 1D Gaussian mixture data law via
// quadrature. Forward process: x_t = zeta*x0 + sigma*eps. For each mixture
// component, substitute x0 = mu_k + sqrt(2)*s_k*z so the component integral
// becomes a GH sum; eps_hat = (x_t - zeta*E[x0|x_t]) / sigma.
// ---------------------------------------------------------------------------
struct Gm1dComponent {
  double w;
  double mu;
  double s;  // > 0 for the substitution to be valid
};

inline double gh_predict_noise_1d(const std::vector<Gm1dComponent>& comps,
                                  double zeta, double sigma, double xt,
                                  std::size_t gh_n = 96) {
  const GaussHermite gh = gauss_hermite(gh_n);
  long double num = 0.0L, den = 0.0L;
  for (const Gm1dComponent& c : comps) {
    for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
      const long double x0 = c.mu + std::sqrt(2.0) * c.s * gh.nodes[j];
      const long double r = (xt - zeta * x0) / sigma;
      // N(x_t; zeta*x0, sigma^2) up to a sigma*sqrt(2pi) factor shared by
      // numerator and denominator.
      const long double lik = std::exp(static_cast<double>(-0.5L * r * r));
      num += static_cast<long double>(c.w * gh.weights[j]) * x0 * lik;
      den += static_cast<long double>(c.w * gh.weights[j]) * lik;
    }
  }
  const double ex0 = static_cast<double>(num / den);
  return (xt - zeta * ex0) / sigma;
}

// Same posterior mean by composite Simpson over the data axis in long
// double. Slower than GH but robust in the sharp-likelihood regime (small
// sigma_t), where the prior-centered GH substitution loses accuracy.
inline double quad_predict_noise_1d(const std::vector<Gm1dComponent>& comps,
                                    double zeta, double sigma, double xt,
                                    std::size_t half_intervals = 100000) {
  long double lo = xt / zeta - 14.0L * sigma / zeta;
  long double hi = xt / zeta + 14.0L * sigma / zeta;
  for (const Gm1dComponent& c : comps) {
    lo = std::min(lo, static_cast<long double>(c.mu) - 14.0L * c.s);
    hi = std::max(hi, static_cast<long double>(c.mu) + 14.0L * c.s);
  }
  const std::size_t n = 2 * half_intervals;
  const long double h = (hi - lo) / static_cast<long double>(n);
  long double num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i <= n; ++i) {
    const long double x0 = lo + h * static_cast<long double>(i);
    long double prior = 0.0L;
    for (const Gm1dComponent& c : comps) {
      const long double z = (x0 - c.mu) / c.s;
      prior += c.w / c.s * std::exp(static_cast<double>(-0.5L * z * z));
    }
    const long double r = (xt - zeta * x0) / sigma;
    // Constant factors 1/sqrt(2pi) and 1/sigma cancel in the ratio.
    const long double f = prior * std::exp(static_cast<double>(-0.5L * r * r));
    const long double w = (i == 0 || i == n) ? 1.0L : (i % 2 ? 4.0L : 2.0L);
    den += w * f;
    num += w * f * x0;
  }
  const double ex0 = static_cast<double>(num / den);
  return (xt - zeta * ex0) / sigma;
}

// ---------------------------------------------------------------------------
// PCA oracle via Eigen's SelfAdjointEigenSolver on the sample covariance
// (1/(n-1)). Returns the top-k components (rows) and eigenvalues descending.
// ---------------------------------------------------------------------------
struct PcaOracle {
  std::vector<double> mean;
  std::vector<std::vector<double>> components;
  std::vector<double> eigenvalues;
};

inline PcaOracle eigen_pca(const std::vector<std::vector<double>>& rows,
                           std::size_t k) {
  const std::size_t n = rows.size();
  const std::size_t d = rows[0].size();
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean;
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);

  PcaOracle out;
  out.mean.assign(mean.data(), mean.data() + d);
  for (std::size_t c = 0; c < k; ++c) {
    // Eigen sorts ascending; take from the top.
    const Eigen::Index idx = static_cast<Eigen::Index>(d - 1 - c);
    out.eigenvalues.push_back(solver.eigenvalues()(idx));
    Eigen::VectorXd v = solver.eigenvectors().col(idx);
    out.components.emplace_back(v.data(), v.data() + d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Independent re-implementation of the toy trigram-hash embedder from its
// published definition: normalize (lowercase, collapse whitespace), hash
// every character trigram (the whole string when shorter than 3) with FNV-1a
// 64, add weight (h>>32)/2^32*2-1 into bucket h mod dim, unit-normalize;
// all-cancelled vectors fall back to the basis vector at fnv(text) mod dim.
// ---------------------------------------------------------------------------
inline std::string oracle_normalize(const std::string& text) {
  std::string lowered;
  lowered.reserve(text.size());
  for (char ch : text) {
    unsigned char uc = static_cast<unsigned char>(ch);
    lowered.push_back(
        std::isspace(uc) ? ' ' : static_cast<char>(std::tolower(uc)));
  }
  std::istringstream in(lowered);
  std::string word, out;
  while (in >> word) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

inline std::uint64_t oracle_fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  return h;
}

inline std::vector<double> oracle_embed(const std::string& text,
                                        std::size_t dim) {
  const std::string norm = oracle_normalize(text);
  std::vector<double> v(dim, 0.0);
  std::vector<std::string> grams;
  if (norm.size() < 3) {
    grams.push_back(norm);
  } else {
    for (std::size_t i = 0; i + 3 <= norm.size(); ++i)
      grams.push_back(norm.substr(i, 3));
  }
  for (const std::string& g : grams) {
    const std::uint64_t h = oracle_fnv1a64(g);
    const double w =
        static_cast<double>(h >> 32) / 4294967296.0 * 2.0 - 1.0;
    v[h % dim] += w;
  }
  const double n2 = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
  if (n2 <= 1e-24) {
    std::fill(v.begin(), v.end(), 0.0);
    v[oracle_fnv1a64(norm) % dim] = 1.0;
    return v;
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
  return v;
}

// ---------------------------------------------------------------------------
// Subprocess helper for CLI-level tests. Runs via /bin/sh, captures stdout;
// callers append "2>..." redirections themselves when stderr matters.
// ---------------------------------------------------------------------------
struct CmdResult {
  int status = -1;
  std::string out;
};

inline CmdResult run_cmd(const std::string& cmd) {
  CmdResult res;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return res;
  char buf[4096];
  std::size_t r;
  while ((r = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, r);
  const int rc = ::pclose(pipe);
  res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

// Fresh scratch directory under the system temp root.
inline std::string make_temp_dir(const std::string& tag) {
  static int counter = 0;
  const auto path = std::filesystem::temp_directory_path() /
                    ("imagery_test_" + tag + "_" +
                     std::to_string(::getpid()) + "_" +
                     std::to_string(counter++));
  std::filesystem::create_directories(path);
  return path.string();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) return;
  std::fwrite(content.data(), 1, content.size(), f);
  std::fclose(f);
}

}  // namespace oracle

// Captures an imagery::Error thrown by fn, or nullopt when nothing throws.
// Kept outside namespace oracle: pure test plumbing, not an oracle.
#include <optional>

#include "imagery/error.hpp"

template <typename Fn>
std::optional<imagery::Error> err_of(Fn&& fn) {
  try {
    fn();
  } catch (const imagery::Error& e) {
    return e;
  }
  return std::nullopt;
}

inline bool msg_has(const imagery::Error& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}
