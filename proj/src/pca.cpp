#include "imagery/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "imagery/error.hpp"
#include "imagery/kernels.hpp"

namespace imagery {
namespace {

// Cyclic Jacobi on a symmetric matrix (row-major). On return the diagonal
// of `a` holds eigenvalues and the columns of `v` the eigenvectors.
void jacobi_eigen(std::vector<double>& a, std::size_t m,
                  std::vector<double>& v) {
  v.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) v[i * m + i] = 1.0;
  if (m < 2) return;

  double total = 0.0;
  for (std::size_t i = 0; i < m * m; ++i) total += a[i] * a[i];
  const double stop = total * 1e-28 + 1e-300;

  for (int sweep = 0; sweep < 128; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) off += 2.0 * a[p * m + q] * a[p * m + q];
    if (off <= stop) break;

    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        double apq = a[p * m + q];
        if (apq == 0.0) continue;
        double theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          double akp = a[k * m + p], akq = a[k * m + q];
          a[k * m + p] = c * akp - s * akq;
          a[k * m + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          double apk = a[p * m + k], aqk = a[q * m + k];
          a[p * m + k] = c * apk - s * aqk;
          a[q * m + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < m; ++k) {
          double vkp = v[k * m + p], vkq = v[k * m + q];
          v[k * m + p] = c * vkp - s * vkq;
          v[k * m + q] = s * vkp + c * vkq;
        }
      }
    }
  }
}

void apply_sign_convention(Vec& component) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < component.size(); ++i)
    if (std::fabs(component[i]) > std::fabs(component[imax])) imax = i;
  if (component[imax] < 0.0)
    for (double& x : component) x = -x;
}

}  // namespace

Pca pca_fit(const std::vector<Vec>& rows, std::size_t k) {
  const std::size_t n = rows.size();
  if (n < 2) throw Error(ErrorKind::InvalidInput, "pca_fit: need >= 2 vectors");
  const std::size_t d = rows[0].size();
  if (d < 1) throw Error(ErrorKind::InvalidInput, "pca_fit: zero-dim vectors");
  for (const Vec& r : rows)
    if (r.size() != d)
      throw Error(ErrorKind::InvalidInput, "pca_fit: mixed dims");
  if (k < 1 || k > d)
    throw Error(ErrorKind::InvalidInput, "pca_fit: bad target dimension");

  Pca pca;
  pca.dim = d;
  pca.mean.assign(d, 0.0);
  for (const Vec& r : rows) kern::axpy(pca.mean.data(), 1.0, r.data(), d);
  kern::scale(pca.mean.data(), 1.0 / static_cast<double>(n), pca.mean.data(),
              d);

  std::vector<Vec> centered(n, Vec(d));
  for (std::size_t i = 0; i < n; ++i)
    kern::axpby(centered[i].data(), 1.0, rows[i].data(), -1.0,
                pca.mean.data(), d);

  const double inv = 1.0 / static_cast<double>(n - 1);
  std::vector<double> sym;
  std::vector<double> evec;
  std::size_t m;

  const bool dual = d > n;  // Gram route: eigen of X Xᵀ instead of Xᵀ X
  if (dual) {
    m = n;
    sym.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        double g = kern::dot(centered[i].data(), centered[j].data(), d) * inv;
        sym[i * m + j] = g;
        sym[j * m + i] = g;
      }
  } else {
    m = d;
    sym.assign(m * m, 0.0);
    for (const Vec& c : centered)
      for (std::size_t i = 0; i < d; ++i) {
        if (c[i] == 0.0) continue;
        for (std::size_t j = i; j < d; ++j) sym[i * d + j] += c[i] * c[j];
      }
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        sym[i * d + j] *= inv;
        sym[j * d + i] = sym[i * d + j];
      }
  }

  jacobi_eigen(sym, m, evec);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sym[a * m + a] > sym[b * m + b];
  });

  const double ev_max = std::max(sym[order[0] * m + order[0]], 0.0);
  const double rank_tol = ev_max * 1e-10 + 1e-14;
  std::size_t rank = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (sym[order[i] * m + order[i]] > rank_tol) ++rank;
  rank = std::min(rank, std::min(n - 1, d));
  if (rank < k) {
    Error err(ErrorKind::DegenerateRank,
              "pca_fit: data rank " + std::to_string(rank) +
                  " < requested " + std::to_string(k));
    err.rank = static_cast<int>(rank);
    throw err;
  }

  pca.components.assign(k, Vec(d, 0.0));
  pca.eigenvalues.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t idx = order[c];
    const double ev = sym[idx * m + idx];
    pca.eigenvalues[c] = ev;
    Vec& comp = pca.components[c];
    if (dual) {
      // u = Xᵀ v / sqrt((n-1)·λ) maps a Gram eigenvector to the
      // covariance eigenvector with the same eigenvalue.
      for (std::size_t i = 0; i < n; ++i)
        kern::axpy(comp.data(), evec[i * m + idx], centered[i].data(), d);
      kern::scale(comp.data(),
                  1.0 / std::sqrt(ev * static_cast<double>(n - 1)),
                  comp.data(), d);
    } else {
      for (std::size_t i = 0; i < d; ++i) comp[i] = evec[i * m + idx];
    }
    apply_sign_convention(comp);
  }
  return pca;
}

Vec pca_transform(const Pca& pca, const Vec& x) {
  if (x.size() != pca.dim)
    throw Error(ErrorKind::InvalidInput, "pca_transform: dim mismatch");
  Vec centered(pca.dim);
  kern::axpby(centered.data(), 1.0, x.data(), -1.0, pca.mean.data(), pca.dim);
  Vec out(pca.components.size());
  for (std::size_t c = 0; c < pca.components.size(); ++c)
    out[c] = kern::dot(centered.data(), pca.components[c].data(), pca.dim);
  return out;
}

std::vector<Vec> pca_project(const std::vector<Vec>& rows, std::size_t k) {
  Pca pca = pca_fit(rows, k);
  std::vector<Vec> out;
  out.reserve(rows.size());
  for (const Vec& r : rows) out.push_back(pca_transform(pca, r));
  return out;
}

}  // namespace imagery
