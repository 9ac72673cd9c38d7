#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "drift/errors.hpp"

namespace drift {

namespace detail {

/// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major d x d).
/// Returns eigenvalues and the matching eigenvectors as rows of `vectors`.
/// Deterministic: fixed sweep order and convergence threshold.
struct SymmetricEigen {
  std::vector<double> values;               // d
  std::vector<std::vector<double>> vectors; // d rows of length d
};

inline SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t d) {
  std::vector<double> v(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;

  auto off_norm2 = [&] {
    double s = 0;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) s += a[p * d + q] * a[p * d + q];
    }
    return s;
  };
  double frob2 = 0;
  for (double x : a) frob2 += x * x;
  const double tol = 1e-28 * (frob2 > 0 ? frob2 : 1.0);

  for (int sweep = 0; sweep < 100 && off_norm2() > tol; ++sweep) {
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a[p * d + q];
        if (apq == 0.0) continue;
        const double app = a[p * d + p];
        const double aqq = a[q * d + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a[k * d + p];
          const double akq = a[k * d + q];
          a[k * d + p] = c * akp - s * akq;
          a[k * d + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a[p * d + k];
          const double aqk = a[q * d + k];
          a[p * d + k] = c * apk - s * aqk;
          a[q * d + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v[k * d + p];
          const double vkq = v[k * d + q];
          v[k * d + p] = c * vkp - s * vkq;
          v[k * d + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  SymmetricEigen out;
  out.values.resize(d);
  out.vectors.assign(d, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i) {
    out.values[i] = a[i * d + i];
    for (std::size_t k = 0; k < d; ++k) out.vectors[i][k] = v[k * d + i];
  }
  return out;
}

/// Flips the vector so its largest-magnitude entry (smallest index on ties)
/// is positive.
inline void fix_component_sign(std::vector<double>& comp) {
  std::size_t arg = 0;
  for (std::size_t j = 1; j < comp.size(); ++j) {
    if (std::abs(comp[j]) > std::abs(comp[arg])) arg = j;
  }
  if (comp[arg] < 0) {
    for (auto& x : comp) x = -x;
  }
}

}  // namespace detail

/// Top-2 principal components of the mean-centered point set, with the
/// deterministic sign convention applied.
struct Pca2 {
  std::vector<double> mean;
  std::vector<double> component1, component2;  // unit vectors, length d
  double variance1 = 0, variance2 = 0;         // variance1 >= variance2
};

inline Pca2 principal_components_2(
    const std::vector<std::vector<double>>& points) {
  if (points.size() < 3) throw ConfigError("reduce_2d needs >= 3 points");
  const std::size_t d = points[0].size();
  if (d < 2) throw ConfigError("reduce_2d needs dimension >= 2");
  double scale = 0;
  for (const auto& p : points) {
    if (p.size() != d) throw ConfigError("points must share one dimension");
    for (double x : p) {
      if (!std::isfinite(x)) throw ConfigError("non-finite point coordinate");
      scale = std::max(scale, std::abs(x));
    }
  }

  Pca2 out;
  out.mean.assign(d, 0.0);
  for (const auto& p : points) {
    for (std::size_t j = 0; j < d; ++j) out.mean[j] += p[j];
  }
  for (auto& m : out.mean) m /= static_cast<double>(points.size());

  std::vector<double> cov(d * d, 0.0);
  for (const auto& p : points) {
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = p[i] - out.mean[i];
      for (std::size_t j = i; j < d; ++j) {
        cov[i * d + j] += xi * (p[j] - out.mean[j]);
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov[i * d + j] /= static_cast<double>(points.size());
      cov[j * d + i] = cov[i * d + j];
    }
  }

  double trace = 0;
  for (std::size_t i = 0; i < d; ++i) trace += cov[i * d + i];
  const double floor = 1e-12 * scale;
  if (trace <= floor * floor) {
    throw DegenerateGeometryError("all points identical; no principal axes");
  }

  auto eig = detail::jacobi_eigen(std::move(cov), d);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return eig.values[a] > eig.values[b];
  });

  out.component1 = std::move(eig.vectors[order[0]]);
  out.component2 = std::move(eig.vectors[order[1]]);
  out.variance1 = eig.values[order[0]];
  out.variance2 = eig.values[order[1]];
  detail::fix_component_sign(out.component1);
  detail::fix_component_sign(out.component2);
  return out;
}

/// PCA projection of the points onto their top-2 principal axes.
inline std::vector<std::array<double, 2>> reduce_2d(
    const std::vector<std::vector<double>>& points) {
  const Pca2 pca = principal_components_2(points);
  const std::size_t d = pca.mean.size();
  std::vector<std::array<double, 2>> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    double x = 0, y = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = p[j] - pca.mean[j];
      x += c * pca.component1[j];
      y += c * pca.component2[j];
    }
    out.push_back({x, y});
  }
  return out;
}

}  // namespace drift
