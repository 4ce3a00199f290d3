#pragma once

// Small dense containers for n <= 4 tensor algebra over any jet tier.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "projflat/errors.hpp"
#include "projflat/jet.hpp"

namespace projflat {

template <class T>
using Vec = std::vector<T>;

template <class T>
class Mat {
 public:
  Mat() = default;
  explicit Mat(int n) : n_(n), d_(static_cast<std::size_t>(n) * n, T(0.0)) {}

  static Mat identity(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = T(1.0);
    }
    return m;
  }

  int dim() const noexcept { return n_; }
  T& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * n_ + j]; }
  const T& operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }

 private:
  int n_ = 0;
  std::vector<T> d_;
};

// T^i_jk stored with the upper index first.
template <class T>
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), d_(static_cast<std::size_t>(n) * n * n, T(0.0)) {}

  int dim() const noexcept { return n_; }
  T& operator()(int i, int j, int k) { return d_[idx(i, j, k)]; }
  const T& operator()(int i, int j, int k) const { return d_[idx(i, j, k)]; }

 private:
  std::size_t idx(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  int n_ = 0;
  std::vector<T> d_;
};

template <class T>
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), d_(static_cast<std::size_t>(n) * n * n * n, T(0.0)) {}

  int dim() const noexcept { return n_; }
  T& operator()(int i, int j, int k, int l) { return d_[idx(i, j, k, l)]; }
  const T& operator()(int i, int j, int k, int l) const { return d_[idx(i, j, k, l)]; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : d_) {
      m = std::max(m, std::abs(value_of(v)));
    }
    return m;
  }

 private:
  std::size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }
  int n_ = 0;
  std::vector<T> d_;
};

template <class T>
T dot(const Vec<T>& u, const Vec<T>& v) {
  T acc(0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += u[i] * v[i];
  }
  return acc;
}

template <class T>
Vec<T> mat_vec(const Mat<T>& m, const Vec<T>& v) {
  const int n = m.dim();
  Vec<T> out(n, T(0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out[i] += m(i, j) * v[j];
    }
  }
  return out;
}

/// m_ij u^i v^j
template <class T>
T bilinear(const Mat<T>& m, const Vec<T>& u, const Vec<T>& v) {
  T acc(0.0);
  const int n = m.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      acc += m(i, j) * u[i] * v[j];
    }
  }
  return acc;
}

template <class T>
double max_abs(const Vec<T>& v) {
  double m = 0.0;
  for (const auto& x : v) {
    m = std::max(m, std::abs(value_of(x)));
  }
  return m;
}

template <class T>
double max_abs(const Mat<T>& a) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) {
      m = std::max(m, std::abs(value_of(a(i, j))));
    }
  }
  return m;
}

inline constexpr double kConditionLimit = 1e12;

/// Gauss-Jordan inverse with partial pivoting on leading values.  Throws
/// SingularMatrixError when a pivot vanishes or the infinity-norm condition
/// estimate exceeds kConditionLimit.
template <class T>
Mat<T> inverse(const Mat<T>& m) {
  const int n = m.dim();
  Mat<T> a = m;
  Mat<T> inv = Mat<T>::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(value_of(a(col, col)));
    for (int r = col + 1; r < n; ++r) {
      const double cand = std::abs(value_of(a(r, col)));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (best == 0.0) {
      throw SingularMatrixError("matrix is singular");
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(col, j), a(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    }
    const T p = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) = a(col, j) / p;
      inv(col, j) = inv(col, j) / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) {
        continue;
      }
      const T f = a(r, col);
      if (value_of(f) == 0.0 && !is_jet_v<T>) {
        continue;
      }
      for (int j = 0; j < n; ++j) {
        a(r, j) = a(r, j) - f * a(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }

  auto row_norm = [n](const Mat<T>& x) {
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        s += std::abs(value_of(x(i, j)));
      }
      best = std::max(best, s);
    }
    return best;
  };
  const double cond = row_norm(m) * row_norm(inv);
  if (!(cond <= kConditionLimit)) {
    throw SingularMatrixError("matrix condition estimate " + std::to_string(cond) +
                              " exceeds 1e12");
  }
  return inv;
}

/// Value parts of a vector at any jet tier.
template <class T>
Vec<double> values(const Vec<T>& v) {
  Vec<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    out.push_back(value_of(x));
  }
  return out;
}

/// max |l - r| / max(1, max|l|, max|r|): relative for large entries,
/// absolute near zero.
inline double rel_residual(const Vec<double>& l, const Vec<double>& r) {
  double diff = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    diff = std::max(diff, std::abs(l[i] - r[i]));
    scale = std::max({scale, std::abs(l[i]), std::abs(r[i])});
  }
  return diff / scale;
}

inline double rel_residual(const Mat<double>& l, const Mat<double>& r) {
  double diff = 0.0;
  double scale = 1.0;
  for (int i = 0; i < l.dim(); ++i) {
    for (int j = 0; j < l.dim(); ++j) {
      diff = std::max(diff, std::abs(l(i, j) - r(i, j)));
      scale = std::max({scale, std::abs(l(i, j)), std::abs(r(i, j))});
    }
  }
  return diff / scale;
}

inline double rel_residual(double l, double r) {
  return std::abs(l - r) / std::max({1.0, std::abs(l), std::abs(r)});
}

}  // namespace projflat
