// Copyright 2026 The Axonfield Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS-IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AXONFIELD_BAND_MATRIX_HPP
#define AXONFIELD_BAND_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "axonfield/constants.hpp"

namespace axonfield {

/// General banded matrix with LU factorization and partial pivoting,
/// LAPACK-style band storage with kl extra superdiagonals for pivot fill-in.
class BandMatrix {
 public:
  BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
        ab_(ldab_ * n, 0.0), piv_(n, 0) {}

  std::size_t size() const { return n_; }

  void clear() {
    std::fill(ab_.begin(), ab_.end(), 0.0);
    factored_ = false;
  }

  double& at(std::size_t i, std::size_t j) {
    // valid for j - ku <= i <= j + kl (plus fill rows used by the factorization)
    return ab_[j * ldab_ + (i - j + kl_ + ku_)];
  }
  double get(std::size_t i, std::size_t j) const {
    std::ptrdiff_t d = std::ptrdiff_t(i) - std::ptrdiff_t(j);
    if (d < -std::ptrdiff_t(ku_) || d > std::ptrdiff_t(kl_)) return 0.0;
    return ab_[j * ldab_ + (i - j + kl_ + ku_)];
  }
  void add(std::size_t i, std::size_t j, double v) {
    std::ptrdiff_t d = std::ptrdiff_t(i) - std::ptrdiff_t(j);
    if (d < -std::ptrdiff_t(ku_) || d > std::ptrdiff_t(kl_))
      throw std::logic_error("BandMatrix::add outside band");
    at(i, j) += v;
  }

  /// y = A x for the unfactored matrix.
  std::vector<double> multiply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      std::size_t i0 = (j >= ku_) ? j - ku_ : 0;
      std::size_t i1 = std::min(n_ - 1, j + kl_);
      for (std::size_t i = i0; i <= i1; ++i)
        y[i] += ab_[j * ldab_ + (i - j + kl_ + ku_)] * x[j];
    }
    return y;
  }

  void factorize() {
    const std::size_t kv = kl_ + ku_;  // superdiagonals incl. fill
    for (std::size_t j = 0; j < n_; ++j) {
      std::size_t ilast = std::min(n_ - 1, j + kl_);
      std::size_t imax = j;
      double amax = std::abs(at(j, j));
      for (std::size_t i = j + 1; i <= ilast; ++i) {
        double a = std::abs(at(i, j));
        if (a > amax) {
          amax = a;
          imax = i;
        }
      }
      if (amax == 0.0)
        throw NumericalError("BandMatrix: singular at column " +
                             std::to_string(j));
      piv_[j] = static_cast<int>(imax);
      std::size_t clast = std::min(n_ - 1, j + kv);
      if (imax != j)
        for (std::size_t c = j; c <= clast; ++c)
          std::swap(at(j, c), at(imax, c));
      const double inv = 1.0 / at(j, j);
      for (std::size_t i = j + 1; i <= ilast; ++i) {
        double l = at(i, j) * inv;
        at(i, j) = l;
        if (l != 0.0)
          for (std::size_t c = j + 1; c <= clast; ++c)
            at(i, c) -= l * at(j, c);
      }
    }
    factored_ = true;
  }

  /// Solves A x = b in place; factorize() must have run.
  void solve(std::vector<double>& b) const {
    if (!factored_) throw std::logic_error("BandMatrix::solve before factorize");
    const std::size_t kv = kl_ + ku_;
    for (std::size_t j = 0; j < n_; ++j) {
      std::size_t p = static_cast<std::size_t>(piv_[j]);
      if (p != j) std::swap(b[j], b[p]);
      std::size_t ilast = std::min(n_ - 1, j + kl_);
      const double bj = b[j];
      for (std::size_t i = j + 1; i <= ilast; ++i)
        b[i] -= ab_[j * ldab_ + (i - j + kl_ + ku_)] * bj;
    }
    for (std::size_t jj = n_; jj-- > 0;) {
      std::size_t clast = std::min(n_ - 1, jj + kv);
      double s = b[jj];
      for (std::size_t c = jj + 1; c <= clast; ++c)
        s -= ab_[c * ldab_ + (jj - c + kl_ + ku_)] * b[c];
      b[jj] = s / ab_[jj * ldab_ + (kl_ + ku_)];
    }
  }

 private:
  std::size_t n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
  std::vector<int> piv_;
  bool factored_ = false;
};

}  // namespace axonfield

#endif  // AXONFIELD_BAND_MATRIX_HPP
