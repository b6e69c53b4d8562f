#pragma once

// Dense two-phase simplex (Bland's rule on degeneracy).
//   maximize c^T x  subject to  A x <= b,  x >= 0

#include <cmath>
#include <limits>
#include <vector>

namespace nestedeq::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

class Simplex {
 public:
  Simplex(const std::vector<std::vector<double>>& A, const std::vector<double>& b, const std::vector<double>& c)
      : m_(int(b.size())), n_(int(c.size())), N_(std::size_t(n_) + 1), B_(std::size_t(m_)),
        D_(std::size_t(m_) + 2, std::vector<double>(std::size_t(n_) + 2, 0.0)) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) D_[i][j] = A[i][j];
    }
    for (int i = 0; i < m_; ++i) {
      B_[i] = n_ + i;
      D_[i][n_] = -1;
      D_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      N_[j] = j;
      D_[m_][j] = -c[j];
    }
    N_[n_] = -1;
    D_[m_ + 1][n_] = 1;
  }

  Result solve() {
    Result r;
    int row = 0;
    for (int i = 1; i < m_; ++i) {
      if (D_[i][n_ + 1] < D_[row][n_ + 1]) row = i;
    }
    if (m_ > 0 && D_[row][n_ + 1] < -kEps) {
      pivot(row, n_);
      if (!run(2) || D_[m_ + 1][n_ + 1] < -kEps) return r;
      for (int i = 0; i < m_; ++i) {
        if (B_[i] == -1) {
          int s = 0;
          for (int j = 1; j <= n_; ++j) {
            if (s == -1 || D_[i][j] < D_[i][s] || (D_[i][j] == D_[i][s] && N_[j] < N_[s])) s = j;
          }
          pivot(i, s);
        }
      }
    }
    if (!run(1)) {
      r.status = Status::unbounded;
      r.value = std::numeric_limits<double>::infinity();
      return r;
    }
    r.status = Status::optimal;
    r.x.assign(std::size_t(n_), 0.0);
    for (int i = 0; i < m_; ++i) {
      if (B_[i] < n_) r.x[B_[i]] = D_[i][n_ + 1];
    }
    r.value = D_[m_][n_ + 1];
    return r;
  }

 private:
  static constexpr double kEps = 1e-11;

  void pivot(int r, int s) {
    const double inv = 1.0 / D_[r][s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(D_[i][s]) <= kEps) continue;
      const double f = D_[i][s] * inv;
      for (int j = 0; j < n_ + 2; ++j) D_[i][j] -= D_[r][j] * f;
      D_[i][s] = D_[r][s] * f;
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) D_[r][j] *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) D_[i][s] *= -inv;
    }
    D_[r][s] = inv;
    std::swap(B_[r], N_[s]);
  }

  bool run(int phase) {
    const int x = m_ + phase - 1;
    for (;;) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (N_[j] == -phase) continue;
        if (s == -1 || D_[x][j] < D_[x][s] || (D_[x][j] == D_[x][s] && N_[j] < N_[s])) s = j;
      }
      if (D_[x][s] >= -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (D_[i][s] <= kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = D_[i][n_ + 1] / D_[i][s];
        const double rhs = D_[r][n_ + 1] / D_[r][s];
        if (lhs < rhs || (lhs == rhs && B_[i] < B_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_, n_;
  std::vector<int> N_, B_;
  std::vector<std::vector<double>> D_;
};

inline Result maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                       const std::vector<double>& c) {
  return Simplex(A, b, c).solve();
}

}  // namespace nestedeq::lp
