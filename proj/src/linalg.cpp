#include "formlab/linalg.hpp"

#include <algorithm>

namespace formlab {

namespace {

void reduce_row_content(std::vector<Int>& row) {
  Int g = content(row);
  if (g > 1) {
    for (Int& v : row) v /= g;
  }
}

}  // namespace

RankCertificate exact_rank_with_certificate(const IMat& m) {
  int rows = static_cast<int>(m.size());
  int cols = rows ? static_cast<int>(m.front().size()) : 0;
  if (rows == 0) return {0, std::nullopt};

  // Work on [M | I]; row operations keep the identity part recording how each
  // current row combines the original ones.
  IMat work(rows, std::vector<Int>(cols + rows, Int(0)));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) work[i][j] = m[i][j];
    work[i][cols + i] = 1;
  }

  std::vector<bool> used(rows, false);
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int i = 0; i < rows; ++i) {
      if (!used[i] && work[i][col] != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot == -1) continue;
    used[pivot] = true;
    ++rank;
    for (int i = 0; i < rows; ++i) {
      if (used[i] || work[i][col] == 0) continue;
      Int piv = work[pivot][col];
      Int fac = work[i][col];
      for (int j = 0; j < cols + rows; ++j) {
        work[i][j] = piv * work[i][j] - fac * work[pivot][j];
      }
      reduce_row_content(work[i]);
    }
  }

  for (int i = 0; i < rows; ++i) {
    if (used[i]) continue;
    bool zero = true;
    for (int j = 0; j < cols; ++j) {
      if (work[i][j] != 0) {
        zero = false;
        break;
      }
    }
    if (zero) {
      std::vector<Int> b(work[i].begin() + cols, work[i].end());
      return {rank, primitive_vector(std::move(b))};
    }
  }
  return {rank, std::nullopt};
}

int rank(const IMat& m) { return exact_rank_with_certificate(m).rank; }

Int determinant(IMat a) {
  int n = static_cast<int>(a.size());
  for (auto& row : a) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("determinant of non-square matrix");
  }
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k][k] == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i) {
        if (a[i][k] != 0) {
          swap = i;
          break;
        }
      }
      if (swap == -1) return 0;
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;  // Bareiss: division exact
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign > 0 ? a[n - 1][n - 1] : Int(-a[n - 1][n - 1]);
}

IMat adjugate(const IMat& m) {
  int n = static_cast<int>(m.size());
  for (const auto& row : m) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("adjugate of non-square matrix");
  }
  IMat adj(n, std::vector<Int>(n, Int(0)));
  if (n == 0) return adj;
  if (n == 1) {
    adj[0][0] = 1;
    return adj;
  }
  IMat minor(n - 1, std::vector<Int>(n - 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor[mr][mc++] = m[r][c];
        }
        ++mr;
      }
      Int cof = determinant(minor);
      adj[j][i] = ((i + j) % 2 == 0) ? cof : Int(-cof);
    }
  }
  return adj;
}

IMat transpose(const IMat& m) {
  if (m.empty()) return {};
  IMat t(m.front().size(), std::vector<Int>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.front().size(); ++j) t[j][i] = m[i][j];
  }
  return t;
}

}  // namespace formlab
