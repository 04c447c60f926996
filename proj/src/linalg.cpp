#include "fiax/linalg.hpp"

#include <cassert>

namespace fiax {

RrefResult rref(const Mat& m) {
  Mat r = m;
  const int nr = r.rows(), nc = r.cols();
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < nc && row < nr; ++col) {
    int p = -1;
    for (int i = row; i < nr; ++i)
      if (!r.at(i, col).is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != row)
      for (int j = col; j < nc; ++j) std::swap(r.at(p, j), r.at(row, j));
    Scalar inv = r.at(row, col).inv();
    for (int j = col; j < nc; ++j)
      if (!r.at(row, j).is_zero()) r.at(row, j) *= inv;
    for (int i = 0; i < nr; ++i) {
      if (i == row) continue;
      const Scalar f = r.at(i, col);
      if (f.is_zero()) continue;
      for (int j = col; j < nc; ++j) {
        const Scalar& s = r.at(row, j);
        if (!s.is_zero()) r.at(i, j) -= f * s;
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(r), std::move(pivots)};
}

int rank(const Mat& m) { return rref(m).rank(); }

Mat kernel_basis(const Mat& m) {
  RrefResult rr = rref(m);
  const int nc = m.cols();
  std::vector<bool> is_pivot(nc, false);
  for (int p : rr.pivots) is_pivot[p] = true;
  std::vector<int> free_cols;
  for (int j = 0; j < nc; ++j)
    if (!is_pivot[j]) free_cols.push_back(j);
  Mat k(m.field(), nc, (int)free_cols.size());
  for (int t = 0; t < (int)free_cols.size(); ++t) {
    int j = free_cols[t];
    k.at(j, t) = Scalar(m.field(), 1);
    for (int i = 0; i < rr.rank(); ++i) k.at(rr.pivots[i], t) = -rr.r.at(i, j);
  }
  return k;
}

std::optional<std::vector<Scalar>> solve(const Mat& m, const std::vector<Scalar>& b) {
  assert((int)b.size() == m.rows());
  Mat bm(m.field(), m.rows(), 1);
  bm.set_col(0, b);
  auto x = solve_matrix(m, bm);
  if (!x) return std::nullopt;
  return x->col(0);
}

std::optional<Mat> solve_matrix(const Mat& m, const Mat& b) {
  assert(m.rows() == b.rows());
  RrefResult rr = rref(Mat::hstack(m, b));
  // Any pivot landing in the b-block witnesses inconsistency.
  for (int p : rr.pivots)
    if (p >= m.cols()) return std::nullopt;
  Mat x(m.field(), m.cols(), b.cols());
  for (int i = 0; i < rr.rank(); ++i)
    for (int j = 0; j < b.cols(); ++j) x.at(rr.pivots[i], j) = rr.r.at(i, m.cols() + j);
  return x;
}

std::optional<Mat> solve_left(const Mat& m, const Mat& b) {
  auto x = solve_matrix(m.transpose(), b.transpose());
  if (!x) return std::nullopt;
  return x->transpose();
}

CokernelResult cokernel(const Mat& m) {
  // Row-reduce the transpose: its nonzero rows span im(m) as row vectors.
  RrefResult rr = rref(m.transpose());
  const int amb = m.rows();
  std::vector<bool> is_pivot(amb, false);
  for (int p : rr.pivots) is_pivot[p] = true;
  std::vector<int> free_coords;
  for (int j = 0; j < amb; ++j)
    if (!is_pivot[j]) free_coords.push_back(j);
  const int q = (int)free_coords.size();
  CokernelResult res;
  res.dim = q;
  res.projection = Mat(m.field(), q, amb);
  res.section = Mat(m.field(), amb, q);
  for (int t = 0; t < q; ++t) {
    res.projection.at(t, free_coords[t]) = Scalar(m.field(), 1);
    for (int k = 0; k < rr.rank(); ++k)
      res.projection.at(t, rr.pivots[k]) = -rr.r.at(k, free_coords[t]);
    res.section.at(free_coords[t], t) = Scalar(m.field(), 1);
  }
  return res;
}

std::optional<Mat> inverse(const Mat& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  auto x = solve_matrix(m, Mat::identity(m.field(), m.rows()));
  if (!x) return std::nullopt;
  if (!((*x) * m).is_identity()) return std::nullopt;  // rank-deficient solve
  return x;
}

}  // namespace fiax
