#pragma once

#include <optional>
#include <vector>

#include "fiax/matrix.hpp"

namespace fiax {

struct RrefResult {
  Mat r;
  std::vector<int> pivots;  // pivot columns, ascending
  int rank() const { return (int)pivots.size(); }
};

// Reduced row-echelon form with deterministic pivoting (first nonzero).
RrefResult rref(const Mat& m);

int rank(const Mat& m);

// Columns span {x : m x = 0}; one canonical vector per free column.
Mat kernel_basis(const Mat& m);

// Exact solution of m x = b, or nullopt when b is outside the column space.
std::optional<std::vector<Scalar>> solve(const Mat& m, const std::vector<Scalar>& b);

// Solve m X = B column-by-column; nullopt if any column is inconsistent.
std::optional<Mat> solve_matrix(const Mat& m, const Mat& b);

// Solve X m = B (i.e. act on the left); nullopt if inconsistent.
std::optional<Mat> solve_left(const Mat& m, const Mat& b);

// Quotient of the ambient row space by im(m): projection has full row rank,
// projection * m = 0, and section picks canonical representatives
// (projection * section = identity on the quotient).
struct CokernelResult {
  Mat projection;  // dim x rows(m)
  Mat section;     // rows(m) x dim, columns are standard basis vectors
  int dim = 0;
};
CokernelResult cokernel(const Mat& m);

// Inverse of a square matrix, or nullopt when singular.
std::optional<Mat> inverse(const Mat& m);

}  // namespace fiax
