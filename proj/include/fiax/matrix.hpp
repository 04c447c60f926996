#pragma once

#include <vector>

#include "fiax/field.hpp"

namespace fiax {

// Dense row-major matrix over a fixed field. All arithmetic is exact.
class Mat {
 public:
  Mat() = default;
  Mat(Field f, int rows, int cols)
      : fld_(f), rows_(rows), cols_(cols),
        e_((size_t)rows * cols, Scalar(f)) {}
  static Mat identity(Field f, int n) {
    Mat m(f, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Scalar(f, 1);
    return m;
  }

  const Field& field() const { return fld_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Scalar& at(int r, int c) { return e_[(size_t)r * cols_ + c]; }
  const Scalar& at(int r, int c) const { return e_[(size_t)r * cols_ + c]; }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
  }
  bool operator!=(const Mat& o) const { return !(*this == o); }
  bool is_zero() const {
    for (const auto& s : e_)
      if (!s.is_zero()) return false;
    return true;
  }
  bool is_identity() const;

  Mat operator*(const Mat& o) const;
  Mat operator+(const Mat& o) const;
  Mat operator-(const Mat& o) const;
  Mat scaled(const Scalar& c) const;
  Mat transpose() const;

  std::vector<Scalar> apply(const std::vector<Scalar>& v) const;
  std::vector<Scalar> col(int c) const;
  void set_col(int c, const std::vector<Scalar>& v);

  static Mat hstack(const Mat& a, const Mat& b);
  static Mat vstack(const Mat& a, const Mat& b);

 private:
  Field fld_{};
  int rows_ = 0, cols_ = 0;
  std::vector<Scalar> e_;
};

}  // namespace fiax
