#include "fiax/matrix.hpp"

#include <cassert>

namespace fiax {

bool Mat::is_identity() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) {
      const Scalar& s = at(i, j);
      if (i == j ? !s.is_one() : !s.is_zero()) return false;
    }
  return true;
}

Mat Mat::operator*(const Mat& o) const {
  assert(cols_ == o.rows_ && fld_ == o.fld_);
  Mat r(fld_, rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Scalar& s = at(i, k);
      if (s.is_zero()) continue;  // structure matrices are mostly 0/1
      for (int j = 0; j < o.cols_; ++j) {
        const Scalar& t = o.at(k, j);
        if (!t.is_zero()) r.at(i, j) += s * t;
      }
    }
  return r;
}

Mat Mat::operator+(const Mat& o) const {
  assert(rows_ == o.rows_ && cols_ == o.cols_);
  Mat r = *this;
  for (size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
  return r;
}

Mat Mat::operator-(const Mat& o) const {
  assert(rows_ == o.rows_ && cols_ == o.cols_);
  Mat r = *this;
  for (size_t i = 0; i < e_.size(); ++i) r.e_[i] -= o.e_[i];
  return r;
}

Mat Mat::scaled(const Scalar& c) const {
  Mat r = *this;
  for (auto& s : r.e_) s *= c;
  return r;
}

Mat Mat::transpose() const {
  Mat r(fld_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

std::vector<Scalar> Mat::apply(const std::vector<Scalar>& v) const {
  assert((int)v.size() == cols_);
  std::vector<Scalar> r(rows_, Scalar(fld_));
  for (int j = 0; j < cols_; ++j) {
    if (v[j].is_zero()) continue;
    for (int i = 0; i < rows_; ++i) {
      const Scalar& s = at(i, j);
      if (!s.is_zero()) r[i] += s * v[j];
    }
  }
  return r;
}

std::vector<Scalar> Mat::col(int c) const {
  std::vector<Scalar> r(rows_, Scalar(fld_));
  for (int i = 0; i < rows_; ++i) r[i] = at(i, c);
  return r;
}

void Mat::set_col(int c, const std::vector<Scalar>& v) {
  assert((int)v.size() == rows_);
  for (int i = 0; i < rows_; ++i) at(i, c) = v[i];
}

Mat Mat::hstack(const Mat& a, const Mat& b) {
  assert(a.rows_ == b.rows_);
  Mat r(a.fld_, a.rows_, a.cols_ + b.cols_);
  for (int i = 0; i < a.rows_; ++i) {
    for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
    for (int j = 0; j < b.cols_; ++j) r.at(i, a.cols_ + j) = b.at(i, j);
  }
  return r;
}

Mat Mat::vstack(const Mat& a, const Mat& b) {
  assert(a.cols_ == b.cols_);
  Mat r(a.fld_, a.rows_ + b.rows_, a.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
  for (int i = 0; i < b.rows_; ++i)
    for (int j = 0; j < a.cols_; ++j) r.at(a.rows_ + i, j) = b.at(i, j);
  return r;
}

}  // namespace fiax
