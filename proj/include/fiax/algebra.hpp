#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fiax/linalg.hpp"

namespace fiax {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what, int line = 0)
      : std::runtime_error("parse error: " + what +
                           (line ? " (line " + std::to_string(line) + ")" : "")),
        line(line) {}
  int line;
};

struct AssociativityViolation : std::runtime_error {
  AssociativityViolation(std::string a, std::string b, std::string c)
      : std::runtime_error("associativity fails on (" + a + ", " + b + ", " + c + ")"),
        a(std::move(a)), b(std::move(b)), c(std::move(c)) {}
  std::string a, b, c;
};

struct IdempotentViolation : std::runtime_error {
  explicit IdempotentViolation(const std::string& what)
      : std::runtime_error("idempotent violation: " + what) {}
};

struct PeirceViolation : std::runtime_error {
  explicit PeirceViolation(std::string elem)
      : std::runtime_error("basis element not Peirce-homogeneous: " + elem),
        element(std::move(elem)) {}
  std::string element;
};

struct DegenerateTraceForm : std::runtime_error {
  DegenerateTraceForm()
      : std::runtime_error("trace form is degenerate: no dual basis exists") {}
};

// Sparse coordinate vector in the algebra basis.
using AVec = std::vector<std::pair<int, Scalar>>;

// A finite-dimensional basic algebra presented by structure constants,
// a complete set of orthogonal idempotents, and a trace vector.
// All invariants are verified at load time.
struct Algebra {
  Field field;
  int dim = 0;
  int n = 0;  // number of idempotents = objects of the 2-category
  std::vector<std::string> labels;
  std::vector<int> idem;                    // idem[t] = basis index of e_t
  std::vector<std::vector<AVec>> mult;      // mult[a][b] = coords of basis_a * basis_b
  std::vector<std::pair<int, int>> peirce;  // peirce[a] = (i, j) with a = e_i a e_j
  std::vector<Scalar> trace;

  // Derived lookup tables (filled by finalize()).
  std::vector<std::vector<int>> left_block;    // left_block[i]  = basis of e_i A
  std::vector<std::vector<int>> right_block;   // right_block[j] = basis of A e_j
  std::vector<std::vector<std::vector<int>>> block;  // block[i][j] = basis of e_i A e_j
  std::vector<Mat> lmul, rmul;  // dense multiplication operators per basis elt

  int label_index(const std::string& s) const;
  const AVec& prod(int a, int b) const { return mult[a][b]; }
  AVec mul(const AVec& x, const AVec& y) const;
  Scalar trace_of(const AVec& v) const;
  Scalar zero() const { return Scalar(field); }
  Scalar one() const { return Scalar(field, 1); }

  // Verifies all presentation invariants; throws on violation.
  void validate() const;
  void finalize();
};

Algebra load_algebra(const std::string& text);
std::string write_algebra(const Algebra& a);

// Gram matrix G[a][b] = tr(basis_a * basis_b).
Mat gram_matrix(const Algebra& a);

// Column a holds the coordinates of a*, the unique element with
// tr(b * a*) = delta_{a,b}. Throws DegenerateTraceForm iff G is singular.
Mat dual_basis(const Algebra& a);

std::vector<std::vector<int>> peirce_dims(const Algebra& a);

}  // namespace fiax
