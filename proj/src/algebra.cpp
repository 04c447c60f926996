#include "fiax/algebra.hpp"

#include <algorithm>
#include <cassert>
#include <map>

namespace fiax {

int Algebra::label_index(const std::string& s) const {
  auto it = std::find(labels.begin(), labels.end(), s);
  if (it == labels.end()) throw ParseError("unknown label: " + s);
  return (int)(it - labels.begin());
}

AVec Algebra::mul(const AVec& x, const AVec& y) const {
  std::map<int, Scalar> acc;
  for (const auto& [a, ca] : x)
    for (const auto& [b, cb] : y) {
      Scalar c = ca * cb;
      if (c.is_zero()) continue;
      for (const auto& [d, cd] : mult[a][b]) {
        auto [it, fresh] = acc.emplace(d, c * cd);
        if (!fresh) it->second += c * cd;
      }
    }
  AVec out;
  for (auto& [d, c] : acc)
    if (!c.is_zero()) out.emplace_back(d, c);
  return out;
}

Scalar Algebra::trace_of(const AVec& v) const {
  Scalar t(field);
  for (const auto& [a, c] : v) t += c * trace[a];
  return t;
}

void Algebra::validate() const {
  // Orthogonal idempotents.
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      AVec p = mul({{idem[s], one()}}, {{idem[t], one()}});
      AVec want = (s == t) ? AVec{{idem[s], one()}} : AVec{};
      if (p != want)
        throw IdempotentViolation(labels[idem[s]] + " * " + labels[idem[t]] +
                                  " is not " + (s == t ? labels[idem[s]] : "0"));
    }
  // Their sum is the two-sided unit.
  AVec unit;
  for (int t = 0; t < n; ++t) unit.emplace_back(idem[t], one());
  std::sort(unit.begin(), unit.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (int a = 0; a < dim; ++a) {
    AVec elem{{a, one()}};
    if (mul(unit, elem) != elem || mul(elem, unit) != elem)
      throw IdempotentViolation("sum of idempotents is not the unit (fails on " +
                                labels[a] + ")");
  }
  // Associativity on all basis triples.
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c)
        if (mul(mul({{a, one()}}, {{b, one()}}), {{c, one()}}) !=
            mul({{a, one()}}, mul({{b, one()}}, {{c, one()}})))
          throw AssociativityViolation(labels[a], labels[b], labels[c]);
  // Peirce homogeneity: exactly one component e_i a e_j is nonzero and equals a.
  for (int a = 0; a < dim; ++a) {
    int hits = 0;
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        AVec p = mul(mul({{idem[s], one()}}, {{a, one()}}), {{idem[t], one()}});
        if (p.empty()) continue;
        ++hits;
        if (p != AVec{{a, one()}}) throw PeirceViolation(labels[a]);
      }
    if (hits != 1) throw PeirceViolation(labels[a]);
  }
}

void Algebra::finalize() {
  peirce.assign(dim, {-1, -1});
  for (int a = 0; a < dim; ++a)
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        AVec p = mul(mul({{idem[s], one()}}, {{a, one()}}), {{idem[t], one()}});
        if (!p.empty()) peirce[a] = {s, t};
      }
  left_block.assign(n, {});
  right_block.assign(n, {});
  block.assign(n, std::vector<std::vector<int>>(n));
  for (int a = 0; a < dim; ++a) {
    auto [i, j] = peirce[a];
    left_block[i].push_back(a);
    right_block[j].push_back(a);
    block[i][j].push_back(a);
  }
  lmul.assign(dim, Mat(field, dim, dim));
  rmul.assign(dim, Mat(field, dim, dim));
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      for (const auto& [d, c] : mult[a][b]) lmul[a].at(d, b) = c;
      for (const auto& [d, c] : mult[b][a]) rmul[a].at(d, b) = c;
    }
}

Mat gram_matrix(const Algebra& a) {
  Mat g(a.field, a.dim, a.dim);
  for (int r = 0; r < a.dim; ++r)
    for (int c = 0; c < a.dim; ++c)
      g.at(r, c) = a.trace_of(a.prod(r, c));
  return g;
}

Mat dual_basis(const Algebra& a) {
  auto inv = inverse(gram_matrix(a));
  if (!inv) throw DegenerateTraceForm();
  return *inv;
}

std::vector<std::vector<int>> peirce_dims(const Algebra& a) {
  std::vector<std::vector<int>> d(a.n, std::vector<int>(a.n, 0));
  for (int x = 0; x < a.dim; ++x) d[a.peirce[x].first][a.peirce[x].second]++;
  return d;
}

}  // namespace fiax
