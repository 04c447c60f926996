#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "fiax/algebra.hpp"

namespace fiax {

namespace {

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

bool valid_label(const std::string& s) {
  if (s.empty() || !(std::isalpha((unsigned char)s[0]) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

bool looks_numeric(const std::string& s) {
  return !s.empty() && (std::isdigit((unsigned char)s[0]) || s[0] == '-' || s[0] == '+');
}

// Linear combination over the basis: terms joined by '+', each term either
// "0", "label", "coeff*label" or "coeff label"; coeff may be negative or a/b.
AVec parse_combo(const Algebra& alg, const std::string& text, int line) {
  std::map<int, Scalar> acc;
  std::string t = strip(text);
  if (t.empty()) throw ParseError("empty right-hand side", line);
  size_t pos = 0;
  while (pos < t.size()) {
    size_t plus = t.find('+', pos ? pos + 1 : 1);  // keep a leading sign with its term
    std::string term = strip(t.substr(pos, plus == std::string::npos ? plus : plus - pos));
    pos = (plus == std::string::npos) ? t.size() : plus + 1;
    if (term.empty()) throw ParseError("empty term", line);
    if (term == "0") continue;
    Scalar coeff(alg.field, 1);
    std::string label = term;
    size_t star = term.find('*');
    if (star != std::string::npos) {
      coeff = Scalar::parse(alg.field, strip(term.substr(0, star)));
      label = strip(term.substr(star + 1));
    } else if (looks_numeric(term)) {
      auto parts = split_ws(term);
      if (parts.size() != 2) throw ParseError("cannot read term '" + term + "'", line);
      coeff = Scalar::parse(alg.field, parts[0]);
      label = parts[1];
    }
    if (!valid_label(label)) throw ParseError("bad label '" + label + "'", line);
    int idx = alg.label_index(label);
    auto [it, fresh] = acc.emplace(idx, coeff);
    if (!fresh) it->second += coeff;
  }
  AVec out;
  for (auto& [i, c] : acc)
    if (!c.is_zero()) out.emplace_back(i, c);
  return out;
}

}  // namespace

Algebra load_algebra(const std::string& text) {
  Algebra alg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  bool have_field = false;
  std::vector<std::pair<std::pair<int, int>, std::pair<std::string, int>>> mult_lines;
  std::vector<std::pair<std::string, std::pair<std::string, int>>> trace_lines;
  std::vector<std::string> idem_labels;

  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("malformed section header", lineno);
      section = line.substr(1, line.size() - 2);
      if (section != "field" && section != "basis" && section != "idempotents" &&
          section != "mult" && section != "trace")
        throw ParseError("unknown section [" + section + "]", lineno);
      continue;
    }
    if (section == "field") {
      if (line == "rational") {
        alg.field = Field{0};
      } else {
        auto eq = line.find('=');
        if (eq == std::string::npos || strip(line.substr(0, eq)) != "prime")
          throw ParseError("expected 'rational' or 'prime = p'", lineno);
        long p = std::stol(strip(line.substr(eq + 1)));
        if (p < 2) throw ParseError("prime must be >= 2", lineno);
        for (long d = 2; d * d <= p; ++d)
          if (p % d == 0) throw ParseError("modulus is not prime", lineno);
        alg.field = Field{(unsigned long)p};
      }
      have_field = true;
    } else if (section == "basis") {
      for (const auto& w : split_ws(line)) {
        if (!valid_label(w)) throw ParseError("bad basis label '" + w + "'", lineno);
        if (std::find(alg.labels.begin(), alg.labels.end(), w) != alg.labels.end())
          throw ParseError("duplicate basis label '" + w + "'", lineno);
        alg.labels.push_back(w);
      }
    } else if (section == "idempotents") {
      for (const auto& w : split_ws(line)) idem_labels.push_back(w);
    } else if (section == "mult") {
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("expected 'a * b = ...'", lineno);
      auto lhs = strip(line.substr(0, eq));
      auto star = lhs.find('*');
      if (star == std::string::npos) throw ParseError("expected 'a * b' on the left", lineno);
      std::string a = strip(lhs.substr(0, star)), b = strip(lhs.substr(star + 1));
      if (!alg.labels.empty()) {
        int ia = alg.label_index(a), ib = alg.label_index(b);
        mult_lines.push_back({{ia, ib}, {strip(line.substr(eq + 1)), lineno}});
      } else {
        throw ParseError("[mult] before [basis]", lineno);
      }
    } else if (section == "trace") {
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("expected 'label = scalar'", lineno);
      trace_lines.push_back(
          {strip(line.substr(0, eq)), {strip(line.substr(eq + 1)), lineno}});
    } else {
      throw ParseError("content outside any section", lineno);
    }
  }
  if (!have_field) throw ParseError("missing [field] section");
  if (alg.labels.empty()) throw ParseError("missing or empty [basis] section");
  alg.dim = (int)alg.labels.size();
  if (idem_labels.empty()) throw ParseError("missing or empty [idempotents] section");
  for (const auto& w : idem_labels) {
    int idx = alg.label_index(w);
    if (std::find(alg.idem.begin(), alg.idem.end(), idx) != alg.idem.end())
      throw ParseError("duplicate idempotent '" + w + "'");
    alg.idem.push_back(idx);
  }
  alg.n = (int)alg.idem.size();

  alg.mult.assign(alg.dim, std::vector<AVec>(alg.dim));
  std::vector<std::vector<bool>> seen(alg.dim, std::vector<bool>(alg.dim, false));
  for (const auto& [ab, rhs] : mult_lines) {
    auto [ia, ib] = ab;
    if (seen[ia][ib])
      throw ParseError("duplicate product " + alg.labels[ia] + " * " + alg.labels[ib],
                       rhs.second);
    seen[ia][ib] = true;
    alg.mult[ia][ib] = parse_combo(alg, rhs.first, rhs.second);
  }
  alg.trace.assign(alg.dim, alg.zero());
  for (const auto& [label, rhs] : trace_lines) {
    int idx = alg.label_index(label);
    alg.trace[idx] = Scalar::parse(alg.field, rhs.first);
  }

  alg.validate();
  alg.finalize();
  return alg;
}

std::string write_algebra(const Algebra& a) {
  std::ostringstream os;
  os << "[field]\n";
  if (a.field.is_rational())
    os << "rational\n";
  else
    os << "prime = " << a.field.p << "\n";
  os << "\n[basis]\n";
  for (int i = 0; i < a.dim; ++i) os << (i ? " " : "") << a.labels[i];
  os << "\n\n[idempotents]\n";
  for (int t = 0; t < a.n; ++t) os << (t ? " " : "") << a.labels[a.idem[t]];
  os << "\n\n[mult]\n";
  for (int x = 0; x < a.dim; ++x)
    for (int y = 0; y < a.dim; ++y) {
      if (a.mult[x][y].empty()) continue;
      os << a.labels[x] << " * " << a.labels[y] << " =";
      bool first = true;
      for (const auto& [d, c] : a.mult[x][y]) {
        os << (first ? " " : " + ");
        if (!c.is_one()) os << c.str() << "*";
        os << a.labels[d];
        first = false;
      }
      os << "\n";
    }
  os << "\n[trace]\n";
  for (int x = 0; x < a.dim; ++x)
    if (!a.trace[x].is_zero()) os << a.labels[x] << " = " << a.trace[x].str() << "\n";
  return os.str();
}

}  // namespace fiax
