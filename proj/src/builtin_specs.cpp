#include "fiax/builtin_specs.hpp"

namespace fiax {

namespace {

const char* kDualNumbers = R"(# Dual numbers k[x]/(x^2): local, weakly symmetric; socle spanned by x.
[field]
rational

[basis]
e x

[idempotents]
e

[mult]
e * e = e
e * x = x
x * e = x

[trace]
x = 1
)";

const char* kKx3 = R"(# k[x]/(x^3): local, weakly symmetric; socle spanned by x2.
[field]
rational

[basis]
e x x2

[idempotents]
e

[mult]
e * e = e
e * x = x
x * e = x
e * x2 = x2
x2 * e = x2
x * x = x2

[trace]
x2 = 1
)";

const char* kFpCp = R"(# F_5[x]/(x^5), isomorphic to the group algebra F_5[C_5] via x = g - 1.
[field]
prime = 5

[basis]
e x x2 x3 x4

[idempotents]
e

[mult]
e * e = e
e * x = x
x * e = x
e * x2 = x2
x2 * e = x2
e * x3 = x3
x3 * e = x3
e * x4 = x4
x4 * e = x4
x * x = x2
x * x2 = x3
x2 * x = x3
x * x3 = x4
x3 * x = x4
x2 * x2 = x4

[trace]
x4 = 1
)";

// Zigzag algebra on the line with two vertices: arrows a: 1 -> 2, b: 2 -> 1,
// all paths of length three vanish. Symmetric, two simples.
// Products compose right-to-left: ab means "b, then a", so ab is a cycle at 2.
const char* kBrauerLineN2 = R"(# Two-vertex zigzag (Brauer line) algebra: dim 6, symmetric.
[field]
rational

[basis]
e1 e2 a b ab ba

[idempotents]
e1 e2

[mult]
e1 * e1 = e1
e2 * e2 = e2
a * e1 = a
e2 * a = a
b * e2 = b
e1 * b = b
a * b = ab
b * a = ba
e2 * ab = ab
ab * e2 = ab
e1 * ba = ba
ba * e1 = ba

[trace]
ab = 1
ba = 1
)";

const char* kA2Path = R"(# Path algebra of the A2 quiver (al: 1 -> 2). Not self-injective:
# every trace vector has a degenerate Gram matrix.
[field]
rational

[basis]
e1 e2 al

[idempotents]
e1 e2

[mult]
e1 * e1 = e1
e2 * e2 = e2
al * e1 = al
e2 * al = al

[trace]
al = 1
)";

}  // namespace

const std::map<std::string, std::string>& builtin_specs() {
  static const std::map<std::string, std::string> specs = {
      {"dual_numbers", kDualNumbers},
      {"kx3", kKx3},
      {"fp_cp", kFpCp},
      {"brauer_line_n2", kBrauerLineN2},
      {"a2_path", kA2Path},
  };
  return specs;
}

}  // namespace fiax
