#pragma once

#include <string>
#include <vector>

namespace fiax {

enum class CheckStatus { pass, fail, skip };

// One verification outcome.  `anchor` is the statement label printed next to
// the check in reports; `witness` holds the first counterexample found and is
// empty for passing checks.
struct CheckRecord {
  std::string id;
  std::string anchor;
  CheckStatus status = CheckStatus::pass;
  std::string witness;
  double wall_ms = 0.0;
};

struct Report {
  std::vector<CheckRecord> records;

  bool ok() const;  // no record failed
  const CheckRecord* find(const std::string& id) const;
  void merge(Report other);
};

const char* status_name(CheckStatus s);

}  // namespace fiax
