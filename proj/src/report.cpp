#include "fiax/report.hpp"

namespace fiax {

bool Report::ok() const {
  for (const auto& r : records)
    if (r.status == CheckStatus::fail) return false;
  return true;
}

const CheckRecord* Report::find(const std::string& id) const {
  for (const auto& r : records)
    if (r.id == id) return &r;
  return nullptr;
}

void Report::merge(Report other) {
  for (auto& r : other.records) records.push_back(std::move(r));
}

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    default:
      return "skip";
  }
}

}  // namespace fiax
