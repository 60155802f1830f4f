#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fell {

/// One violated law, with a human-readable witness.
struct Finding {
  std::string check;
  std::string witness;
};

/// Report-valued checks return this instead of throwing. Empty means pass.
struct Report {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  void add(std::string check, std::string witness) { findings.push_back({std::move(check), std::move(witness)}); }
  bool has(const std::string& check) const {
    for (const auto& f : findings)
      if (f.check == check) return true;
    return false;
  }
  void merge(const Report& other) { findings.insert(findings.end(), other.findings.begin(), other.findings.end()); }
};

inline std::ostream& operator<<(std::ostream& os, const Report& r) {
  if (r.ok()) return os << "ok\n";
  for (const auto& f : r.findings) os << f.check << ": " << f.witness << "\n";
  return os;
}

}  // namespace fell
