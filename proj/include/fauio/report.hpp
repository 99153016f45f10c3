#pragma once
// ConditionReport: a list of named pass/fail checks with numeric margins,
// shared by the structural validators (model), decomposition verifier
// (polytope), certificate verifier (sdp), and design certifier (synth).

#include <string>
#include <vector>

namespace fauio {

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // signed slack: > 0 means satisfied with room
  std::string detail;
};

struct ConditionReport {
  std::vector<CheckResult> checks;

  void add(std::string name, bool pass, double margin = 0.0, std::string detail = "") {
    checks.push_back({std::move(name), pass, margin, std::move(detail)});
  }

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& c : checks) {
      out += c.pass ? "[ok]   " : "[FAIL] ";
      out += c.name;
      if (!c.detail.empty()) {
        out += ": ";
        out += c.detail;
      }
      out += "\n";
    }
    return out;
  }
};

}  // namespace fauio
