#pragma once

#include <string>
#include <vector>

namespace hardy {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// the twelve shipped checks; data_dir holds the bundled fixtures (p40.json)
std::vector<CriterionResult> run_acceptance(const std::string& data_dir);

// prints one line per criterion plus a summary; 0 iff everything passed
int acceptance_run_and_report(const std::string& data_dir);

}  // namespace hardy
