#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "agglo/event_log.hpp"

struct RuleFixture {
  std::string rule;
  std::string expect;
  agglo::EventLog log;
};

// Fixture files hold "# rule:" and "# expect:" header lines followed by one
// trace per line.
inline std::vector<RuleFixture> load_rule_fixtures(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".log") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RuleFixture> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    RuleFixture fx;
    std::string line;
    std::string body;
    while (std::getline(in, line)) {
      if (line.rfind("# rule:", 0) == 0) {
        fx.rule = line.substr(8);
      } else if (line.rfind("# expect:", 0) == 0) {
        fx.expect = line.substr(10);
      } else if (line.rfind('#', 0) != 0) {
        body += line + "\n";
      }
    }
    fx.log = agglo::parse_traces_text(body);
    out.push_back(std::move(fx));
  }
  return out;
}
