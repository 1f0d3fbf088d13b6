#pragma once

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "treemax/rational.hpp"

namespace treemax {

// Flat key=value run configuration. Values stay as the exact text the user
// supplied: serialization is byte-stable and rationals parse without rounding.
struct RunConfig {
  std::string k = "2";
  std::string p = "2";
  std::string q = "";
  std::string delta = "";
  std::string s = "";
  std::string beta = "";
  std::string alpha = "";
  std::string weight = "power:a=0";
  std::string u = "";  // two-weight numerator side (pair measure / F factor)
  std::string v = "";  // two-weight E-factor side
  std::string j = "5";
  std::string r = "0";
  std::string we = "1";
  std::string wf = "1";
  std::string jmax = "40";
  std::string rmax = "40";
  std::string depth = "14";
  std::string horizon = "500";
  std::string budget = "20000";
  std::string windows = "25,50";
  std::string geometry = "sphere";
  std::string seed = "1";
  std::string out = "";
  std::string format = "csv";
  std::string mode = "report";
  std::string linear = "false";

  bool operator==(const RunConfig&) const = default;

  std::vector<std::pair<std::string, std::string*>> fields() {
    return {{"alpha", &alpha},   {"beta", &beta},     {"budget", &budget},
            {"delta", &delta},   {"depth", &depth},   {"format", &format},
            {"geometry", &geometry}, {"horizon", &horizon}, {"j", &j},
            {"jmax", &jmax},     {"k", &k},           {"linear", &linear},
            {"mode", &mode},     {"out", &out},       {"p", &p},
            {"q", &q},           {"r", &r},           {"rmax", &rmax},
            {"s", &s},           {"seed", &seed},     {"u", &u},
            {"v", &v},           {"we", &we},         {"weight", &weight},
            {"wf", &wf},         {"windows", &windows}};
  }

  std::string to_kv() {
    std::ostringstream os;
    for (const auto& [key, value] : fields()) os << key << "=" << *value << "\n";
    return os.str();
  }

  static RunConfig from_kv(const std::string& text) {
    RunConfig c;
    auto fs = c.fields();
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line is not key=value: " + line);
      const std::string key = line.substr(0, eq);
      const std::string value = line.substr(eq + 1);
      bool found = false;
      for (auto& [name, slot] : fs) {
        if (name == key) {
          *slot = value;
          found = true;
          break;
        }
      }
      if (!found) throw std::invalid_argument("unknown config key: " + key);
    }
    return c;
  }

  int k_int() const {
    const int value = std::stoi(k);
    if (value < 2) throw std::invalid_argument("k must be at least 2");
    return value;
  }
  Rational p_rational() const { return Rational::parse(p); }
  long long int_field(const std::string& text, const std::string& name) const {
    try {
      return std::stoll(text);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad integer for " + name + ": " + text);
    }
  }
  double num_field(const std::string& text, const std::string& name) const {
    try {
      std::size_t used = 0;
      const double value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("");
      return value;
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number for " + name + ": " + text);
    }
  }
  std::vector<long long> windows_list() const {
    std::vector<long long> out;
    std::istringstream is(windows);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(int_field(tok, "windows"));
    return out;
  }
  std::vector<std::string> validate_enums() const {
    std::vector<std::string> problems;
    if (format != "csv" && format != "json")
      problems.push_back("format must be csv or json");
    if (mode != "report" && mode.rfind("assert:", 0) != 0)
      problems.push_back("mode must be report or assert:<constant>");
    if (geometry != "sphere" && geometry != "ball")
      problems.push_back("geometry must be sphere or ball");
    if (linear != "true" && linear != "false")
      problems.push_back("linear must be true or false");
    return problems;
  }
};

}  // namespace treemax
