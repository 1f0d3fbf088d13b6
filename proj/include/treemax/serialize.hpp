#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "treemax/conditions.hpp"
#include "treemax/logk.hpp"

namespace treemax {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form; locale-independent, so identical configs
// always serialize to identical bytes.
inline std::string format_double(double v) {
  if (v == kLogZero) return "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// One experiment's output: fixed columns, pre-formatted cells, metadata.
struct ResultTable {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  Json meta = Json::object();
  std::map<std::string, double> summary;

  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

// RFC-4180: header row, CRLF line ends, quoting only where needed.
inline void write_csv(const ResultTable& table, std::ostream& os) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) os << ",";
    os << csv_escape(table.columns[c]);
  }
  os << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ",";
      os << csv_escape(row[c]);
    }
    os << "\r\n";
  }
}

inline Json to_json(const ResultTable& table) {
  Json j;
  j["experiment"] = table.experiment;
  j["meta"] = table.meta;
  Json summary = Json::object();
  for (const auto& [key, value] : table.summary) summary[key] = value;
  j["summary"] = summary;
  j["columns"] = table.columns;
  Json rows = Json::array();
  for (const auto& row : table.rows) rows.push_back(row);
  j["rows"] = rows;
  return j;
}

inline Json witness_to_json(const Witness& w) {
  Json j;
  j["kind"] = w.kind;
  if (w.j >= 0) j["j"] = w.j;
  if (w.i >= 0) j["i"] = w.i;
  if (w.r >= 0) j["r"] = w.r;
  if (w.m >= 0) j["m"] = w.m;
  const auto set_to_json = [](const std::vector<Vertex>& set) {
    Json arr = Json::array();
    for (const Vertex& v : set) {
      Json path = Json::array();
      for (std::uint8_t d : v.path()) path.push_back(static_cast<int>(d));
      arr.push_back(path);
    }
    return arr;
  };
  if (!w.e_set.empty()) j["E"] = set_to_json(w.e_set);
  if (!w.f_set.empty()) j["F"] = set_to_json(w.f_set);
  j["value_logk"] = w.value_logk == kLogZero ? Json("-inf") : Json(w.value_logk);
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

inline Json report_to_json(const ConditionReport& report) {
  Json j;
  j["condition"] = report.condition;
  Json params = Json::object();
  for (const auto& [key, value] : report.params) params[key] = value;
  j["params"] = params;
  Json grid = Json::object();
  for (const auto& [key, value] : report.grid) grid[key] = value;
  j["grid"] = grid;
  j["empirical_sup_logk"] = report.empirical_sup_logk == kLogZero
                                ? Json("-inf")
                                : Json(report.empirical_sup_logk);
  j["witness"] = witness_to_json(report.witness);
  j["verdict"] = report.verdict;
  return j;
}

// <experiment>_<k>_<p>_<config hash>.<ext>; hash replaces any timestamp so
// reruns of the same configuration name the same file.
inline std::string default_filename(const std::string& experiment, int k,
                                    const std::string& p_text,
                                    const std::string& canonical_config,
                                    const std::string& ext) {
  return experiment + "_" + std::to_string(k) + "_" + p_text + "_" +
         hex16(fnv1a64(canonical_config)) + "." + ext;
}

}  // namespace treemax
