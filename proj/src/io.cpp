#include "matchpoa/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "matchpoa/errors.hpp"

namespace matchpoa {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json parse_json(const std::string& text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

ValuationProfile parse_instance(const std::string& text) {
  ordered_json j = parse_json(text, "instance");
  if (!j.is_object()) throw ParseError("instance: expected a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw ParseError("instance: missing integer field 'n'");
  }
  ValuationProfile v;
  v.n = j["n"].get<int>();
  if (v.n <= 0) throw ParseError("instance: 'n' must be positive");
  if (!j.contains("normalization") || !j["normalization"].is_string()) {
    throw ParseError("instance: missing string field 'normalization'");
  }
  v.normalization = normalization_from_string(j["normalization"].get<std::string>());
  if (!j.contains("valuations") || !j["valuations"].is_array()) {
    throw ParseError("instance: missing array field 'valuations'");
  }
  const auto& rows = j["valuations"];
  if (static_cast<int>(rows.size()) != v.n) {
    throw ShapeError("instance: expected " + std::to_string(v.n) +
                     " valuation rows, got " + std::to_string(rows.size()));
  }
  for (const auto& row : rows) {
    if (!row.is_array() || static_cast<int>(row.size()) != v.n) {
      throw ShapeError("instance: valuations must be a square " +
                       std::to_string(v.n) + "x" + std::to_string(v.n) +
                       " matrix");
    }
    std::vector<Rat> vals;
    vals.reserve(v.n);
    for (const auto& cell : row) {
      if (!cell.is_string()) {
        throw ParseError("instance: valuations must be rational strings");
      }
      vals.push_back(Rat::parse(cell.get<std::string>()));
    }
    v.values.push_back(std::move(vals));
  }
  if (auto res = validate_profile(v); !res.ok) {
    throw ParseError("instance: " + res.message);
  }
  return v;
}

std::string serialize_instance(const ValuationProfile& v) {
  ordered_json j;
  j["n"] = v.n;
  j["normalization"] = to_string(v.normalization);
  ordered_json rows = ordered_json::array();
  for (const auto& row : v.values) {
    ordered_json r = ordered_json::array();
    for (const Rat& x : row) r.push_back(x.str());
    rows.push_back(std::move(r));
  }
  j["valuations"] = std::move(rows);
  return j.dump(2) + "\n";
}

PreferenceProfile parse_strategies(const std::string& text, int n) {
  ordered_json j = parse_json(text, "strategies");
  if (!j.is_object() || !j.contains("orders") || !j["orders"].is_array()) {
    throw ParseError("strategies: expected an object with array field 'orders'");
  }
  const auto& orders = j["orders"];
  if (static_cast<int>(orders.size()) != n) {
    throw ShapeError("strategies: expected " + std::to_string(n) +
                     " orders, got " + std::to_string(orders.size()));
  }
  PreferenceProfile prefs;
  for (const auto& entry : orders) {
    if (!entry.is_array()) throw ParseError("strategies: each order must be an array");
    std::vector<int> ranking;
    for (const auto& cell : entry) {
      if (!cell.is_number_integer()) {
        throw ParseError("strategies: orders must contain integers");
      }
      ranking.push_back(cell.get<int>() - 1);
    }
    if (!is_permutation_of_items(ranking, n)) {
      throw ShapeError("strategies: order " + std::to_string(prefs.size() + 1) +
                       " is not a permutation of 1.." + std::to_string(n));
    }
    prefs.push_back(PreferenceOrder{std::move(ranking)});
  }
  return prefs;
}

std::string serialize_strategies(const PreferenceProfile& prefs) {
  ordered_json orders = ordered_json::array();
  for (const auto& o : prefs) {
    ordered_json r = ordered_json::array();
    for (int j : o.ranking) r.push_back(j + 1);
    orders.push_back(std::move(r));
  }
  ordered_json j;
  j["orders"] = std::move(orders);
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string assignment_csv(const AssignmentMatrix& m) {
  int n = m.n();
  std::ostringstream out;
  out << "agent";
  for (int j = 1; j <= n; ++j) out << ",item_" << j;
  out << "\n";
  for (int i = 0; i < n; ++i) {
    out << (i + 1);
    for (int j = 0; j < n; ++j) out << "," << m.p[i][j].str();
    out << "\n";
  }
  return out.str();
}

std::string profile_csv(const PreferenceProfile& prefs) {
  std::ostringstream out;
  int n = static_cast<int>(prefs.size());
  out << "agent";
  for (int j = 1; j <= n; ++j) out << ",rank_" << j;
  out << "\n";
  for (int i = 0; i < n; ++i) {
    out << (i + 1);
    for (int j : prefs[i].ranking) out << "," << (j + 1);
    out << "\n";
  }
  return out.str();
}

}  // namespace matchpoa
