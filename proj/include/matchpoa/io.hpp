#pragma once

#include <string>
#include <vector>

#include "matchpoa/core.hpp"

namespace matchpoa {

// Instance files are JSON objects: {"n": 3, "normalization": "unit-sum",
// "valuations": [["1/2", "1/3", "1/6"], ...]}. Values are rational strings
// ("p/q", integers, or finite decimals). Parsing validates the declared
// normalization and throws ParseError or ShapeError on malformed input.
ValuationProfile parse_instance(const std::string& text);
std::string serialize_instance(const ValuationProfile& v);

// Strategy files are JSON objects: {"orders": [[2, 1, 3], ...]} with one
// permutation of 1..n per agent, most preferred item first.
PreferenceProfile parse_strategies(const std::string& text, int n);
std::string serialize_strategies(const PreferenceProfile& prefs);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// CSV rows for an assignment matrix: header "agent,item_1,...,item_n",
// then one row per agent with lowest-terms rational entries.
std::string assignment_csv(const AssignmentMatrix& m);

// One ranking per line: "agent,rank_1,...,rank_n" with 1-based items.
std::string profile_csv(const PreferenceProfile& prefs);

}  // namespace matchpoa
