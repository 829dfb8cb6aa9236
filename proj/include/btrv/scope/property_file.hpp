#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "btrv/scope/parser.hpp"

namespace btrv::scope {

struct Property {
  std::string name;
  FormulaPtr formula;
  std::size_t line = 0;
};

struct PropertySet {
  std::vector<Property> properties;
  std::map<std::string, std::int64_t> params;
};

/// Parses a property file:
///
///     param theta = 100
///     property phi1 = always (BatteryReader, BatteryLevel, m[2] >= 20);
///
/// Values in `overrides` replace (or add) parameters before any property
/// is parsed. Property names must be unique.
PropertySet parse_property_file(std::string_view text, const std::map<std::string, std::int64_t>& overrides = {},
                                const ParseOptions& base = {});

PropertySet load_property_file(const std::string& path, const std::map<std::string, std::int64_t>& overrides = {},
                               const ParseOptions& base = {});

}  // namespace btrv::scope
