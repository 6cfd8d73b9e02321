#pragma once

#include <string>
#include <vector>

#include "testinv/invariants.hpp"

namespace testinv::cli {

/// One parsed instance file: exactly one datum, level and constant set.
struct InstanceData {
    inv::SubvarietyDatum datum;
    inv::LevelSpec level;
    inv::BoundConstants constants;
};

/// Parses the line-oriented instance format (see docs/format.md). Unknown
/// keys and malformed lines raise ParseError.
InstanceData parse_instance_text(const std::string& text, const std::string& name);
InstanceData parse_instance_file(const std::string& path);

/// Reads a list file: one instance path per line, '#' comments, resolved
/// relative to the list file's directory.
std::vector<std::string> read_list_file(const std::string& path);

} // namespace testinv::cli
