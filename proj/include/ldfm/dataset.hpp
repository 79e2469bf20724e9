#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldfm/model.hpp"

namespace ldfm {

struct Dataset {
  VariableSchema schema;
  std::vector<Assignment> rows;
};

/// Comma-separated text, header row first, one sample per line, values as
/// labels, no quoting. Without `fixed_schema` each domain is the set of
/// labels seen in its column, in order of first appearance. With it, the
/// header must name exactly the schema's variables (in any order), unseen
/// domain values are kept and an unknown label is an error.
/// Errors are DataError and name the offending line.
Dataset read_dataset(std::istream& in, const std::optional<VariableSchema>& fixed_schema = {},
                     const std::string& source_name = "<stream>");
Dataset load_dataset(const std::filesystem::path& path,
                     const std::optional<VariableSchema>& fixed_schema = {});

/// Header and rows in schema order.
void write_dataset(std::ostream& out, const Dataset& dataset);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

/// Schema sidecar: JSON object with `format_version: 1` and a `variables`
/// list of {name, values}.
VariableSchema load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const VariableSchema& schema);
std::string schema_to_text(const VariableSchema& schema);
VariableSchema schema_from_text(const std::string& text);

}  // namespace ldfm
