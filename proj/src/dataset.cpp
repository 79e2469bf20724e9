#include "ldfm/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "ldfm/error.hpp"

namespace ldfm {

namespace {

constexpr int kFormatVersion = 1;

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

[[noreturn]] void fail(const std::string& source, std::size_t line_no, const std::string& what) {
  throw DataError(source + ": line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Dataset read_dataset(std::istream& in, const std::optional<VariableSchema>& fixed_schema,
                     const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw DataError(source_name + ": empty file");
  const std::vector<std::string> header = split_fields(line);
  const std::size_t n = header.size();
  for (const auto& name : header)
    if (name.empty()) fail(source_name, line_no, "empty column name");

  // column -> schema variable
  std::vector<std::size_t> column_var(n);
  if (fixed_schema) {
    if (n != fixed_schema->size())
      fail(source_name, line_no, "header has " + std::to_string(n) + " columns, schema has " +
                                     std::to_string(fixed_schema->size()) + " variables");
    std::vector<char> used(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
      const auto var = fixed_schema->find_variable(header[c]);
      if (!var) fail(source_name, line_no, "column '" + header[c] + "' is not in the schema");
      if (used[*var]) fail(source_name, line_no, "duplicate column '" + header[c] + "'");
      used[*var] = 1;
      column_var[c] = *var;
    }
  } else {
    for (std::size_t c = 0; c < n; ++c) column_var[c] = c;
  }

  std::vector<std::vector<std::string>> raw;
  std::vector<std::size_t> raw_line;
  while (next_line(in, line, line_no)) {
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != n)
      fail(source_name, line_no, "expected " + std::to_string(n) + " fields, found " +
                                     std::to_string(fields.size()));
    for (const auto& f : fields)
      if (f.empty()) fail(source_name, line_no, "empty field");
    raw.push_back(std::move(fields));
    raw_line.push_back(line_no);
  }

  std::optional<VariableSchema> schema = fixed_schema;
  if (!schema) {
    if (raw.empty()) throw DataError(source_name + ": no data rows to infer domains from");
    std::vector<Variable> vars(n);
    for (std::size_t c = 0; c < n; ++c) {
      vars[c].name = header[c];
      std::unordered_map<std::string, bool> seen;
      for (const auto& row : raw)
        if (seen.emplace(row[c], true).second) vars[c].values.push_back(row[c]);
    }
    try {
      schema.emplace(std::move(vars));
    } catch (const std::invalid_argument& e) {
      fail(source_name, 1, e.what());
    }
  }

  std::vector<std::unordered_map<std::string, int>> index(n);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t k = 0; k < schema->cardinality(v); ++k)
      index[v].emplace(schema->variable(v).values[k], static_cast<int>(k));

  Dataset dataset{*schema, {}};
  dataset.rows.reserve(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    Assignment x(n);
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t v = column_var[c];
      const auto it = index[v].find(raw[r][c]);
      if (it == index[v].end())
        fail(source_name, raw_line[r],
             "unknown label '" + raw[r][c] + "' for variable '" + schema->variable(v).name + "'");
      x[v] = it->second;
    }
    dataset.rows.push_back(std::move(x));
  }
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path,
                     const std::optional<VariableSchema>& fixed_schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  return read_dataset(in, fixed_schema, path.string());
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  const VariableSchema& schema = dataset.schema;
  for (std::size_t v = 0; v < schema.size(); ++v)
    out << (v ? "," : "") << schema.variable(v).name;
  out << '\n';
  for (const Assignment& x : dataset.rows) {
    for (std::size_t v = 0; v < schema.size(); ++v)
      out << (v ? "," : "") << schema.variable(v).values.at(static_cast<std::size_t>(x[v]));
    out << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset '" + path.string() + "'");
  write_dataset(out, dataset);
  if (!out) throw DataError("failed writing dataset '" + path.string() + "'");
}

std::string schema_to_text(const VariableSchema& schema) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["variables"] = nlohmann::ordered_json::array();
  for (const Variable& v : schema.variables())
    doc["variables"].push_back({{"name", v.name}, {"values", v.values}});
  return doc.dump(2) + "\n";
}

VariableSchema schema_from_text(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format_version").get<int>() != kFormatVersion)
      throw DataError("unsupported schema format_version " + doc.at("format_version").dump());
    std::vector<Variable> vars;
    for (const auto& v : doc.at("variables"))
      vars.push_back({v.at("name").get<std::string>(), v.at("values").get<std::vector<std::string>>()});
    return VariableSchema(std::move(vars));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed schema: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid schema: ") + e.what());
  }
}

VariableSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return schema_from_text(buffer.str());
}

void save_schema(const std::filesystem::path& path, const VariableSchema& schema) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write schema '" + path.string() + "'");
  out << schema_to_text(schema);
}

}  // namespace ldfm
