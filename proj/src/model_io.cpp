#include "ldfm/model_io.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "ldfm/error.hpp"

namespace ldfm {

namespace {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

json row_to_json(const LdfmModel& model, std::size_t source) {
  const VariableSchema& schema = model.schema();
  json targets = json::object();
  for (std::size_t t = 0; t < model.num_targets(); ++t) {
    if (!model.is_legal(source, t)) continue;
    const Variable& v = schema.variable(schema.variable_of_pair(t));
    targets[v.name][v.values[schema.value_of_pair(t)]] = model.dep(source, t);
  }
  json row = {{"targets", std::move(targets)}};
  if (model.has_stop()) row["stop"] = model.stop(source);
  return row;
}

void row_from_json(const json& row, LdfmModel& model, std::size_t source) {
  const VariableSchema& schema = model.schema();
  const json& targets = row.at("targets");
  for (std::size_t t = 0; t < model.num_targets(); ++t) {
    if (!model.is_legal(source, t)) continue;
    const Variable& v = schema.variable(schema.variable_of_pair(t));
    model.dep(source, t) = targets.at(v.name).at(v.values[schema.value_of_pair(t)]).get<double>();
  }
  if (model.has_stop()) model.set_stop(source, row.at("stop").get<double>());
}

}  // namespace

std::string model_to_text(const LdfmModel& model, const ModelMetadata& metadata) {
  const VariableSchema& schema = model.schema();
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["variant"] = std::string(to_string(model.variant()));
  doc["variables"] = json::array();
  for (const Variable& v : schema.variables())
    doc["variables"].push_back({{"name", v.name}, {"values", v.values}});
  doc["metadata"] = {{"seconds_train", metadata.seconds_train}};
  doc["root"] = row_to_json(model, 0);
  doc["sources"] = json::array();
  for (std::size_t s = 1; s < model.num_sources(); ++s) {
    json row = row_to_json(model, s);
    const NodeKey key = model.source_key(s);
    row["variable"] = schema.variable(key.variable()).name;
    row["value"] = schema.variable(key.variable()).values[key.value()];
    doc["sources"].push_back(std::move(row));
  }
  doc["checksum"] = fnv1a_hex(doc.dump());
  return doc.dump(1) + "\n";
}

LoadedModel model_from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed or truncated model file: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw DataError("model file is not a JSON object");
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw DataError("model format_version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kModelFormatVersion) + ")");
    if (doc.contains("checksum")) {
      const std::string stored = doc.at("checksum").get<std::string>();
      json body = doc;
      body.erase("checksum");
      if (fnv1a_hex(body.dump()) != stored)
        throw DataError("model checksum mismatch: file is corrupted or was edited");
    }

    std::vector<Variable> vars;
    for (const auto& v : doc.at("variables"))
      vars.push_back({v.at("name").get<std::string>(), v.at("values").get<std::vector<std::string>>()});
    LdfmModel model(VariableSchema(std::move(vars)), parse_variant(doc.at("variant").get<std::string>()));
    const VariableSchema& schema = model.schema();

    row_from_json(doc.at("root"), model, 0);
    std::vector<char> seen(model.num_sources(), 0);
    for (const auto& row : doc.at("sources")) {
      const auto var = schema.find_variable(row.at("variable").get<std::string>());
      if (!var) throw DataError("model row names unknown variable " + row.at("variable").dump());
      const auto value = schema.find_value(*var, row.at("value").get<std::string>());
      if (!value) throw DataError("model row names unknown value " + row.at("value").dump());
      const std::size_t s = model.source_of(*var, *value);
      if (seen[s]) throw DataError("duplicate model row for " + describe(schema, model.source_key(s)));
      seen[s] = 1;
      row_from_json(row, model, s);
    }
    for (std::size_t s = 1; s < model.num_sources(); ++s)
      if (!seen[s]) throw DataError("model has no row for " + describe(schema, model.source_key(s)));

    ModelMetadata metadata;
    if (doc.contains("metadata"))
      metadata.seconds_train = doc["metadata"].value("seconds_train", 0.0);

    std::vector<std::string> warnings;
    for (const Violation& v : validate_model(model, kLoadTolerance)) warnings.push_back(v.message);
    return LoadedModel{std::move(model), metadata, std::move(warnings)};
  } catch (const json::exception& e) {
    throw DataError(std::string("model file is missing fields: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const LdfmModel& model,
                const ModelMetadata& metadata) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model '" + path.string() + "'");
  out << model_to_text(model, metadata);
  if (!out) throw DataError("failed writing model '" + path.string() + "'");
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_text(buffer.str());
}

}  // namespace ldfm
