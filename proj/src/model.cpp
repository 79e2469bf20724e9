#include "ldfm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace ldfm {

VariableSchema::VariableSchema(std::vector<Variable> variables)
    : variables_(std::move(variables)) {
  if (variables_.empty()) throw std::invalid_argument("schema has no variables");
  std::unordered_set<std::string> names;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const Variable& v = variables_[i];
    if (!names.insert(v.name).second)
      throw std::invalid_argument("duplicate variable name '" + v.name + "'");
    if (v.values.empty())
      throw std::invalid_argument("variable '" + v.name + "' has an empty domain");
    std::unordered_set<std::string> labels(v.values.begin(), v.values.end());
    if (labels.size() != v.values.size())
      throw std::invalid_argument("variable '" + v.name + "' has duplicate value labels");
    offsets_.push_back(offset);
    offset += v.values.size();
    pair_variable_.insert(pair_variable_.end(), v.values.size(), i);
  }
}

std::optional<std::size_t> VariableSchema::find_variable(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> VariableSchema::find_value(std::size_t var,
                                                      std::string_view label) const {
  const auto& values = variables_.at(var).values;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k] == label) return k;
  return std::nullopt;
}

std::size_t VariableSchema::state_space_size() const {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 1;
  for (const auto& v : variables_) {
    if (total > kMax / v.values.size()) return kMax;
    total *= v.values.size();
  }
  return total;
}

bool Assignment::is_complete() const {
  return std::none_of(values_.begin(), values_.end(), [](int v) { return v == kMissing; });
}

void check_assignment(const VariableSchema& schema, const Assignment& x, bool require_complete) {
  if (x.size() != schema.size())
    throw std::invalid_argument("assignment has " + std::to_string(x.size()) +
                                " entries, schema has " + std::to_string(schema.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == kMissing) {
      if (require_complete)
        throw std::invalid_argument("variable '" + schema.variable(i).name + "' is missing");
      continue;
    }
    if (x[i] < 0 || static_cast<std::size_t>(x[i]) >= schema.cardinality(i))
      throw std::out_of_range("value index " + std::to_string(x[i]) + " out of range for '" +
                              schema.variable(i).name + "'");
  }
}

std::string_view to_string(Variant variant) {
  return variant == Variant::kPlain ? "plain" : "stop";
}

Variant parse_variant(std::string_view text) {
  if (text == "plain") return Variant::kPlain;
  if (text == "stop") return Variant::kStopAugmented;
  throw std::invalid_argument("unknown variant '" + std::string(text) + "'");
}

LdfmModel::LdfmModel(VariableSchema schema, Variant variant)
    : schema_(std::move(schema)),
      variant_(variant),
      dep_(num_sources() * num_targets(), 0.0),
      stop_(variant == Variant::kStopAugmented ? num_sources() : 0, 0.0) {}

std::size_t LdfmModel::source_index(const NodeKey& key) const {
  if (key.is_root()) return 0;
  if (key.variable() >= schema_.size() || key.value() >= schema_.cardinality(key.variable()))
    throw std::out_of_range("node key out of range");
  return source_of(key.variable(), key.value());
}

NodeKey LdfmModel::source_key(std::size_t source) const {
  if (source == 0) return NodeKey::root();
  const std::size_t pair = source - 1;
  return NodeKey::pair(schema_.variable_of_pair(pair), schema_.value_of_pair(pair));
}

void LdfmModel::set_stop(std::size_t source, double w) {
  if (!has_stop()) throw std::logic_error("plain model has no stop weights");
  stop_.at(source) = w;
}

double LdfmModel::stop_weight(const NodeKey& source) const {
  if (!has_stop()) throw std::logic_error("plain model has no stop weights");
  return stop_[source_index(source)];
}

namespace {

// Resolves (source, target) to dense indices, enforcing the legal key space.
std::pair<std::size_t, std::size_t> resolve(const LdfmModel& model, const NodeKey& source,
                                             const NodeKey& target) {
  if (target.is_root()) throw std::invalid_argument("ROOT cannot be a dependency target");
  const std::size_t s = model.source_index(source);
  const std::size_t t = model.source_index(target) - 1;
  if (!source.is_root() && source.variable() == target.variable())
    throw std::invalid_argument("source and target refer to the same variable");
  return {s, t};
}

}  // namespace

void LdfmModel::set_weight(const NodeKey& source, const NodeKey& target, double w) {
  const auto [s, t] = resolve(*this, source, target);
  dep(s, t) = w;
}

LdfmModel make_uniform_model(const VariableSchema& schema, Variant variant) {
  LdfmModel model(schema, variant);
  const std::size_t total = schema.num_pairs();
  const bool stop = variant == Variant::kStopAugmented;
  for (std::size_t s = 0; s < model.num_sources(); ++s) {
    const std::size_t own = s == 0 ? 0 : schema.cardinality(schema.variable_of_pair(s - 1));
    const std::size_t outcomes = total - own + (stop ? 1 : 0);
    const double w = 1.0 / static_cast<double>(outcomes);
    for (std::size_t t = 0; t < total; ++t)
      if (model.is_legal(s, t)) model.dep(s, t) = w;
    if (stop) model.set_stop(s, w);
  }
  return model;
}

std::vector<Violation> validate_model(const LdfmModel& model, double tol) {
  std::vector<Violation> out;
  const VariableSchema& schema = model.schema();
  for (std::size_t s = 0; s < model.num_sources(); ++s) {
    const NodeKey key = model.source_key(s);
    double sum = 0.0;
    bool in_range = true;
    auto check_range = [&](double w) {
      if (!(w >= 0.0 && w <= 1.0)) in_range = false;
    };
    for (std::size_t t = 0; t < model.num_targets(); ++t) {
      if (!model.is_legal(s, t)) continue;
      check_range(model.dep(s, t));
      sum += model.dep(s, t);
    }
    if (model.has_stop()) {
      check_range(model.stop(s));
      sum += model.stop(s);
    }
    if (!in_range)
      out.push_back({key, "weight outside [0,1] for source " + describe(schema, key)});
    if (!(std::abs(sum - 1.0) <= tol)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "outgoing weights of " << describe(schema, key) << " sum to " << sum;
      out.push_back({key, msg.str()});
    }
  }
  return out;
}

double lookup_weight(const LdfmModel& model, const NodeKey& source, const NodeKey& target) {
  const auto [s, t] = resolve(model, source, target);
  return model.dep(s, t);
}

double log_stop_product(const LdfmModel& model, const Assignment& x) {
  if (!model.has_stop()) return 0.0;
  double total = std::log(model.stop(0));
  for (std::size_t i = 0; i < x.size(); ++i)
    total += std::log(model.stop(model.source_of(i, static_cast<std::size_t>(x[i]))));
  return total;
}

std::string describe(const VariableSchema& schema, const NodeKey& key) {
  if (key.is_root()) return "ROOT";
  const Variable& v = schema.variable(key.variable());
  return v.name + "=" + v.values.at(key.value());
}

}  // namespace ldfm
