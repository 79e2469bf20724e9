#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ldfm {

struct Variable {
  std::string name;
  std::vector<std::string> values;

  bool operator==(const Variable&) const = default;
};

/// Ordered variables with finite label domains. Labels are mapped to dense
/// indices; every ⟨variable,value⟩ pair also gets a global "pair index" in
/// [0, num_pairs()) used to address the weight tables.
class VariableSchema {
 public:
  explicit VariableSchema(std::vector<Variable> variables);

  std::size_t size() const { return variables_.size(); }
  const Variable& variable(std::size_t i) const { return variables_.at(i); }
  const std::vector<Variable>& variables() const { return variables_; }
  std::size_t cardinality(std::size_t i) const { return variables_[i].values.size(); }

  std::size_t num_pairs() const { return pair_variable_.size(); }
  std::size_t pair_index(std::size_t var, std::size_t value) const { return offsets_[var] + value; }
  std::size_t variable_of_pair(std::size_t pair) const { return pair_variable_[pair]; }
  std::size_t value_of_pair(std::size_t pair) const {
    return pair - offsets_[pair_variable_[pair]];
  }

  std::optional<std::size_t> find_variable(std::string_view name) const;
  std::optional<std::size_t> find_value(std::size_t var, std::string_view label) const;

  // Number of complete assignments, saturating at SIZE_MAX.
  std::size_t state_space_size() const;

  bool operator==(const VariableSchema& other) const { return variables_ == other.variables_; }

 private:
  std::vector<Variable> variables_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> pair_variable_;
};

inline constexpr int kMissing = -1;

/// Value index per variable; kMissing marks an unobserved entry.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n, int fill = kMissing) : values_(n, fill) {}
  explicit Assignment(std::vector<int> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  int operator[](std::size_t i) const { return values_[i]; }
  int& operator[](std::size_t i) { return values_[i]; }
  bool is_set(std::size_t i) const { return values_[i] != kMissing; }
  bool is_complete() const;
  const std::vector<int>& values() const { return values_; }

  bool operator==(const Assignment&) const = default;
  auto operator<=>(const Assignment&) const = default;

 private:
  std::vector<int> values_;
};

/// Throws std::invalid_argument unless `x` has one entry per variable and
/// every set entry is inside its domain. `require_complete` also rejects
/// missing entries.
void check_assignment(const VariableSchema& schema, const Assignment& x, bool require_complete);

/// ROOT (the dummy node x_0) or a ⟨variable,value⟩ pair.
class NodeKey {
 public:
  static constexpr NodeKey root() { return NodeKey(); }
  static constexpr NodeKey pair(std::size_t variable, std::size_t value) {
    return NodeKey(variable, value);
  }

  constexpr bool is_root() const { return root_; }
  constexpr std::size_t variable() const { return variable_; }
  constexpr std::size_t value() const { return value_; }

  constexpr bool operator==(const NodeKey&) const = default;

 private:
  constexpr NodeKey() = default;
  constexpr NodeKey(std::size_t variable, std::size_t value)
      : root_(false), variable_(variable), value_(value) {}

  bool root_ = true;
  std::size_t variable_ = 0;
  std::size_t value_ = 0;
};

enum class Variant { kPlain, kStopAugmented };

std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view text);

/// Dependency weights w(target | source) over the dense key space, plus stop
/// weights w(s | source) for the stop-augmented variant.
///
/// Source index 0 is ROOT and source index 1 + p is pair p. Cells whose
/// source and target belong to the same variable are structurally zero and
/// are never read by the numerics.
///
/// The model is a probability table, never a normalized distribution over
/// valid assignments: the plain variant defines p(x) = beta * n! * Z_x and the
/// stop variant p(x) = Z_x * prod(stop). beta and the valid-assignment
/// normalizer gamma are never materialized.
class LdfmModel {
 public:
  LdfmModel(VariableSchema schema, Variant variant);

  const VariableSchema& schema() const { return schema_; }
  Variant variant() const { return variant_; }
  bool has_stop() const { return variant_ == Variant::kStopAugmented; }

  std::size_t num_sources() const { return 1 + schema_.num_pairs(); }
  std::size_t num_targets() const { return schema_.num_pairs(); }

  std::size_t source_index(const NodeKey& key) const;
  NodeKey source_key(std::size_t source) const;
  // Source index of variable `var` holding value `value`.
  std::size_t source_of(std::size_t var, std::size_t value) const {
    return 1 + schema_.pair_index(var, value);
  }
  bool is_legal(std::size_t source, std::size_t target) const {
    return source == 0 || schema_.variable_of_pair(source - 1) != schema_.variable_of_pair(target);
  }

  double dep(std::size_t source, std::size_t target) const {
    return dep_[source * num_targets() + target];
  }
  double& dep(std::size_t source, std::size_t target) {
    return dep_[source * num_targets() + target];
  }
  std::span<const double> dep_row(std::size_t source) const {
    return {dep_.data() + source * num_targets(), num_targets()};
  }
  std::span<double> dep_row(std::size_t source) {
    return {dep_.data() + source * num_targets(), num_targets()};
  }

  // Zero for the plain variant.
  double stop(std::size_t source) const { return has_stop() ? stop_[source] : 0.0; }
  void set_stop(std::size_t source, double w);

  double stop_weight(const NodeKey& source) const;
  void set_weight(const NodeKey& source, const NodeKey& target, double w);

  bool operator==(const LdfmModel&) const = default;

 private:
  VariableSchema schema_;
  Variant variant_;
  std::vector<double> dep_;
  std::vector<double> stop_;
};

LdfmModel make_uniform_model(const VariableSchema& schema, Variant variant);

struct Violation {
  NodeKey source;
  std::string message;
};

/// Range and normalization checks. Returns every violation; empty iff valid.
std::vector<Violation> validate_model(const LdfmModel& model, double tol = 1e-9);

/// w(target | source). Throws std::invalid_argument when both keys name the
/// same variable or the target is ROOT, std::out_of_range for bad indices.
double lookup_weight(const LdfmModel& model, const NodeKey& source, const NodeKey& target);

/// Σ over all nodes of x, ROOT included, of log w(s | node). Zero for plain.
double log_stop_product(const LdfmModel& model, const Assignment& x);

/// "ROOT" or "name=label".
std::string describe(const VariableSchema& schema, const NodeKey& key);

}  // namespace ldfm
