#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ldfm/model.hpp"
#include "ldfm/rng.hpp"
#include "ldfm/tree.hpp"

namespace ldfm {

/// Query Q, evidence E and hidden H partition the variables. `query` and
/// `evidence` carry values on their own variables and kMissing elsewhere.
struct QueryInstance {
  Assignment evidence;
  Assignment query;
  std::vector<std::size_t> hidden;

  std::vector<std::size_t> query_variables() const;
};

/// Throws std::invalid_argument unless Q, E and H partition the schema's
/// variables and every value is inside its domain.
void validate_instance(const VariableSchema& schema, const QueryInstance& instance);

enum class SamplerKind { kGibbs, kTreeAugmented };

std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler(std::string_view text);

/// How tree_augmented_step moves one node.
enum class TreeMove {
  // Draw (value, parent) from its exact conditional, children factors
  // included. A Gibbs move on the augmented space: always accepted.
  kFullConditional,
  // Propose (value, parent) proportional to the incoming weight only and
  // apply a Metropolis-Hastings correction for the children and stop
  // factors.
  kIncomingProposal,
};

struct SamplerConfig {
  SamplerKind sampler = SamplerKind::kGibbs;
  // Sweeps (Gibbs) or single-node steps (tree-augmented) discarded before
  // recording. Unset means 10 n sweeps or 100 n steps.
  std::optional<std::size_t> burn_in;
  std::size_t samples = 1000;  // recorded per chain
  std::size_t thin = 1;        // sweeps or steps between recorded states
  std::size_t chains = 1;
  std::uint64_t seed = 0;
  TreeMove tree_move = TreeMove::kFullConditional;

  void validate() const;
  std::size_t burn_in_for(std::size_t n) const;
};

struct ChainState {
  Assignment values;
  std::vector<char> pinned;  // evidence variables never change
  ParentVector parents;      // tree-augmented chains only
  Rng rng;
  std::uint64_t steps = 0;
  std::uint64_t accepted = 0;
};

/// Uniformly random rooted spanning tree of the complete graph on {0..n}
/// (Wilson's algorithm).
ParentVector random_rooted_tree(std::size_t n, Rng& rng);

/// Evidence pinned, other values uniform, and for tree-augmented chains a
/// uniformly random tree.
ChainState init_chain(const LdfmModel& model, const Assignment& evidence, SamplerKind kind,
                      Rng rng);

/// Resamples every non-pinned variable in order from its conditional given
/// the rest. Throws NumericError when every candidate value of a variable
/// has zero probability.
void gibbs_sweep(const LdfmModel& model, ChainState& state);

/// Picks one variable uniformly and resamples its value (unless pinned) and
/// its parent among the nodes outside its own subtree.
void tree_augmented_step(const LdfmModel& model, ChainState& state,
                         TreeMove move = TreeMove::kFullConditional);

/// Recorded value vectors of all chains, chain by chain.
std::vector<Assignment> run_chain(const LdfmModel& model, const QueryInstance& instance,
                                  const SamplerConfig& config);

/// log[(matches + 1) / (N + 2)], a match setting every query variable.
double estimate_cll(std::span<const Assignment> samples, const QueryInstance& instance);

/// Σ over query variables of log[(matches_i + 1) / (N + |domain_i|)].
double estimate_cmll(std::span<const Assignment> samples, const QueryInstance& instance,
                     const VariableSchema& schema);

/// The estimators divided by |Q|.
double normalized_cll(std::span<const Assignment> samples, const QueryInstance& instance);
double normalized_cmll(std::span<const Assignment> samples, const QueryInstance& instance,
                       const VariableSchema& schema);

}  // namespace ldfm
