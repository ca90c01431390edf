#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ghyp/multigraph.hpp"
#include "ghyp/numerics.hpp"

namespace ghyp {

// Ordered by nesting: each fitted kind is a constrained case of the next.
enum class ModelKind { regular, configuration, block, full, custom };

std::string_view to_string(ModelKind kind);
// Accepts the canonical names plus "config" and "cm".
ModelKind parse_model_kind(std::string_view name);

// Relative floor applied to propensities of cells that carry no edges.
inline constexpr double kOmegaFloor = 1e-12;

// A generalized hypergeometric ensemble: per-dyad capacities Ξ and propensities Ω,
// both indexed by `layout`. Ω is stored canonicalized to max entry 1.
struct ModelSpec {
  ModelKind kind = ModelKind::custom;
  DyadLayout layout;
  std::vector<double> xi;
  std::vector<double> omega;
  std::optional<Partition> partition;
  int free_parameters = 0;

  double total_capacity() const;
  // True when all Ω over dyads with Ξ > 0 coincide (central hypergeometric case).
  bool has_uniform_omega() const;
};

ModelSpec fit_regular(const MultiGraph& g);
ModelSpec fit_configuration(const MultiGraph& g);
ModelSpec fit_block(const MultiGraph& g, const Partition& p);
ModelSpec fit_full(const MultiGraph& g);
// Ω defaults to uniform when empty. Ω is canonicalized.
ModelSpec make_custom(const DyadLayout& layout, std::vector<double> xi, std::vector<double> omega,
                      int free_parameters);

// Dispatch by kind; `partition` is required for ModelKind::block.
ModelSpec fit_model(ModelKind kind, const MultiGraph& g, const Partition* partition = nullptr);

// log Pr(g | Ξ, Ω). Uses the closed-form central hypergeometric when Ω is
// uniform and the Wallenius integral otherwise.
double log_likelihood(const ModelSpec& model, const MultiGraph& g, const QuadratureConfig& cfg = {});

// Always the closed form Σ log C(Ξ_ij, A_ij) − log C(ΣΞ, m); ignores Ω.
double log_likelihood_central(const ModelSpec& model, const MultiGraph& g);

// Always the Wallenius integral path, regardless of Ω.
double log_likelihood_wallenius(const ModelSpec& model, const MultiGraph& g, const QuadratureConfig& cfg = {});

// Approximate Wallenius mean: E_ij = Ξ_ij (1 − t^{Ω_ij}) with t solving Σ E_ij = m.
std::vector<double> expected_counts(const ModelSpec& model, std::int64_t m);

int degrees_of_freedom(const ModelSpec& model);

// Degrees of freedom of the configuration model on this layout (2n − 1 or n).
int configuration_dof(const DyadLayout& layout);

nlohmann::json to_json(const ModelSpec& model);
ModelSpec model_from_json(const nlohmann::json& doc);
// Kind, dof and a few scalars; used inside test reports.
nlohmann::json summary_json(const ModelSpec& model);

}  // namespace ghyp
