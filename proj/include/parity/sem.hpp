#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parity/kci.hpp"

namespace parity {

enum class NodeRole { none, protected_attr, outcome, prediction, evidence, other };

// One node of a finite tabular SEM. Exogenous nodes carry a pmf over their
// domain; endogenous nodes carry a deterministic lookup table over parent
// value combinations (mixed radix, first parent most significant), storing
// indices into the node's own domain.
struct SemNode {
    std::string name;
    std::vector<double> domain;
    bool exogenous = true;
    std::vector<double> pmf;
    std::vector<int> parents;
    std::vector<int> table;
    NodeRole role = NodeRole::none;
};

class SemGraph {
public:
    // Validates domains, pmfs, table sizes, acyclicity; computes topological
    // order and children lists. Parent references in `nodes` are indices.
    explicit SemGraph(std::vector<SemNode> nodes);

    std::size_t size() const { return nodes_.size(); }
    const SemNode& node(std::size_t i) const { return nodes_[i]; }
    std::size_t index_of(const std::string& name) const;
    bool has_node(const std::string& name) const;
    const std::vector<std::size_t>& topological_order() const { return topo_; }
    const std::vector<std::vector<std::size_t>>& children() const { return children_; }

    std::optional<std::size_t> node_with_role(NodeRole role) const;

    // value index of an endogenous node given parent value indices
    int lookup(std::size_t node_idx, const std::vector<int>& assignment) const;

private:
    std::vector<SemNode> nodes_;
    std::map<std::string, std::size_t> by_name_;
    std::vector<std::size_t> topo_;
    std::vector<std::vector<std::size_t>> children_;
};

struct EvidenceSpec {
    std::map<std::string, double> assignments;
};

struct SemSampleTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;  // aligned with names

    const std::vector<double>& column(const std::string& name) const;
};

SemSampleTable sample(const SemGraph& sem, std::size_t n, std::uint64_t seed);

// Graph surgery: incoming edges removed, node becomes exogenous with a point
// mass at `value`.
SemGraph intervene(const SemGraph& sem, const std::string& node, double value);

// Same, with a full distribution over the node's domain.
SemGraph intervene(const SemGraph& sem, const std::string& node,
                   const std::vector<double>& pmf);

// Exact joint over full assignments (value indices per node, in node order),
// by enumeration of exogenous configurations.
std::map<std::vector<int>, double> joint_pmf(const SemGraph& sem);

bool d_separated(const SemGraph& sem, const std::vector<std::string>& x,
                 const std::vector<std::string>& y, const std::vector<std::string>& z);

std::vector<std::vector<std::string>> directed_paths(const SemGraph& sem,
                                                     const std::string& from,
                                                     const std::string& to);

// True iff every directed path from the protected attribute to the prediction
// passes through the outcome node. Sufficient for equalized counterfactual
// odds; never refutes it.
bool check_eco_structural(const SemGraph& sem, const std::string& protected_attr,
                          const std::string& prediction, const std::string& outcome);

// Counterfactual-fairness check: distribution of the counterfactual prediction
// given factual evidence, per intervened value of the protected attribute;
// returns the max pairwise total-variation distance. `intervention_pmf` (over
// the protected attribute's domain) defaults to uniform; the result does not
// depend on it as long as it has full support.
EpsilonCpResult check_cf(const SemGraph& sem, const std::string& prediction,
                         const std::string& protected_attr, const EvidenceSpec& evidence,
                         const std::vector<double>& intervention_pmf = {},
                         std::uint64_t seed = 0, std::size_t fallback_samples = 100000);

// Exact conditional mutual information I(X; Y | Z) from the enumerated joint.
double conditional_mutual_information(const SemGraph& sem, const std::vector<std::string>& x,
                                      const std::vector<std::string>& y,
                                      const std::vector<std::string>& z);

enum class AuditMode { dp, eo, eopp, cp };

// Empirical parity audits over sampled or observed columns; delegates to
// epsilon_cp_discrete with the conditioning implied by the mode.
EpsilonCpResult parity_audit(const DataColumn& x, const DataColumn& a, AuditMode mode,
                             const std::optional<DataColumn>& y = std::nullopt,
                             const std::optional<DataColumn>& z = std::nullopt);

}  // namespace parity
