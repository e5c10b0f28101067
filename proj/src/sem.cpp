#include "parity/sem.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include "parity/rng.hpp"

namespace parity {

namespace {

constexpr double kPmfTol = 1e-12;
constexpr std::size_t kEnumerationBudget = 1000000;

int domain_index(const SemNode& node, double value) {
    for (std::size_t i = 0; i < node.domain.size(); ++i) {
        const double d = node.domain[i];
        if (value == d || std::abs(value - d) <= 1e-9 * std::max(1.0, std::abs(d)))
            return static_cast<int>(i);
    }
    throw std::invalid_argument("sem: value not in domain of node '" + node.name + "'");
}

void check_pmf(const SemNode& node) {
    if (node.pmf.size() != node.domain.size())
        throw std::invalid_argument("sem: pmf length mismatch on node '" + node.name + "'");
    double total = 0.0;
    for (double p : node.pmf) {
        if (p < 0.0)
            throw std::invalid_argument("sem: negative pmf entry on node '" + node.name + "'");
        total += p;
    }
    if (std::abs(total - 1.0) > kPmfTol)
        throw std::invalid_argument("sem: pmf of node '" + node.name + "' does not sum to 1");
}

}  // namespace

SemGraph::SemGraph(std::vector<SemNode> nodes) : nodes_(std::move(nodes)) {
    const std::size_t n = nodes_.size();
    if (n == 0) throw std::invalid_argument("sem: empty graph");
    for (std::size_t i = 0; i < n; ++i) {
        const SemNode& node = nodes_[i];
        if (node.name.empty()) throw std::invalid_argument("sem: unnamed node");
        if (!by_name_.emplace(node.name, i).second)
            throw std::invalid_argument("sem: duplicate node name '" + node.name + "'");
        if (node.domain.empty())
            throw std::invalid_argument("sem: empty domain on node '" + node.name + "'");
        for (std::size_t u = 0; u < node.domain.size(); ++u)
            for (std::size_t v = u + 1; v < node.domain.size(); ++v)
                if (node.domain[u] == node.domain[v])
                    throw std::invalid_argument("sem: duplicate domain value on node '" +
                                                node.name + "'");
        if (node.exogenous) {
            if (!node.parents.empty())
                throw std::invalid_argument("sem: exogenous node '" + node.name +
                                            "' has parents");
            check_pmf(node);
        } else {
            if (node.parents.empty())
                throw std::invalid_argument("sem: endogenous node '" + node.name +
                                            "' has no parents");
            std::size_t expect = 1;
            for (int p : node.parents) {
                if (p < 0 || static_cast<std::size_t>(p) >= n)
                    throw std::invalid_argument("sem: bad parent index on node '" + node.name +
                                                "'");
                expect *= nodes_[static_cast<std::size_t>(p)].domain.size();
            }
            if (node.table.size() != expect)
                throw std::invalid_argument("sem: table of node '" + node.name + "' has " +
                                            std::to_string(node.table.size()) +
                                            " entries, expected " + std::to_string(expect));
            for (int t : node.table)
                if (t < 0 || static_cast<std::size_t>(t) >= node.domain.size())
                    throw std::invalid_argument("sem: table entry out of domain on node '" +
                                                node.name + "'");
        }
    }

    // Kahn topological sort; leftover nodes mean a cycle
    children_.assign(n, {});
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        indegree[i] = nodes_[i].parents.size();
        for (int p : nodes_[i].parents) children_[static_cast<std::size_t>(p)].push_back(i);
    }
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        const std::size_t i = ready.front();
        ready.pop_front();
        topo_.push_back(i);
        for (std::size_t c : children_[i])
            if (--indegree[c] == 0) ready.push_back(c);
    }
    if (topo_.size() != n) throw std::invalid_argument("sem: graph has a cycle");
}

std::size_t SemGraph::index_of(const std::string& name) const {
    const auto it = by_name_.find(name);
    if (it == by_name_.end()) throw std::invalid_argument("sem: no node named '" + name + "'");
    return it->second;
}

bool SemGraph::has_node(const std::string& name) const { return by_name_.count(name) > 0; }

std::optional<std::size_t> SemGraph::node_with_role(NodeRole role) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].role == role) return i;
    return std::nullopt;
}

int SemGraph::lookup(std::size_t node_idx, const std::vector<int>& assignment) const {
    const SemNode& node = nodes_[node_idx];
    std::size_t idx = 0;
    for (int p : node.parents) {
        const auto pu = static_cast<std::size_t>(p);
        idx = idx * nodes_[pu].domain.size() + static_cast<std::size_t>(assignment[pu]);
    }
    return node.table[idx];
}

namespace {

// deterministic forward pass: exogenous values given, endogenous computed
void propagate(const SemGraph& sem, std::vector<int>& assignment) {
    for (std::size_t i : sem.topological_order()) {
        if (sem.node(i).exogenous) continue;
        assignment[i] = sem.lookup(i, assignment);
    }
}

std::vector<std::size_t> exogenous_nodes(const SemGraph& sem) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sem.size(); ++i)
        if (sem.node(i).exogenous) out.push_back(i);
    return out;
}

}  // namespace

const std::vector<double>& SemSampleTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return columns[i];
    throw std::invalid_argument("sem sample: no column named '" + name + "'");
}

SemSampleTable sample(const SemGraph& sem, std::size_t n, std::uint64_t seed) {
    SemSampleTable out;
    out.names.reserve(sem.size());
    for (std::size_t i = 0; i < sem.size(); ++i) out.names.push_back(sem.node(i).name);
    out.columns.assign(sem.size(), std::vector<double>(n));

    std::vector<int> assignment(sem.size(), 0);
    for (std::size_t row = 0; row < n; ++row) {
        Rng rng = Rng::stream(seed, row);
        for (std::size_t i : sem.topological_order()) {
            const SemNode& node = sem.node(i);
            if (node.exogenous)
                assignment[i] = static_cast<int>(rng.categorical(node.pmf));
            else
                assignment[i] = sem.lookup(i, assignment);
        }
        for (std::size_t i = 0; i < sem.size(); ++i)
            out.columns[i][row] = sem.node(i).domain[static_cast<std::size_t>(assignment[i])];
    }
    return out;
}

namespace {

SemGraph surgery(const SemGraph& sem, const std::string& name, std::vector<double> pmf) {
    const std::size_t target = sem.index_of(name);
    std::vector<SemNode> nodes;
    nodes.reserve(sem.size());
    for (std::size_t i = 0; i < sem.size(); ++i) nodes.push_back(sem.node(i));
    SemNode& node = nodes[target];
    node.exogenous = true;
    node.parents.clear();
    node.table.clear();
    node.pmf = std::move(pmf);
    return SemGraph(std::move(nodes));
}

}  // namespace

SemGraph intervene(const SemGraph& sem, const std::string& node, double value) {
    const SemNode& n = sem.node(sem.index_of(node));
    std::vector<double> pmf(n.domain.size(), 0.0);
    pmf[static_cast<std::size_t>(domain_index(n, value))] = 1.0;
    return surgery(sem, node, std::move(pmf));
}

SemGraph intervene(const SemGraph& sem, const std::string& node,
                   const std::vector<double>& pmf) {
    const SemNode& n = sem.node(sem.index_of(node));
    if (pmf.size() != n.domain.size())
        throw std::invalid_argument("intervene: pmf length mismatch for node '" + node + "'");
    return surgery(sem, node, pmf);
}

std::map<std::vector<int>, double> joint_pmf(const SemGraph& sem) {
    std::size_t states = 1;
    for (std::size_t i = 0; i < sem.size(); ++i) {
        states *= sem.node(i).domain.size();
        if (states > kEnumerationBudget)
            throw std::invalid_argument("joint_pmf: state space exceeds enumeration budget");
    }
    const std::vector<std::size_t> exo = exogenous_nodes(sem);
    std::map<std::vector<int>, double> out;
    std::vector<int> assignment(sem.size(), 0);
    std::vector<int> counter(exo.size(), 0);
    while (true) {
        double prob = 1.0;
        for (std::size_t e = 0; e < exo.size(); ++e) {
            assignment[exo[e]] = counter[e];
            prob *= sem.node(exo[e]).pmf[static_cast<std::size_t>(counter[e])];
        }
        if (prob > 0.0) {
            propagate(sem, assignment);
            out[assignment] += prob;
        }
        std::size_t e = 0;
        for (; e < exo.size(); ++e) {
            if (++counter[e] < static_cast<int>(sem.node(exo[e]).domain.size())) break;
            counter[e] = 0;
        }
        if (e == exo.size()) break;
    }
    return out;
}

bool d_separated(const SemGraph& sem, const std::vector<std::string>& x,
                 const std::vector<std::string>& y, const std::vector<std::string>& z) {
    const std::size_t n = sem.size();
    std::vector<bool> in_x(n, false), in_y(n, false), in_z(n, false);
    for (const auto& s : x) in_x[sem.index_of(s)] = true;
    for (const auto& s : y) in_y[sem.index_of(s)] = true;
    for (const auto& s : z) in_z[sem.index_of(s)] = true;
    for (std::size_t i = 0; i < n; ++i)
        if ((in_x[i] && in_y[i]) || (in_x[i] && in_z[i]) || (in_y[i] && in_z[i]))
            throw std::invalid_argument("d_separated: node sets must be disjoint");

    // ancestors of z (including z): colliders on these nodes are active
    std::vector<bool> anc(n, false);
    {
        std::deque<std::size_t> queue;
        for (std::size_t i = 0; i < n; ++i)
            if (in_z[i]) {
                anc[i] = true;
                queue.push_back(i);
            }
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            for (int p : sem.node(i).parents) {
                const auto pu = static_cast<std::size_t>(p);
                if (!anc[pu]) {
                    anc[pu] = true;
                    queue.push_back(pu);
                }
            }
        }
    }

    // reachability over (node, entered-from) states
    enum Dir { up = 0, down = 1 };  // up: entered from a child, down: from a parent
    std::vector<std::array<bool, 2>> visited(n, {false, false});
    std::deque<std::pair<std::size_t, Dir>> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (in_x[i]) queue.emplace_back(i, up);
    while (!queue.empty()) {
        const auto [node, dir] = queue.front();
        queue.pop_front();
        if (visited[node][dir]) continue;
        visited[node][dir] = true;
        if (!in_z[node] && in_y[node]) return false;

        if (dir == up) {
            if (in_z[node]) continue;
            for (int p : sem.node(node).parents)
                queue.emplace_back(static_cast<std::size_t>(p), up);
            for (std::size_t c : sem.children()[node]) queue.emplace_back(c, down);
        } else {
            if (anc[node])  // collider (or z itself) with observed descendant
                for (int p : sem.node(node).parents)
                    queue.emplace_back(static_cast<std::size_t>(p), up);
            if (!in_z[node])
                for (std::size_t c : sem.children()[node]) queue.emplace_back(c, down);
        }
    }
    return true;
}

std::vector<std::vector<std::string>> directed_paths(const SemGraph& sem,
                                                     const std::string& from,
                                                     const std::string& to) {
    const std::size_t src = sem.index_of(from);
    const std::size_t dst = sem.index_of(to);
    std::vector<std::vector<std::string>> paths;
    std::vector<std::size_t> stack{src};
    const auto dfs = [&](auto&& self, std::size_t node) -> void {
        if (node == dst) {
            std::vector<std::string> path;
            path.reserve(stack.size());
            for (std::size_t i : stack) path.push_back(sem.node(i).name);
            paths.push_back(std::move(path));
            return;
        }
        for (std::size_t c : sem.children()[node]) {
            stack.push_back(c);
            self(self, c);
            stack.pop_back();
        }
    };
    dfs(dfs, src);
    return paths;
}

bool check_eco_structural(const SemGraph& sem, const std::string& protected_attr,
                          const std::string& prediction, const std::string& outcome) {
    const std::size_t outcome_idx = sem.index_of(outcome);
    const auto paths = directed_paths(sem, protected_attr, prediction);
    for (const auto& path : paths) {
        bool blocked = false;
        for (const auto& name : path)
            if (sem.index_of(name) == outcome_idx) {
                blocked = true;
                break;
            }
        if (!blocked) return false;
    }
    return true;
}

EpsilonCpResult check_cf(const SemGraph& sem, const std::string& prediction,
                         const std::string& protected_attr, const EvidenceSpec& evidence,
                         const std::vector<double>& intervention_pmf, std::uint64_t seed,
                         std::size_t fallback_samples) {
    const std::size_t a_idx = sem.index_of(protected_attr);
    const std::size_t yhat_idx = sem.index_of(prediction);
    const SemNode& a_node = sem.node(a_idx);
    const SemNode& yhat_node = sem.node(yhat_idx);

    std::vector<double> pa = intervention_pmf;
    if (pa.empty())
        pa.assign(a_node.domain.size(), 1.0 / static_cast<double>(a_node.domain.size()));
    if (pa.size() != a_node.domain.size())
        throw std::invalid_argument("check_cf: intervention pmf length mismatch");

    // evidence as (node index, value index)
    std::vector<std::pair<std::size_t, int>> evid;
    for (const auto& [name, value] : evidence.assignments) {
        const std::size_t idx = sem.index_of(name);
        evid.emplace_back(idx, domain_index(sem.node(idx), value));
    }

    const std::vector<std::size_t> exo = exogenous_nodes(sem);
    std::size_t exo_states = 1;
    bool exact = true;
    for (std::size_t e : exo) {
        exo_states *= sem.node(e).domain.size();
        if (exo_states > kEnumerationBudget) {
            exact = false;
            break;
        }
    }

    const std::size_t n_a = a_node.domain.size();
    const std::size_t n_yhat = yhat_node.domain.size();
    std::vector<std::vector<double>> dist(n_a, std::vector<double>(n_yhat, 0.0));
    double evidence_mass = 0.0;

    // abduction over shared exogenous state, then action + prediction per a'
    const auto accumulate = [&](const std::vector<int>& exo_values, double weight) {
        std::vector<int> factual(sem.size(), 0);
        for (std::size_t e = 0; e < exo.size(); ++e) factual[exo[e]] = exo_values[e];
        propagate(sem, factual);
        for (const auto& [idx, vi] : evid)
            if (factual[idx] != vi) return;
        evidence_mass += weight;
        for (std::size_t av = 0; av < n_a; ++av) {
            if (pa[av] <= 0.0) continue;
            std::vector<int> twin(sem.size(), 0);
            for (std::size_t e = 0; e < exo.size(); ++e) twin[exo[e]] = exo_values[e];
            twin[a_idx] = static_cast<int>(av);
            for (std::size_t i : sem.topological_order()) {
                if (i == a_idx || sem.node(i).exogenous) continue;
                twin[i] = sem.lookup(i, twin);
            }
            dist[av][static_cast<std::size_t>(twin[yhat_idx])] += weight;
        }
    };

    if (exact) {
        std::vector<int> counter(exo.size(), 0);
        while (true) {
            double prob = 1.0;
            for (std::size_t e = 0; e < exo.size(); ++e)
                prob *= sem.node(exo[e]).pmf[static_cast<std::size_t>(counter[e])];
            if (prob > 0.0) accumulate(counter, prob);
            std::size_t e = 0;
            for (; e < exo.size(); ++e) {
                if (++counter[e] < static_cast<int>(sem.node(exo[e]).domain.size())) break;
                counter[e] = 0;
            }
            if (e == exo.size()) break;
        }
    } else {
        if (fallback_samples < 10000)
            throw std::invalid_argument("check_cf: sampling fallback needs n >= 10^4");
        std::vector<int> draw(exo.size(), 0);
        for (std::size_t r = 0; r < fallback_samples; ++r) {
            Rng rng = Rng::stream(seed, r);
            for (std::size_t e = 0; e < exo.size(); ++e)
                draw[e] = static_cast<int>(rng.categorical(sem.node(exo[e]).pmf));
            accumulate(draw, 1.0 / static_cast<double>(fallback_samples));
        }
    }

    if (evidence_mass <= 0.0)
        throw std::invalid_argument("check_cf: evidence event has probability zero");

    EpsilonCpResult res;
    for (std::size_t av = 0; av < n_a; ++av)
        for (double& v : dist[av]) v /= evidence_mass;
    for (std::size_t i = 0; i < n_a; ++i) {
        if (pa[i] <= 0.0) continue;
        for (std::size_t j = i + 1; j < n_a; ++j) {
            if (pa[j] <= 0.0) continue;
            const double tv = total_variation(dist[i], dist[j]);
            if (tv > res.epsilon_hat) {
                res.epsilon_hat = tv;
                res.worst_pair = {0.0, a_node.domain[i], a_node.domain[j]};
            }
        }
    }
    res.per_stratum[0.0] = res.epsilon_hat;
    return res;
}

double conditional_mutual_information(const SemGraph& sem, const std::vector<std::string>& x,
                                      const std::vector<std::string>& y,
                                      const std::vector<std::string>& z) {
    std::vector<std::size_t> xi, yi, zi;
    for (const auto& s : x) xi.push_back(sem.index_of(s));
    for (const auto& s : y) yi.push_back(sem.index_of(s));
    for (const auto& s : z) zi.push_back(sem.index_of(s));

    const auto project = [](const std::vector<int>& a, const std::vector<std::size_t>& idx) {
        std::vector<int> out;
        out.reserve(idx.size());
        for (std::size_t i : idx) out.push_back(a[i]);
        return out;
    };

    std::map<std::vector<int>, double> pxyz, pxz, pyz, pz;
    for (const auto& [assignment, prob] : joint_pmf(sem)) {
        const auto xv = project(assignment, xi);
        const auto yv = project(assignment, yi);
        const auto zv = project(assignment, zi);
        auto key_xyz = zv;
        key_xyz.insert(key_xyz.end(), xv.begin(), xv.end());
        key_xyz.insert(key_xyz.end(), yv.begin(), yv.end());
        auto key_xz = zv;
        key_xz.insert(key_xz.end(), xv.begin(), xv.end());
        auto key_yz = zv;
        key_yz.insert(key_yz.end(), yv.begin(), yv.end());
        pxyz[key_xyz] += prob;
        pxz[key_xz] += prob;
        pyz[key_yz] += prob;
        pz[zv] += prob;
    }

    const std::size_t nz = zi.size();
    const std::size_t nx = xi.size();
    double info = 0.0;
    for (const auto& [key, p] : pxyz) {
        if (p <= 0.0) continue;
        const std::vector<int> zv(key.begin(), key.begin() + static_cast<long>(nz));
        const std::vector<int> xz(key.begin(), key.begin() + static_cast<long>(nz + nx));
        std::vector<int> yz = zv;
        yz.insert(yz.end(), key.begin() + static_cast<long>(nz + nx), key.end());
        info += p * std::log(p * pz.at(zv) / (pxz.at(xz) * pyz.at(yz)));
    }
    return info;
}

EpsilonCpResult parity_audit(const DataColumn& x, const DataColumn& a, AuditMode mode,
                             const std::optional<DataColumn>& y,
                             const std::optional<DataColumn>& z) {
    const std::size_t n = x.size();
    if (a.size() != n) throw std::invalid_argument("parity_audit: column length mismatch");
    DataColumn stratum;
    stratum.kind = ColumnKind::categorical;
    switch (mode) {
        case AuditMode::dp:
            stratum.values.assign(n, 0.0);
            return epsilon_cp_discrete(x, a, stratum);
        case AuditMode::eo:
            if (!y || y->size() != n)
                throw std::invalid_argument("parity_audit: eo mode needs an outcome column");
            return epsilon_cp_discrete(x, a, *y);
        case AuditMode::eopp: {
            if (!y || y->size() != n)
                throw std::invalid_argument("parity_audit: eopp mode needs an outcome column");
            DataColumn xs, as;
            xs.kind = x.kind;
            as.kind = a.kind;
            for (std::size_t i = 0; i < n; ++i) {
                if (y->values[i] != 1.0) continue;
                xs.values.push_back(x.values[i]);
                as.values.push_back(a.values[i]);
            }
            if (xs.values.empty())
                throw std::invalid_argument("parity_audit: no rows with y = 1");
            stratum.values.assign(xs.values.size(), 1.0);
            return epsilon_cp_discrete(xs, as, stratum);
        }
        case AuditMode::cp:
            if (!z || z->size() != n)
                throw std::invalid_argument("parity_audit: cp mode needs a conditioning column");
            return epsilon_cp_discrete(x, a, *z);
    }
    throw std::logic_error("parity_audit: unknown mode");
}

}  // namespace parity
