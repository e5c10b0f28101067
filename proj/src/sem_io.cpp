#include "parity/sem_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace parity {

namespace {

using nlohmann::json;

NodeRole parse_role(const std::string& s, const std::string& node) {
    if (s == "protected") return NodeRole::protected_attr;
    if (s == "outcome") return NodeRole::outcome;
    if (s == "prediction") return NodeRole::prediction;
    if (s == "evidence") return NodeRole::evidence;
    if (s == "other") return NodeRole::other;
    throw SemParseError("sem file: node '" + node + "': unknown role '" + s + "'");
}

std::vector<double> number_array(const json& j, const std::string& node, const char* field) {
    if (!j.is_array())
        throw SemParseError("sem file: node '" + node + "': '" + field + "' must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number())
            throw SemParseError("sem file: node '" + node + "': '" + field +
                                "' must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

int value_to_index(const std::vector<double>& domain, double value, const std::string& node) {
    for (std::size_t i = 0; i < domain.size(); ++i)
        if (value == domain[i] ||
            std::abs(value - domain[i]) <= 1e-9 * std::max(1.0, std::abs(domain[i])))
            return static_cast<int>(i);
    throw SemParseError("sem file: node '" + node + "': table value " + std::to_string(value) +
                        " is not in the domain");
}

}  // namespace

const char* to_string(NodeRole role) {
    switch (role) {
        case NodeRole::none: return "none";
        case NodeRole::protected_attr: return "protected";
        case NodeRole::outcome: return "outcome";
        case NodeRole::prediction: return "prediction";
        case NodeRole::evidence: return "evidence";
        case NodeRole::other: return "other";
    }
    return "none";
}

SemGraph load_sem(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SemParseError(std::string("sem file: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
        throw SemParseError("sem file: top level must be an object with a 'nodes' array");

    // first pass: names for parent resolution
    std::map<std::string, std::size_t> index;
    const json& jnodes = doc["nodes"];
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
        const json& jn = jnodes[i];
        if (!jn.is_object() || !jn.contains("name") || !jn["name"].is_string())
            throw SemParseError("sem file: nodes[" + std::to_string(i) +
                                "] must be an object with a string 'name'");
        const std::string name = jn["name"].get<std::string>();
        if (!index.emplace(name, i).second)
            throw SemParseError("sem file: duplicate node name '" + name + "'");
    }

    std::vector<SemNode> nodes;
    nodes.reserve(jnodes.size());
    for (const auto& jn : jnodes) {
        SemNode node;
        node.name = jn["name"].get<std::string>();
        if (!jn.contains("domain"))
            throw SemParseError("sem file: node '" + node.name + "': missing 'domain'");
        node.domain = number_array(jn["domain"], node.name, "domain");
        if (jn.contains("role"))
            node.role = parse_role(jn["role"].get<std::string>(), node.name);

        const bool has_pmf = jn.contains("pmf");
        const bool has_parents = jn.contains("parents") || jn.contains("table");
        if (has_pmf == has_parents)
            throw SemParseError("sem file: node '" + node.name +
                                "': need exactly one of 'pmf' or 'parents'+'table'");
        if (has_pmf) {
            node.exogenous = true;
            node.pmf = number_array(jn["pmf"], node.name, "pmf");
        } else {
            node.exogenous = false;
            if (!jn.contains("parents") || !jn.contains("table"))
                throw SemParseError("sem file: node '" + node.name +
                                    "': endogenous nodes need 'parents' and 'table'");
            if (!jn["parents"].is_array())
                throw SemParseError("sem file: node '" + node.name +
                                    "': 'parents' must be an array");
            for (const auto& jp : jn["parents"]) {
                if (!jp.is_string())
                    throw SemParseError("sem file: node '" + node.name +
                                        "': parent names must be strings");
                const std::string pname = jp.get<std::string>();
                const auto it = index.find(pname);
                if (it == index.end())
                    throw SemParseError("sem file: node '" + node.name +
                                        "': unknown parent '" + pname + "'");
                node.parents.push_back(static_cast<int>(it->second));
            }
            const std::vector<double> raw = number_array(jn["table"], node.name, "table");
            node.table.reserve(raw.size());
            for (double v : raw) node.table.push_back(value_to_index(node.domain, v, node.name));
        }
        nodes.push_back(std::move(node));
    }

    try {
        return SemGraph(std::move(nodes));
    } catch (const std::invalid_argument& e) {
        throw SemParseError(std::string("sem file: ") + e.what());
    }
}

SemGraph load_sem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SemParseError("cannot open '" + path + "'");
    return load_sem(in);
}

}  // namespace parity
