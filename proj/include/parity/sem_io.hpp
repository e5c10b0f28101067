#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "parity/sem.hpp"

namespace parity {

struct SemParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Loads a SEM definition (JSON). Schema:
//   { "nodes": [
//       {"name": "u", "domain": [..], "pmf": [..], "role": "other"},
//       {"name": "z", "domain": [..], "parents": ["a","u"], "table": [..]}
//   ] }
// Exogenous nodes carry "pmf"; endogenous nodes carry "parents" and "table"
// (values from the node's domain, one entry per parent-value combination in
// row-major order, first listed parent most significant). "role" is one of
// protected | outcome | prediction | evidence | other.
SemGraph load_sem(std::istream& in);
SemGraph load_sem_file(const std::string& path);

const char* to_string(NodeRole role);

}  // namespace parity
