#pragma once

#include <string>
#include <vector>

#include "mrf.hpp"

namespace nlift {

// Physical Cell Identity assignment instance in its MIP form: devices pick
// one state each; an interference term charges coeff whenever the two
// devices land in conflicting state groups.
struct ConflictGroup {
    std::vector<int> mi; // state ids of device i
    std::vector<int> mj; // state ids of device j
};

struct InterferenceTerm {
    int i = 0, j = 0; // device indices
    double coeff = 0.0;
    std::vector<ConflictGroup> conflicts;
};

struct PciProblem {
    std::vector<int> device_ids;
    std::vector<std::vector<int>> states; // candidate state ids per device
    std::vector<InterferenceTerm> interference;
};

PciProblem parse_pci(const std::string& json_text);
PciProblem parse_pci_file(const std::string& path);

// One MRF variable per device, no unary terms; edge energy
// coeff * I(conflict) per interference term, merged additively per pair.
MrfInstance pci_to_mrf(const PciProblem& p);

// Independent MIP-objective evaluator: each L_ij takes its minimal feasible
// value under the conflict constraints for the given assignment.
double pci_objective(const PciProblem& p, const Assignment& x);

} // namespace nlift
