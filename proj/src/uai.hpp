#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrf.hpp"

namespace nlift {

// A graphical model as read from a UAI file: nonnegative potential tables,
// scope order and table order exactly as in the file.
struct RawModel {
    int n_vars = 0;
    std::vector<int> card;
    std::vector<std::vector<int>> scopes;
    std::vector<std::vector<double>> potentials; // row-major, last scope var fastest

    bool operator==(const RawModel&) const = default;
};

RawModel parse_uai(const std::string& text);
RawModel parse_uai_file(const std::string& path);

std::string write_uai(const RawModel& model);
void write_uai_file(const RawModel& model, const std::string& path);

// Potentials -> energies via theta = -log(P). Values <= 0 are replaced by
// *clamp when given, otherwise NonPositivePotential is thrown.
MrfInstance to_energies(const RawModel& model,
                        std::optional<double> clamp = std::nullopt);

// Inverse transform for export: potentials = exp(-theta).
RawModel from_energies(const MrfInstance& inst);

} // namespace nlift
