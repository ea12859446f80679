#pragma once

#include "cgmom/problems.hpp"

#include <filesystem>

namespace cgmom {

/// JSON document with keys {family, dims, seed, lambda, reg, matrix, b,
/// x_star}; the matrix is a row-major flat array and all floats round-trip
/// exactly (shortest-representation formatting).
void save_instance(const SparseInstance& inst, const std::filesystem::path& path);

SparseInstance load_instance(const std::filesystem::path& path);

std::string instance_to_json_text(const SparseInstance& inst);
SparseInstance instance_from_json_text(const std::string& text);

}  // namespace cgmom
