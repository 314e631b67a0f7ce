#pragma once

// Text serialization of grid functions and symmetric matrices.
//
// GridFunction: {"dim": n, "min": [...], "max": [...], "shape": [...], "values": [...]}
// SymMatrix:    {"dim": n, "entries": [...]}   (upper triangle, row-major)
//
// Doubles are written in shortest round-trip form, so read(write(f)) == f bit for bit.

#include <string>

#include <json.hpp>

#include "qcvx/grid.hpp"

namespace qcvx::io {

nlohmann::json to_json(const GridFunction& f);
GridFunction grid_function_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SymMatrix& m);
SymMatrix sym_matrix_from_json(const nlohmann::json& j);

std::string dump(const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

GridFunction read_grid_function(const std::string& path);
void write_grid_function(const std::string& path, const GridFunction& f);

}  // namespace qcvx::io
