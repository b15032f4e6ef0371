#pragma once

#include <json.hpp>

#include "stokes_mutant/dubrovin.hpp"

namespace sm {

using Json = nlohmann::ordered_json;

Json to_json(cplx z);
Json to_json(const CMat& m);  // {"rows", "cols", "data"}, data row-major
Json to_json(const ExponentSet& C);
Json to_json(const StokesData& sd);
Json to_json(const MutationSystem& ms);
Json to_json(const AsymptoticFrame& fr);
Json to_json(const DubrovinReport& rep);

cplx complex_from_json(const Json& j);
CMat matrix_from_json(const Json& j);
ExponentSet exponents_from_json(const Json& j);
StokesData stokes_from_json(const Json& j);
MutationSystem mutsys_from_json(const Json& j);

// Canonical text: two-space indent, trailing newline.
std::string dump(const Json& j);
Json parse_json(const std::string& text);  // malformed on syntax errors
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// "stokes_data", "mutation_system", "stokes_multiplier", ...
std::string kind_of(const Json& j);

}  // namespace sm
