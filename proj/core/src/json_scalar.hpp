#pragma once

// Internal: JSON <-> Scalar conversion shared by the store, selection files
// and parameter files.

#include "mforge/diagnostic.hpp"
#include "mforge/metamodel.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace mforge::detail {

/// Integer -> Integer, float -> Real, string -> Text, [x, y, z] -> Vec3.
/// Throws Failure(E-PARSE) otherwise.
Scalar scalar_from_json(const nlohmann::json& v, const std::string& where);

/// Throws Failure(E-PARSE) on non-finite reals.
nlohmann::json scalar_to_json(const Scalar& s, const std::string& where);

/// Parses JSON text, rejecting duplicate object keys. Throws Failure(E-PARSE).
nlohmann::json parse_strict_json(std::string_view text);

} // namespace mforge::detail
