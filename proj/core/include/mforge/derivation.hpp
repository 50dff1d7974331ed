#pragma once

#include "mforge/metamodel.hpp"

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mforge {

/// Prefix marking a parameter declaration: "param:<name>" -> "<type>[,tunable]".
inline constexpr std::string_view kParamDeclPrefix = "param:";
/// Param carrying the reference block id on every specific-model block.
inline constexpr std::string_view kRefParam = "ref";

struct AlternativeGroup {
    std::string service_id;
    std::string root_id;
    /// Concrete Systems in the inheritance tree below root_id (root included when concrete), sorted.
    std::vector<std::string> leaves;

    [[nodiscard]] bool usable() const noexcept { return !leaves.empty(); }
    friend bool operator==(const AlternativeGroup&, const AlternativeGroup&) = default;
};

struct Selection {
    std::map<std::string, std::string> choices;                          // service id -> System id
    std::map<std::pair<std::string, std::string>, Scalar> overrides;     // (block id, param) -> value
};

/// Parses {"select": {...}, "params": {"block.param": value}}. Throws Failure(E-PARSE).
[[nodiscard]] Selection parse_selection(std::string_view json_text);

/// One group per (root System, served service); sorted by (service_id, root_id).
/// A root is a System tracing to the service with no Inheritance ancestor that
/// also traces to it.
[[nodiscard]] std::vector<AlternativeGroup> alternative_groups(const Model& reference);

/// Concrete providers per served service: union of leaves over that service's groups.
[[nodiscard]] std::map<std::string, std::vector<std::string>> service_candidates(const Model& reference);

/// Transitive Inheritance descendants of `root` (root excluded), sorted.
[[nodiscard]] std::vector<std::string> inheritance_descendants(const Model& model, std::string_view root);

/// Params of `block_id` with inherited values: ancestors' params overlaid root
/// to leaf, the block's own entries winning.
[[nodiscard]] ParamMap effective_params(const Model& reference, std::string_view block_id);

/// Instantiates a specific model. Throws Failure with an E-SELECTION-* or
/// E-PARAM-MISSING code when the selection cannot be honored.
[[nodiscard]] Model derive_specific(const Model& reference, const Selection& sel, std::string_view model_id);

enum class Resolution { Resolved, Missing, Ambiguous };
std::string_view to_string(Resolution r) noexcept;

struct CoverageEntry {
    std::string service_id;
    Resolution status = Resolution::Missing;
    std::vector<std::string> present;  // providers found in the specific model
};

struct CoverageReport {
    std::vector<CoverageEntry> entries;  // sorted by service_id
    bool complete = true;
};

/// Resolution status of every service that has at least one alternative group.
[[nodiscard]] CoverageReport completeness(const Model& specific, const Model& reference);

} // namespace mforge
