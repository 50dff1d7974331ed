#pragma once

#include "mforge/diagnostic.hpp"
#include "mforge/metamodel.hpp"
#include "mforge/simkernel.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mforge {

/// Builtin kernel names.
namespace kernels {
inline constexpr std::string_view kAuvKinematics = "auv.kinematics";
inline constexpr std::string_view kDeadbeatMcu = "mcu.deadbeat";
inline constexpr std::string_view kThresholdTcu = "tcu.threshold";
inline constexpr std::string_view kStaticTargets = "targets.static";
} // namespace kernels

/// Registered builtin kernels and the role each one implements.
[[nodiscard]] const std::map<std::string, Role, std::less<>>& builtin_kernels();

struct AttachResult {
    Model model;
    Diagnostics warnings;  // W-REBIND when an existing binding was replaced
};

/// Throws Failure with E-UNKNOWN-BLOCK, E-NOT-SYSTEM or E-ABSTRACT-BEHAVIOR.
[[nodiscard]] AttachResult attach_behavior(Model model, BehaviorBinding binding);

enum class ParamType { Integer, Real, Vec3, Text };
std::string_view to_string(ParamType t) noexcept;

struct ParamDecl {
    ParamType type = ParamType::Real;
    bool tunable = false;
};

/// "<type>[,tunable]" with type one of integer|real|vec3|text.
[[nodiscard]] std::optional<ParamDecl> parse_param_decl(std::string_view text);

/// True when `value` can be bound to a parameter of `type` (Integer widens to Real).
[[nodiscard]] bool accepts(ParamType type, const Scalar& value) noexcept;

struct ParamSpec {
    std::string name;
    std::string block_id;
    ParamType type = ParamType::Real;
    bool tunable = false;
    std::optional<Scalar> default_value;

    friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

enum class Runtime { Builtin };

struct ArtifactMember {
    std::string block_id;
    BehaviorBinding binding;

    friend bool operator==(const ArtifactMember&, const ArtifactMember&) = default;
};

struct ExecutableArtifact {
    std::string id;
    std::string model_id;
    Runtime runtime = Runtime::Builtin;
    std::vector<ArtifactMember> members;    // sorted by block id
    std::vector<ParamSpec> param_schema;    // sorted by name

    [[nodiscard]] const ParamSpec* find_param(std::string_view name) const noexcept;
    [[nodiscard]] const ArtifactMember* member_with_role(Role role) const noexcept;

    friend bool operator==(const ExecutableArtifact&, const ExecutableArtifact&) = default;
};

/// Throws Failure with E-LEAF-NO-BEHAVIOR, E-ROLE-CARDINALITY,
/// E-RUNTIME-MISMATCH or E-PARAM-CONFLICT. The specific model must already
/// pass validate_specific; violations there are rethrown as their first error.
[[nodiscard]] ExecutableArtifact assemble_artifact(const Model& specific, const Model& reference);

using ParamValues = std::map<std::string, Scalar, std::less<>>;

/// Parameter file: JSON object name -> value. Throws Failure(E-PARSE).
[[nodiscard]] ParamValues parse_param_file(std::string_view json_text);

/// Value typed on a command line: a JSON number, string or [x, y, z];
/// anything else is taken as plain text.
[[nodiscard]] Scalar parse_scalar_literal(std::string_view text);

/// Fills every schema entry from `provided` or its default, type-checked.
/// Integer values bound to Real parameters are widened.
[[nodiscard]] ParamValues resolve_params(const ExecutableArtifact& artifact, const ParamValues& provided);

/// Maps resolved values onto the kernel parameter set.
[[nodiscard]] sim::SimParams to_sim_params(const ExecutableArtifact& artifact, const ParamValues& resolved,
                                           sim::NoiseOnset onset);

struct RunOptions {
    sim::NoiseOnset noise_onset = sim::NoiseOnset::AfterActivation;
};

[[nodiscard]] sim::SimResult run_artifact(const ExecutableArtifact& artifact, const ParamValues& params,
                                          sim::EventSink* sink = nullptr, const RunOptions& options = {});

} // namespace mforge
