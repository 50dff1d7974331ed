#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mforge {

/// Stable diagnostic codes. Tests and the CLI match on these strings.
namespace codes {
// load / structure
inline constexpr std::string_view kParse = "E-PARSE";
inline constexpr std::string_view kDupId = "E-DUP-ID";
inline constexpr std::string_view kDupRelation = "E-DUP-RELATION";
inline constexpr std::string_view kDanglingLink = "E-DANGLING-LINK";
inline constexpr std::string_view kKind = "E-KIND";
inline constexpr std::string_view kViewLayer = "E-VIEW-LAYER";
inline constexpr std::string_view kSelfLink = "E-SELF-LINK";
inline constexpr std::string_view kIo = "E-IO";
// relation legality
inline constexpr std::string_view kTraceKind = "E-TRACE-KIND";
inline constexpr std::string_view kInheritKind = "E-INHERIT-KIND";
inline constexpr std::string_view kConnectLayer = "E-CONNECT-LAYER";
inline constexpr std::string_view kComposeLayer = "E-COMPOSE-LAYER";
// reference rules
inline constexpr std::string_view kTraceMissing = "E-TRACE-MISSING";
inline constexpr std::string_view kCycle = "E-CYCLE";
inline constexpr std::string_view kAbstractBehavior = "E-ABSTRACT-BEHAVIOR";
inline constexpr std::string_view kNoBehavior = "W-NO-BEHAVIOR";
inline constexpr std::string_view kUnpresented = "W-UNPRESENTED";
inline constexpr std::string_view kModelKind = "E-MODEL-KIND";
// specific rules
inline constexpr std::string_view kDanglingRef = "E-DANGLING-REF";
inline constexpr std::string_view kSelectionMissing = "E-SELECTION-MISSING";
inline constexpr std::string_view kSelectionAmbiguous = "E-SELECTION-AMBIGUOUS";
inline constexpr std::string_view kSelectionAbstract = "E-SELECTION-ABSTRACT";
inline constexpr std::string_view kSelectionForeign = "E-SELECTION-FOREIGN";
inline constexpr std::string_view kAbstractInSpecific = "E-ABSTRACT-IN-SPECIFIC";
inline constexpr std::string_view kParamMissing = "E-PARAM-MISSING";
inline constexpr std::string_view kParentMismatch = "E-PARENT-MISMATCH";
inline constexpr std::string_view kUnknownBlock = "E-UNKNOWN-BLOCK";
// behavior / artifact
inline constexpr std::string_view kNotSystem = "E-NOT-SYSTEM";
inline constexpr std::string_view kRebind = "W-REBIND";
inline constexpr std::string_view kLeafNoBehavior = "E-LEAF-NO-BEHAVIOR";
inline constexpr std::string_view kRoleCardinality = "E-ROLE-CARDINALITY";
inline constexpr std::string_view kRuntimeMismatch = "E-RUNTIME-MISMATCH";
inline constexpr std::string_view kParamConflict = "E-PARAM-CONFLICT";
inline constexpr std::string_view kParamType = "E-PARAM-TYPE";
inline constexpr std::string_view kParamUnknown = "E-PARAM-UNKNOWN";
inline constexpr std::string_view kParamRange = "E-PARAM-RANGE";
inline constexpr std::string_view kHookFailure = "E-HOOK-FAILURE";
} // namespace codes

enum class Severity { Error, Warning };

struct Diagnostic {
    std::string code;
    std::string message;
    std::string subject;
    Severity severity = Severity::Error;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

Diagnostic error(std::string_view code, std::string subject, std::string message);
Diagnostic warning(std::string_view code, std::string subject, std::string message);

/// `<severity> <code> <subject>: <message>`
std::string render_diagnostic(const Diagnostic& d);
std::ostream& operator<<(std::ostream& os, const Diagnostic& d);

[[nodiscard]] bool has_errors(const Diagnostics& ds);
[[nodiscard]] bool has_code(const Diagnostics& ds, std::string_view code);

/// Sorted by (code, subject, message) so diagnostic lists compare as multisets.
void sort_diagnostics(Diagnostics& ds);

/// Thrown by operations whose contract is to fail rather than report: loading,
/// derivation, behavior binding, artifact assembly and runs.
class Failure : public std::runtime_error {
public:
    Failure(std::string_view code, std::string subject, const std::string& message,
            std::optional<long long> step = std::nullopt);

    [[nodiscard]] const std::string& code() const noexcept { return code_; }
    [[nodiscard]] const std::string& subject() const noexcept { return subject_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }
    /// Simulation time index at which a run aborted, when applicable.
    [[nodiscard]] std::optional<long long> step() const noexcept { return step_; }

    [[nodiscard]] Diagnostic as_diagnostic() const;

private:
    std::string code_;
    std::string subject_;
    std::string message_;
    std::optional<long long> step_;
};

} // namespace mforge
