#pragma once

#include "mforge/diagnostic.hpp"
#include "mforge/metamodel.hpp"

#include <string_view>
#include <vector>

namespace mforge {

/// Reference-model rules:
///   R1 every block except Capability/OperationalPerformer has an outgoing Trace
///   R2 Trace edges respect allowed_trace
///   R3 Trace and Inheritance graphs are acyclic
///   R4 Inheritance joins System blocks only
///   R5 abstract blocks carry no behavior
///   R6 concrete System blocks carry behavior (warning)
///   R7 every block is shown in a view of its layer (warning)
/// Connectivity/Composition layer rules from check_relation are reported too.
/// Output is sorted, so it does not depend on the input list order.
[[nodiscard]] Diagnostics validate_reference(const Model& model);

/// Specific-model rules against its reference:
///   S1 every block links via param "ref" to a reference block of the same kind
///   S2 each served service has exactly one concrete provider present
///   S3 no abstract blocks
///   S4 every declared "param:<name>" of the referenced block has a value
[[nodiscard]] Diagnostics validate_specific(const Model& specific, const Model& reference);

struct TraceChain {
    std::vector<Block> blocks;
    /// False when the walk stopped before reaching a Capability.
    bool complete = false;
};

/// Walks Trace edges upward, taking the smallest target id at each fork.
/// Throws Failure(E-UNKNOWN-BLOCK) for an unknown id.
[[nodiscard]] TraceChain trace_chain(const Model& model, std::string_view block_id);

} // namespace mforge
