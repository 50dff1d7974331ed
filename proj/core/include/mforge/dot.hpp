#pragma once

#include "mforge/metamodel.hpp"

#include <string>

namespace mforge {

/// DOT digraph for one view. Taxonomy views draw Inheritance and Trace edges,
/// Structure views Composition, Connectivity views Connectivity; only edges
/// with both ends in the view appear. Nodes and edges are sorted.
[[nodiscard]] std::string export_view_dot(const Model& model, const View& view);

/// All views, concatenated in name order.
[[nodiscard]] std::string export_all_dot(const Model& model);

} // namespace mforge
