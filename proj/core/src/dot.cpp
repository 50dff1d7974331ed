#include "mforge/dot.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mforge {

namespace {

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string_view edge_style(RelationKind k) {
    switch (k) {
    case RelationKind::Trace: return "style=dashed, arrowhead=open";
    case RelationKind::Inheritance: return "arrowhead=empty";
    case RelationKind::Composition: return "dir=back, arrowtail=diamond";
    case RelationKind::Connectivity: return "arrowhead=normal";
    }
    return "";
}

std::vector<RelationKind> edge_kinds(Viewpoint vp) {
    switch (vp) {
    case Viewpoint::Taxonomy: return {RelationKind::Trace, RelationKind::Inheritance};
    case Viewpoint::Structure: return {RelationKind::Composition};
    case Viewpoint::Connectivity: return {RelationKind::Connectivity};
    }
    return {};
}

} // namespace

std::string export_view_dot(const Model& model, const View& view) {
    std::set<std::string> members(view.members.begin(), view.members.end());
    const auto kinds = edge_kinds(view.viewpoint);

    std::ostringstream os;
    os << "digraph " << quote(view.name) << " {\n";
    os << "  label=" << quote(std::string(to_string(view.layer)) + " " + std::string(to_string(view.viewpoint)))
       << ";\n";
    os << "  rankdir=BT;\n";
    os << "  node [shape=box];\n";
    for (const auto& id : members) {
        const Block* b = model.find_block(id);
        if (b == nullptr) continue;
        os << "  " << quote(b->id) << " [label="
           << quote((b->name.empty() ? b->id : b->name) + "\n<<" + std::string(to_string(b->kind)) + ">>");
        if (b->is_abstract) os << ", style=dashed";
        os << "];\n";
    }

    std::vector<Relation> edges;
    for (const auto& r : model.relations)
        if (members.count(r.source) && members.count(r.target) &&
            std::find(kinds.begin(), kinds.end(), r.kind) != kinds.end())
            edges.push_back(r);
    std::sort(edges.begin(), edges.end());
    for (const auto& r : edges)
        os << "  " << quote(r.source) << " -> " << quote(r.target) << " [label=" << quote(to_string(r.kind)) << ", "
           << edge_style(r.kind) << "];\n";
    os << "}\n";
    return os.str();
}

std::string export_all_dot(const Model& model) {
    std::vector<const View*> views;
    for (const auto& v : model.views) views.push_back(&v);
    std::sort(views.begin(), views.end(), [](const View* a, const View* b) { return a->name < b->name; });
    std::string out;
    for (const auto* v : views) out += export_view_dot(model, *v);
    return out;
}

} // namespace mforge
