#include "mforge/derivation.hpp"

#include "mforge/validation.hpp"

#include "json_scalar.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace mforge {

namespace {

bool is_service(BlockKind k) { return k == BlockKind::ServiceSpecification || k == BlockKind::ServiceFunction; }

std::vector<std::string> inheritance_ancestors(const Model& model, std::string_view id) {
    std::set<std::string> seen;
    std::vector<std::string> frontier = model.out_edges(id, RelationKind::Inheritance);
    while (!frontier.empty()) {
        auto cur = frontier.back();
        frontier.pop_back();
        if (!seen.insert(cur).second) continue;
        for (auto& p : model.out_edges(cur, RelationKind::Inheritance)) frontier.push_back(std::move(p));
    }
    return {seen.begin(), seen.end()};
}

void merge_effective(const Model& model, const std::string& id, std::set<std::string>& stack, ParamMap& out) {
    if (!stack.insert(id).second) return;  // cycles are reported by validation
    for (const auto& parent : model.out_edges(id, RelationKind::Inheritance)) merge_effective(model, parent, stack, out);
    if (const Block* b = model.find_block(id))
        for (const auto& [k, v] : b->params) out.insert_or_assign(k, v);
    stack.erase(id);
}

} // namespace

std::string_view to_string(Resolution r) noexcept {
    switch (r) {
    case Resolution::Resolved: return "resolved";
    case Resolution::Missing: return "missing";
    case Resolution::Ambiguous: return "ambiguous";
    }
    return "?";
}

Selection parse_selection(std::string_view json_text) {
    const auto doc = detail::parse_strict_json(json_text);
    if (!doc.is_object()) throw Failure(codes::kParse, "selection", "expected an object");
    Selection sel;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (it.key() == "select") {
            if (!it->is_object()) throw Failure(codes::kParse, "select", "expected an object");
            for (auto s = it->begin(); s != it->end(); ++s) {
                if (!s->is_string()) throw Failure(codes::kParse, s.key(), "chosen System id must be a string");
                sel.choices.emplace(s.key(), s->get<std::string>());
            }
        } else if (it.key() == "params") {
            if (!it->is_object()) throw Failure(codes::kParse, "params", "expected an object");
            for (auto p = it->begin(); p != it->end(); ++p) {
                const auto& key = p.key();
                const auto dot = key.find('.');
                if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
                    throw Failure(codes::kParse, key, "override keys have the form <block>.<param>");
                std::string param = key.substr(dot + 1);
                if (param == kRefParam || param.starts_with(kParamDeclPrefix))
                    throw Failure(codes::kParse, key, "reserved parameter cannot be overridden");
                sel.overrides.emplace(std::pair{key.substr(0, dot), std::move(param)},
                                      detail::scalar_from_json(p.value(), key));
            }
        } else {
            throw Failure(codes::kParse, "selection", "unknown key '" + it.key() + "'");
        }
    }
    return sel;
}

std::vector<std::string> inheritance_descendants(const Model& model, std::string_view root) {
    std::set<std::string> seen;
    std::vector<std::string> frontier = model.in_edges(root, RelationKind::Inheritance);
    while (!frontier.empty()) {
        auto cur = frontier.back();
        frontier.pop_back();
        if (cur == root || !seen.insert(cur).second) continue;
        for (auto& c : model.in_edges(cur, RelationKind::Inheritance)) frontier.push_back(std::move(c));
    }
    return {seen.begin(), seen.end()};
}

std::vector<AlternativeGroup> alternative_groups(const Model& reference) {
    std::vector<AlternativeGroup> groups;
    for (const auto& b : reference.blocks) {
        if (b.kind != BlockKind::System) continue;
        const auto ancestors = inheritance_ancestors(reference, b.id);
        for (const auto& service : reference.out_edges(b.id, RelationKind::Trace)) {
            const Block* sb = reference.find_block(service);
            if (sb == nullptr || !is_service(sb->kind)) continue;
            const bool covered_above = std::any_of(ancestors.begin(), ancestors.end(), [&](const std::string& a) {
                const auto up = reference.out_edges(a, RelationKind::Trace);
                return std::binary_search(up.begin(), up.end(), service);
            });
            if (covered_above) continue;

            AlternativeGroup g{service, b.id, {}};
            if (!b.is_abstract) g.leaves.push_back(b.id);
            for (const auto& d : inheritance_descendants(reference, b.id)) {
                const Block* db = reference.find_block(d);
                if (db != nullptr && db->kind == BlockKind::System && !db->is_abstract) g.leaves.push_back(d);
            }
            std::sort(g.leaves.begin(), g.leaves.end());
            groups.push_back(std::move(g));
        }
    }
    std::sort(groups.begin(), groups.end(), [](const AlternativeGroup& a, const AlternativeGroup& b) {
        return std::tie(a.service_id, a.root_id) < std::tie(b.service_id, b.root_id);
    });
    return groups;
}

std::map<std::string, std::vector<std::string>> service_candidates(const Model& reference) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& g : alternative_groups(reference)) {
        auto& v = out[g.service_id];
        v.insert(v.end(), g.leaves.begin(), g.leaves.end());
    }
    for (auto& [_, v] : out) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return out;
}

ParamMap effective_params(const Model& reference, std::string_view block_id) {
    ParamMap out;
    std::set<std::string> stack;
    merge_effective(reference, std::string(block_id), stack, out);
    return out;
}

Model derive_specific(const Model& reference, const Selection& sel, std::string_view model_id) {
    if (model_id.empty()) throw Failure(codes::kParse, "", "specific model id must be nonempty");
    {
        const auto ds = validate_reference(reference);
        for (const auto& d : ds)
            if (d.severity == Severity::Error) throw Failure(d.code, d.subject, "reference is not clean: " + d.message);
    }

    const auto candidates = service_candidates(reference);
    for (const auto& [service, _] : sel.choices)
        if (!candidates.count(service))
            throw Failure(codes::kSelectionForeign, service, "no alternative group serves this id");

    std::set<std::string> chosen;
    for (const auto& [service, leaves] : candidates) {
        auto it = sel.choices.find(service);
        if (it == sel.choices.end()) {
            if (leaves.size() != 1)
                throw Failure(codes::kSelectionMissing, service,
                              leaves.empty() ? "no concrete provider exists"
                                             : std::to_string(leaves.size()) + " alternatives and no choice");
            chosen.insert(leaves.front());
            continue;
        }
        const Block* b = reference.find_block(it->second);
        if (b != nullptr && b->is_abstract)
            throw Failure(codes::kSelectionAbstract, service, "'" + it->second + "' is abstract");
        if (!std::binary_search(leaves.begin(), leaves.end(), it->second))
            throw Failure(codes::kSelectionForeign, service, "'" + it->second + "' is not an alternative here");
        chosen.insert(it->second);
    }

    for (const auto& [key, _] : sel.overrides)
        if (!chosen.count(key.first))
            throw Failure(codes::kUnknownBlock, key.first + "." + key.second,
                          "override targets a block that is not selected");

    Model out;
    out.id = std::string(model_id);
    out.kind = ModelKind::Specific;
    out.parent_ref = reference.id;

    for (const auto& id : chosen) {
        const Block* rb = reference.find_block(id);
        Block b;
        b.id = rb->id;
        b.name = rb->name;
        b.kind = rb->kind;
        b.doc = rb->doc;
        b.params = effective_params(reference, id);
        for (const auto& [key, value] : sel.overrides)
            if (key.first == id) b.params.insert_or_assign(key.second, value);
        b.params.insert_or_assign(std::string(kRefParam), Scalar{rb->id});

        for (const auto& [key, _] : b.params) {
            if (!key.starts_with(kParamDeclPrefix)) continue;
            const std::string name = key.substr(kParamDeclPrefix.size());
            if (!b.params.count(name))
                throw Failure(codes::kParamMissing, id, "parameter '" + name + "' has no default and no override");
        }
        out.blocks.push_back(std::move(b));

        if (const BehaviorBinding* binding = reference.find_binding(id)) out.behaviors.push_back(*binding);
    }

    for (const auto& r : reference.relations)
        if (r.kind == RelationKind::Connectivity && chosen.count(r.source) && chosen.count(r.target))
            out.relations.push_back(r);

    out.views.push_back(View{"configuration", Viewpoint::Structure, Layer::Resources, {chosen.begin(), chosen.end()}});
    normalize(out);

    for (const auto& d : validate_specific(out, reference))
        if (d.severity == Severity::Error) throw Failure(d.code, d.subject, d.message);
    return out;
}

CoverageReport completeness(const Model& specific, const Model& reference) {
    CoverageReport report;
    for (const auto& [service, leaves] : service_candidates(reference)) {
        CoverageEntry entry{service, Resolution::Missing, {}};
        for (const auto& b : specific.blocks) {
            if (b.is_abstract) continue;
            auto it = b.params.find(std::string(kRefParam));
            const auto* ref = it == b.params.end() ? nullptr : std::get_if<std::string>(&it->second);
            if (ref && std::binary_search(leaves.begin(), leaves.end(), *ref)) entry.present.push_back(b.id);
        }
        std::sort(entry.present.begin(), entry.present.end());
        entry.status = entry.present.empty()      ? Resolution::Missing
                       : entry.present.size() == 1 ? Resolution::Resolved
                                                   : Resolution::Ambiguous;
        if (entry.status != Resolution::Resolved) report.complete = false;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

} // namespace mforge
