#include "mforge/validation.hpp"

#include "mforge/behavior.hpp"
#include "mforge/derivation.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace mforge {

namespace {

// Tarjan SCC over the edges of one relation kind; one diagnostic per cycle,
// reported against the smallest block id on it.
void find_cycles(const Model& model, RelationKind kind, Diagnostics& out) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& r : model.relations)
        if (r.kind == kind) adj[r.source].push_back(r.target);
    for (auto& [_, v] : adj) std::sort(v.begin(), v.end());

    std::map<std::string, int> index;
    std::map<std::string, int> low;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    int counter = 0;

    std::function<void(const std::string&)> visit = [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        if (auto it = adj.find(v); it != adj.end()) {
            for (const auto& w : it->second) {
                if (!index.count(w)) {
                    visit(w);
                    low[v] = std::min(low[v], low[w]);
                } else if (on_stack.count(w)) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::string> component;
            std::string w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                component.push_back(w);
            } while (w != v);
            if (component.size() > 1) {
                std::sort(component.begin(), component.end());
                std::string members;
                for (const auto& c : component) members += (members.empty() ? "" : ", ") + c;
                out.push_back(error(codes::kCycle, component.front(),
                                    std::string(to_string(kind)) + " cycle through " + members));
            }
        }
    };

    for (const auto& b : model.blocks)
        if (!index.count(b.id)) visit(b.id);
}

const std::string* text_param(const Block& b, std::string_view key) {
    auto it = b.params.find(std::string(key));
    if (it == b.params.end()) return nullptr;
    return std::get_if<std::string>(&it->second);
}

} // namespace

Diagnostics validate_reference(const Model& model) {
    Diagnostics out;
    if (model.kind != ModelKind::Reference)
        out.push_back(error(codes::kModelKind, model.id, "expected a reference model"));

    // R2, R4 and the layer rules for the remaining edge kinds.
    for (const auto& r : model.relations) {
        auto ds = check_relation(model, r);
        out.insert(out.end(), ds.begin(), ds.end());
    }

    for (const auto& b : model.blocks) {
        // R1
        if (b.kind != BlockKind::Capability && b.kind != BlockKind::OperationalPerformer &&
            model.out_edges(b.id, RelationKind::Trace).empty())
            out.push_back(error(codes::kTraceMissing, b.id,
                                std::string(to_string(b.kind)) + " is not derived from any upper-layer block"));

        // R6
        if (b.kind == BlockKind::System && !b.is_abstract && model.find_binding(b.id) == nullptr)
            out.push_back(warning(codes::kNoBehavior, b.id, "concrete System has no behavior binding"));

        // R7
        const bool presented = std::any_of(model.views.begin(), model.views.end(), [&](const View& v) {
            return v.layer == layer_of(b.kind) &&
                   std::find(v.members.begin(), v.members.end(), b.id) != v.members.end();
        });
        if (!presented)
            out.push_back(warning(codes::kUnpresented, b.id,
                                  "block does not appear in any " + std::string(to_string(layer_of(b.kind))) +
                                      " view"));
    }

    // R3
    find_cycles(model, RelationKind::Trace, out);
    find_cycles(model, RelationKind::Inheritance, out);

    // R5
    for (const auto& binding : model.behaviors) {
        const Block* b = model.find_block(binding.block_id);
        if (b == nullptr) {
            out.push_back(error(codes::kUnknownBlock, binding.block_id, "behavior bound to a missing block"));
            continue;
        }
        if (b->kind != BlockKind::System)
            out.push_back(error(codes::kNotSystem, b->id, "behavior bound to a non-System block"));
        else if (b->is_abstract)
            out.push_back(error(codes::kAbstractBehavior, b->id, "abstract System carries a behavior binding"));
    }

    sort_diagnostics(out);
    return out;
}

Diagnostics validate_specific(const Model& specific, const Model& reference) {
    Diagnostics out;
    if (specific.kind != ModelKind::Specific)
        out.push_back(error(codes::kModelKind, specific.id, "expected a specific model"));
    if (specific.parent_ref.value_or("") != reference.id)
        out.push_back(error(codes::kParentMismatch, specific.id,
                            "parent_ref '" + specific.parent_ref.value_or("") + "' does not name reference '" +
                                reference.id + "'"));

    // block id -> linked reference block (only when S1 holds)
    std::map<std::string, const Block*> linked;
    for (const auto& b : specific.blocks) {
        // S1
        const std::string* ref = text_param(b, kRefParam);
        const Block* rb = ref ? reference.find_block(*ref) : nullptr;
        if (ref == nullptr)
            out.push_back(error(codes::kDanglingRef, b.id, "block carries no textual 'ref' link"));
        else if (rb == nullptr)
            out.push_back(error(codes::kDanglingRef, b.id, "'ref' names unknown reference block '" + *ref + "'"));
        else if (rb->kind != b.kind)
            out.push_back(error(codes::kDanglingRef, b.id,
                                "'ref' target '" + *ref + "' is a " + std::string(to_string(rb->kind))));
        else
            linked.emplace(b.id, rb);

        // S3
        if (b.is_abstract)
            out.push_back(error(codes::kAbstractInSpecific, b.id, "abstract block in a specific model"));
    }

    // S2
    for (const auto& [service, candidates] : service_candidates(reference)) {
        std::vector<std::string> present;
        for (const auto& [id, rb] : linked) {
            const Block* sb = specific.find_block(id);
            if (!sb->is_abstract && std::binary_search(candidates.begin(), candidates.end(), rb->id))
                present.push_back(id);
        }
        if (present.empty()) {
            out.push_back(error(codes::kSelectionMissing, service, "no concrete provider present"));
        } else if (present.size() > 1) {
            std::string list;
            for (const auto& p : present) list += (list.empty() ? "" : ", ") + p;
            out.push_back(error(codes::kSelectionAmbiguous, service, "several providers present: " + list));
        }
    }

    // S4
    for (const auto& [id, rb] : linked) {
        const Block* sb = specific.find_block(id);
        for (const auto& [key, decl_value] : effective_params(reference, rb->id)) {
            if (!key.starts_with(kParamDeclPrefix)) continue;
            const std::string name = key.substr(kParamDeclPrefix.size());
            auto it = sb->params.find(name);
            if (it == sb->params.end()) {
                out.push_back(error(codes::kParamMissing, id, "required parameter '" + name + "' has no value"));
                continue;
            }
            const auto* decl_text = std::get_if<std::string>(&decl_value);
            const auto decl = decl_text ? parse_param_decl(*decl_text) : std::nullopt;
            if (!decl)
                out.push_back(error(codes::kParamType, id, "malformed declaration for '" + name + "'"));
            else if (!accepts(decl->type, it->second))
                out.push_back(error(codes::kParamType, id,
                                    "parameter '" + name + "' is not of type " + std::string(to_string(decl->type))));
        }
    }

    sort_diagnostics(out);
    return out;
}

TraceChain trace_chain(const Model& model, std::string_view block_id) {
    const Block* cur = model.find_block(block_id);
    if (cur == nullptr) throw Failure(codes::kUnknownBlock, std::string(block_id), "no such block");

    TraceChain chain;
    std::set<std::string> visited;
    while (true) {
        chain.blocks.push_back(*cur);
        visited.insert(cur->id);
        if (cur->kind == BlockKind::Capability) {
            chain.complete = true;
            break;
        }
        const auto targets = model.out_edges(cur->id, RelationKind::Trace);
        if (targets.empty() || visited.count(targets.front())) break;
        const Block* next = model.find_block(targets.front());
        if (next == nullptr) break;
        cur = next;
    }
    return chain;
}

} // namespace mforge
