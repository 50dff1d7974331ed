#include "mforge/store.hpp"

#include "json_scalar.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace mforge {

using nlohmann::json;
using detail::parse_strict_json;
using detail::scalar_from_json;
using detail::scalar_to_json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Failure(codes::kParse, where, what);
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) parse_fail(where, "expected an object");
}

void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional = {}) {
    require_object(j, where);
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& key = it.key();
        const auto known = [&](std::initializer_list<std::string_view> keys) {
            for (auto k : keys)
                if (k == key) return true;
            return false;
        };
        if (!known(required) && !known(optional)) parse_fail(where, "unknown key '" + key + "'");
    }
    for (auto k : required)
        if (!j.contains(k)) parse_fail(where, "missing key '" + std::string(k) + "'");
}

std::string get_string(const json& j, std::string_view key, const std::string& where) {
    const auto& v = j.at(std::string(key));
    if (!v.is_string()) parse_fail(where, "'" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

std::string get_id(const json& j, std::string_view key, const std::string& where) {
    auto s = get_string(j, key, where);
    if (s.empty()) parse_fail(where, "'" + std::string(key) + "' must be nonempty");
    return s;
}

const json& get_array(const json& j, std::string_view key, const std::string& where) {
    const auto& v = j.at(std::string(key));
    if (!v.is_array()) parse_fail(where, "'" + std::string(key) + "' must be an array");
    return v;
}

template <typename E, typename F>
E get_enum(const json& j, std::string_view key, const std::string& where, F parse) {
    const auto s = get_string(j, key, where);
    auto v = parse(s);
    if (!v) throw Failure(codes::kKind, where, "unknown " + std::string(key) + " '" + s + "'");
    return *v;
}

Block block_from_json(const json& j, std::size_t index) {
    const std::string where = "blocks[" + std::to_string(index) + "]";
    check_keys(j, where, {"id", "name", "kind", "abstract", "params"}, {"doc"});
    Block b;
    b.id = get_id(j, "id", where);
    const std::string here = "block '" + b.id + "'";
    b.name = get_string(j, "name", here);
    b.kind = get_enum<BlockKind>(j, "kind", b.id, parse_block_kind);
    const auto& abs = j.at("abstract");
    if (!abs.is_boolean()) parse_fail(here, "'abstract' must be a boolean");
    b.is_abstract = abs.get<bool>();
    const auto& params = j.at("params");
    require_object(params, here + " params");
    for (auto it = params.begin(); it != params.end(); ++it)
        b.params.emplace(it.key(), scalar_from_json(it.value(), here + " param '" + it.key() + "'"));
    if (j.contains("doc")) b.doc = get_string(j, "doc", here);
    return b;
}

Relation relation_from_json(const json& j, std::size_t index) {
    const std::string where = "relations[" + std::to_string(index) + "]";
    check_keys(j, where, {"kind", "source", "target"});
    Relation r;
    r.kind = get_enum<RelationKind>(j, "kind", where, parse_relation_kind);
    r.source = get_id(j, "source", where);
    r.target = get_id(j, "target", where);
    return r;
}

View view_from_json(const json& j, std::size_t index) {
    const std::string where = "views[" + std::to_string(index) + "]";
    check_keys(j, where, {"name", "viewpoint", "layer", "members"});
    View v;
    v.name = get_id(j, "name", where);
    v.viewpoint = get_enum<Viewpoint>(j, "viewpoint", v.name, parse_viewpoint);
    v.layer = get_enum<Layer>(j, "layer", v.name, parse_layer);
    for (const auto& m : get_array(j, "members", where)) {
        if (!m.is_string()) parse_fail(v.name, "view members must be block ids");
        v.members.push_back(m.get<std::string>());
    }
    return v;
}

BehaviorBinding binding_from_json(const json& j, std::size_t index) {
    const std::string where = "behaviors[" + std::to_string(index) + "]";
    check_keys(j, where, {"block", "kind", "target", "role"});
    BehaviorBinding b;
    b.block_id = get_id(j, "block", where);
    b.kind = get_enum<BindingKind>(j, "kind", b.block_id, parse_binding_kind);
    b.target = get_string(j, "target", b.block_id);
    b.role = get_enum<Role>(j, "role", b.block_id, parse_role);
    return b;
}

} // namespace

void check_model_invariants(const Model& model) {
    if (model.id.empty()) throw Failure(codes::kParse, "", "model id must be nonempty");
    if ((model.kind == ModelKind::Specific) != model.parent_ref.has_value())
        throw Failure(codes::kModelKind, model.id,
                      model.kind == ModelKind::Specific ? "specific model requires parent_ref"
                                                        : "reference model must not have parent_ref");
    if (model.parent_ref && model.parent_ref->empty())
        throw Failure(codes::kParse, model.id, "parent_ref must be nonempty");

    std::set<std::string_view> ids;
    for (const auto& b : model.blocks) {
        if (b.id.empty()) throw Failure(codes::kParse, "", "block id must be nonempty");
        if (!ids.insert(b.id).second) throw Failure(codes::kDupId, b.id, "duplicate block id");
        if (b.is_abstract && b.kind != BlockKind::System)
            throw Failure(codes::kKind, b.id, "only System blocks may be abstract");
    }

    std::set<Relation> seen;
    for (const auto& r : model.relations) {
        const std::string label = relation_label(r);
        if (!ids.count(r.source) || !ids.count(r.target)) {
            const std::string& missing = ids.count(r.source) ? r.target : r.source;
            throw Failure(codes::kDanglingLink, label, "endpoint '" + missing + "' does not exist");
        }
        if (r.source == r.target) throw Failure(codes::kSelfLink, label, "edge joins a block to itself");
        if (!seen.insert(r).second) throw Failure(codes::kDupRelation, label, "duplicate relation");
    }

    std::set<std::string_view> view_names;
    for (const auto& v : model.views) {
        if (!view_names.insert(v.name).second) throw Failure(codes::kDupId, v.name, "duplicate view name");
        std::set<std::string_view> members;
        for (const auto& m : v.members) {
            const Block* b = model.find_block(m);
            if (b == nullptr) throw Failure(codes::kDanglingLink, v.name, "view member '" + m + "' does not exist");
            if (layer_of(b->kind) != v.layer)
                throw Failure(codes::kViewLayer, v.name,
                              "member '" + m + "' is not on layer " + std::string(to_string(v.layer)));
            if (!members.insert(m).second) throw Failure(codes::kDupId, v.name, "view lists '" + m + "' twice");
        }
    }

    std::set<std::string_view> bound;
    for (const auto& b : model.behaviors) {
        if (!ids.count(b.block_id))
            throw Failure(codes::kDanglingLink, b.block_id, "behavior bound to a missing block");
        if (!bound.insert(b.block_id).second)
            throw Failure(codes::kDupId, b.block_id, "block has more than one behavior binding");
    }
}

Model parse_model(std::string_view text) {
    const json doc = parse_strict_json(text);
    check_keys(doc, "document", {"format_version", "model"});
    const auto& version = doc.at("format_version");
    if (!version.is_number_integer() || version.get<std::int64_t>() != kFormatVersion)
        parse_fail("document", "unsupported format_version");

    const json& jm = doc.at("model");
    check_keys(jm, "model", {"id", "kind", "blocks", "relations", "views", "behaviors"}, {"parent_ref"});
    Model m;
    m.id = get_id(jm, "id", "model");
    m.kind = get_enum<ModelKind>(jm, "kind", m.id, parse_model_kind);
    if (jm.contains("parent_ref")) m.parent_ref = get_string(jm, "parent_ref", m.id);

    const auto& blocks = get_array(jm, "blocks", m.id);
    for (std::size_t i = 0; i < blocks.size(); ++i) m.blocks.push_back(block_from_json(blocks[i], i));
    const auto& relations = get_array(jm, "relations", m.id);
    for (std::size_t i = 0; i < relations.size(); ++i) m.relations.push_back(relation_from_json(relations[i], i));
    const auto& views = get_array(jm, "views", m.id);
    for (std::size_t i = 0; i < views.size(); ++i) m.views.push_back(view_from_json(views[i], i));
    const auto& behaviors = get_array(jm, "behaviors", m.id);
    for (std::size_t i = 0; i < behaviors.size(); ++i) m.behaviors.push_back(binding_from_json(behaviors[i], i));

    check_model_invariants(m);
    normalize(m);
    return m;
}

std::string render_model(const Model& model) {
    check_model_invariants(model);
    Model m = model;
    normalize(m);

    json jm = json::object();
    jm["id"] = m.id;
    jm["kind"] = std::string(to_string(m.kind));
    if (m.parent_ref) jm["parent_ref"] = *m.parent_ref;

    json blocks = json::array();
    for (const auto& b : m.blocks) {
        json jb = json::object();
        jb["id"] = b.id;
        jb["name"] = b.name;
        jb["kind"] = std::string(to_string(b.kind));
        jb["abstract"] = b.is_abstract;
        json params = json::object();
        for (const auto& [k, v] : b.params) params[k] = scalar_to_json(v, b.id + "." + k);
        jb["params"] = std::move(params);
        if (!b.doc.empty()) jb["doc"] = b.doc;
        blocks.push_back(std::move(jb));
    }
    jm["blocks"] = std::move(blocks);

    json relations = json::array();
    for (const auto& r : m.relations)
        relations.push_back({{"kind", std::string(to_string(r.kind))}, {"source", r.source}, {"target", r.target}});
    jm["relations"] = std::move(relations);

    json views = json::array();
    for (const auto& v : m.views)
        views.push_back({{"name", v.name},
                         {"viewpoint", std::string(to_string(v.viewpoint))},
                         {"layer", std::string(to_string(v.layer))},
                         {"members", v.members}});
    jm["views"] = std::move(views);

    json behaviors = json::array();
    for (const auto& b : m.behaviors)
        behaviors.push_back({{"block", b.block_id},
                             {"kind", std::string(to_string(b.kind))},
                             {"target", b.target},
                             {"role", std::string(to_string(b.role))}});
    jm["behaviors"] = std::move(behaviors);

    json doc = json::object();
    doc["format_version"] = kFormatVersion;
    doc["model"] = std::move(jm);
    try {
        return doc.dump(2, ' ', false, json::error_handler_t::strict) + "\n";
    } catch (const json::exception& e) {
        throw Failure(codes::kParse, m.id, std::string("cannot encode model: ") + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure(codes::kIo, path.string(), "cannot open file for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Failure(codes::kIo, path.string(), "read error");
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure(codes::kIo, path.string(), "cannot open file for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Failure(codes::kIo, path.string(), "write error");
}

Model load_model(const std::filesystem::path& path) { return parse_model(read_text_file(path)); }

void save_model(const Model& model, const std::filesystem::path& path) {
    write_text_file(path, render_model(model));
}

} // namespace mforge
