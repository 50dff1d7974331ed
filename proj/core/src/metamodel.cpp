#include "mforge/metamodel.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

namespace mforge {

namespace {

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table) {
    for (const auto& [value, name] : table)
        if (name == s) return value;
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view enum_name(E v, const std::array<std::pair<E, std::string_view>, N>& table) {
    for (const auto& [value, name] : table)
        if (value == v) return name;
    return "?";
}

constexpr std::array<std::pair<Layer, std::string_view>, 4> kLayerNames{{
    {Layer::Strategic, "Strategic"},
    {Layer::Operational, "Operational"},
    {Layer::Services, "Services"},
    {Layer::Resources, "Resources"},
}};

constexpr std::array<std::pair<BlockKind, std::string_view>, 6> kBlockKindNames{{
    {BlockKind::Capability, "Capability"},
    {BlockKind::OperationalActivity, "OperationalActivity"},
    {BlockKind::OperationalPerformer, "OperationalPerformer"},
    {BlockKind::ServiceSpecification, "ServiceSpecification"},
    {BlockKind::ServiceFunction, "ServiceFunction"},
    {BlockKind::System, "System"},
}};

constexpr std::array<std::pair<RelationKind, std::string_view>, 4> kRelationKindNames{{
    {RelationKind::Trace, "Trace"},
    {RelationKind::Inheritance, "Inheritance"},
    {RelationKind::Composition, "Composition"},
    {RelationKind::Connectivity, "Connectivity"},
}};

constexpr std::array<std::pair<Viewpoint, std::string_view>, 3> kViewpointNames{{
    {Viewpoint::Taxonomy, "Taxonomy"},
    {Viewpoint::Structure, "Structure"},
    {Viewpoint::Connectivity, "Connectivity"},
}};

constexpr std::array<std::pair<ModelKind, std::string_view>, 2> kModelKindNames{{
    {ModelKind::Reference, "Reference"},
    {ModelKind::Specific, "Specific"},
}};

constexpr std::array<std::pair<BindingKind, std::string_view>, 3> kBindingKindNames{{
    {BindingKind::Builtin, "Builtin"},
    {BindingKind::Exec, "Exec"},
    {BindingKind::Http, "Http"},
}};

constexpr std::array<std::pair<Role, std::string_view>, 4> kRoleNames{{
    {Role::Plant, "Plant"},
    {Role::Controller, "Controller"},
    {Role::Classifier, "Classifier"},
    {Role::Target, "Target"},
}};

std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

} // namespace

std::string_view to_string(Layer v) noexcept { return enum_name(v, kLayerNames); }
std::string_view to_string(BlockKind v) noexcept { return enum_name(v, kBlockKindNames); }
std::string_view to_string(RelationKind v) noexcept { return enum_name(v, kRelationKindNames); }
std::string_view to_string(Viewpoint v) noexcept { return enum_name(v, kViewpointNames); }
std::string_view to_string(ModelKind v) noexcept { return enum_name(v, kModelKindNames); }
std::string_view to_string(BindingKind v) noexcept { return enum_name(v, kBindingKindNames); }
std::string_view to_string(Role v) noexcept { return enum_name(v, kRoleNames); }

std::optional<Layer> parse_layer(std::string_view s) noexcept { return parse_enum(s, kLayerNames); }
std::optional<BlockKind> parse_block_kind(std::string_view s) noexcept { return parse_enum(s, kBlockKindNames); }
std::optional<RelationKind> parse_relation_kind(std::string_view s) noexcept {
    return parse_enum(s, kRelationKindNames);
}
std::optional<Viewpoint> parse_viewpoint(std::string_view s) noexcept { return parse_enum(s, kViewpointNames); }
std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept { return parse_enum(s, kModelKindNames); }
std::optional<BindingKind> parse_binding_kind(std::string_view s) noexcept {
    return parse_enum(s, kBindingKindNames);
}
std::optional<Role> parse_role(std::string_view s) noexcept { return parse_enum(s, kRoleNames); }

std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << '(' << format_number(v.x) << ',' << format_number(v.y) << ',' << format_number(v.z) << ')';
}

std::string scalar_to_string(const Scalar& s) {
    struct Visitor {
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(const std::string& v) const { return v; }
        std::string operator()(const Vec3& v) const {
            return '(' + format_number(v.x) + ',' + format_number(v.y) + ',' + format_number(v.z) + ')';
        }
    };
    return std::visit(Visitor{}, s);
}

const Block* Model::find_block(std::string_view block_id) const noexcept {
    for (const auto& b : blocks)
        if (b.id == block_id) return &b;
    return nullptr;
}

const BehaviorBinding* Model::find_binding(std::string_view block_id) const noexcept {
    for (const auto& b : behaviors)
        if (b.block_id == block_id) return &b;
    return nullptr;
}

const View* Model::find_view(std::string_view name) const noexcept {
    for (const auto& v : views)
        if (v.name == name) return &v;
    return nullptr;
}

std::vector<std::string> Model::out_edges(std::string_view source, RelationKind kind) const {
    std::vector<std::string> out;
    for (const auto& r : relations)
        if (r.kind == kind && r.source == source) out.push_back(r.target);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> Model::in_edges(std::string_view target, RelationKind kind) const {
    std::vector<std::string> out;
    for (const auto& r : relations)
        if (r.kind == kind && r.target == target) out.push_back(r.source);
    std::sort(out.begin(), out.end());
    return out;
}

void normalize(Model& m) {
    std::sort(m.blocks.begin(), m.blocks.end(), [](const Block& a, const Block& b) { return a.id < b.id; });
    std::sort(m.relations.begin(), m.relations.end());
    for (auto& v : m.views) std::sort(v.members.begin(), v.members.end());
    std::sort(m.views.begin(), m.views.end(), [](const View& a, const View& b) { return a.name < b.name; });
    std::sort(m.behaviors.begin(), m.behaviors.end(),
              [](const BehaviorBinding& a, const BehaviorBinding& b) { return a.block_id < b.block_id; });
}

bool structurally_equal(Model a, Model b) {
    normalize(a);
    normalize(b);
    return a == b;
}

Layer layer_of(BlockKind kind) noexcept {
    switch (kind) {
    case BlockKind::Capability: return Layer::Strategic;
    case BlockKind::OperationalActivity:
    case BlockKind::OperationalPerformer: return Layer::Operational;
    case BlockKind::ServiceSpecification:
    case BlockKind::ServiceFunction: return Layer::Services;
    case BlockKind::System: return Layer::Resources;
    }
    return Layer::Resources;
}

bool allowed_trace(BlockKind source_kind, BlockKind target_kind) noexcept {
    using K = BlockKind;
    switch (source_kind) {
    case K::OperationalActivity: return target_kind == K::Capability;
    case K::ServiceSpecification: return target_kind == K::OperationalActivity;
    case K::ServiceFunction: return target_kind == K::ServiceSpecification;
    case K::System: return target_kind == K::ServiceSpecification || target_kind == K::ServiceFunction;
    default: return false;
    }
}

std::string relation_label(const Relation& r) {
    return std::string(to_string(r.kind)) + "(" + r.source + "->" + r.target + ")";
}

Diagnostics check_relation(const Model& model, const Relation& rel) {
    Diagnostics out;
    const Block* src = model.find_block(rel.source);
    const Block* dst = model.find_block(rel.target);
    const std::string label = relation_label(rel);
    if (src == nullptr || dst == nullptr) {
        const std::string& missing = src == nullptr ? rel.source : rel.target;
        out.push_back(error(codes::kDanglingLink, label, "endpoint '" + missing + "' does not exist"));
        return out;
    }
    if (rel.source == rel.target) out.push_back(error(codes::kSelfLink, label, "edge joins a block to itself"));

    switch (rel.kind) {
    case RelationKind::Trace:
        if (!allowed_trace(src->kind, dst->kind))
            out.push_back(error(codes::kTraceKind, label,
                                std::string(to_string(src->kind)) + " cannot be derived from " +
                                    std::string(to_string(dst->kind))));
        break;
    case RelationKind::Inheritance:
        if (src->kind != BlockKind::System || dst->kind != BlockKind::System)
            out.push_back(error(codes::kInheritKind, label, "inheritance is only defined between System blocks"));
        break;
    case RelationKind::Connectivity:
        if (layer_of(src->kind) != layer_of(dst->kind))
            out.push_back(error(codes::kConnectLayer, label, "connectivity must stay within one layer"));
        break;
    case RelationKind::Composition:
        if (layer_of(src->kind) != layer_of(dst->kind))
            out.push_back(error(codes::kComposeLayer, label, "composition must stay within one layer"));
        break;
    }
    return out;
}

} // namespace mforge
