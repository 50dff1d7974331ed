#pragma once

#include "mforge/diagnostic.hpp"
#include "mforge/vec3.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mforge {

// Ordered top to bottom; a Trace edge normally spans one step of this order.
enum class Layer { Strategic, Operational, Services, Resources };

enum class BlockKind {
    Capability,
    OperationalActivity,
    OperationalPerformer,
    ServiceSpecification,
    ServiceFunction,
    System,
};

enum class RelationKind { Trace, Inheritance, Composition, Connectivity };

enum class Viewpoint { Taxonomy, Structure, Connectivity };

enum class ModelKind { Reference, Specific };

enum class BindingKind { Builtin, Exec, Http };

enum class Role { Plant, Controller, Classifier, Target };

inline constexpr std::array kAllLayers{Layer::Strategic, Layer::Operational, Layer::Services,
                                       Layer::Resources};
inline constexpr std::array kAllBlockKinds{
    BlockKind::Capability,           BlockKind::OperationalActivity, BlockKind::OperationalPerformer,
    BlockKind::ServiceSpecification, BlockKind::ServiceFunction,     BlockKind::System};
inline constexpr std::array kAllRelationKinds{RelationKind::Trace, RelationKind::Inheritance,
                                              RelationKind::Composition, RelationKind::Connectivity};

std::string_view to_string(Layer v) noexcept;
std::string_view to_string(BlockKind v) noexcept;
std::string_view to_string(RelationKind v) noexcept;
std::string_view to_string(Viewpoint v) noexcept;
std::string_view to_string(ModelKind v) noexcept;
std::string_view to_string(BindingKind v) noexcept;
std::string_view to_string(Role v) noexcept;

// Exact, case-sensitive matches only; anything else is nullopt.
std::optional<Layer> parse_layer(std::string_view s) noexcept;
std::optional<BlockKind> parse_block_kind(std::string_view s) noexcept;
std::optional<RelationKind> parse_relation_kind(std::string_view s) noexcept;
std::optional<Viewpoint> parse_viewpoint(std::string_view s) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept;
std::optional<BindingKind> parse_binding_kind(std::string_view s) noexcept;
std::optional<Role> parse_role(std::string_view s) noexcept;

/// Integer | Real | Text | Vec3
using Scalar = std::variant<std::int64_t, double, std::string, Vec3>;
using ParamMap = std::map<std::string, Scalar>;

std::string scalar_to_string(const Scalar& s);

struct Block {
    std::string id;
    std::string name;
    BlockKind kind = BlockKind::System;
    bool is_abstract = false;
    ParamMap params;
    std::string doc;

    friend bool operator==(const Block&, const Block&) = default;
};

struct Relation {
    RelationKind kind = RelationKind::Trace;
    std::string source;
    std::string target;

    friend auto operator<=>(const Relation&, const Relation&) = default;
};

struct View {
    std::string name;
    Viewpoint viewpoint = Viewpoint::Taxonomy;
    Layer layer = Layer::Strategic;
    std::vector<std::string> members;

    friend bool operator==(const View&, const View&) = default;
};

struct BehaviorBinding {
    std::string block_id;
    BindingKind kind = BindingKind::Builtin;
    /// Builtin: kernel name. Exec: shell command line. Http: URL.
    std::string target;
    Role role = Role::Plant;

    friend bool operator==(const BehaviorBinding&, const BehaviorBinding&) = default;
};

struct Model {
    std::string id;
    ModelKind kind = ModelKind::Reference;
    std::optional<std::string> parent_ref;
    std::vector<Block> blocks;
    std::vector<Relation> relations;
    std::vector<View> views;
    std::vector<BehaviorBinding> behaviors;

    [[nodiscard]] const Block* find_block(std::string_view id) const noexcept;
    [[nodiscard]] const BehaviorBinding* find_binding(std::string_view block_id) const noexcept;
    [[nodiscard]] const View* find_view(std::string_view name) const noexcept;

    /// Targets of edges of `kind` leaving `source`, sorted.
    [[nodiscard]] std::vector<std::string> out_edges(std::string_view source, RelationKind kind) const;
    /// Sources of edges of `kind` arriving at `target`, sorted.
    [[nodiscard]] std::vector<std::string> in_edges(std::string_view target, RelationKind kind) const;

    friend bool operator==(const Model&, const Model&) = default;
};

/// Sort blocks by id, relations by (kind, source, target), views by name,
/// view members, behaviors by block id. Canonical form used for saving and
/// structural comparison.
void normalize(Model& m);
[[nodiscard]] bool structurally_equal(Model a, Model b);

[[nodiscard]] Layer layer_of(BlockKind kind) noexcept;

/// Trace direction: derived (lower) block first, source (upper) block second.
[[nodiscard]] bool allowed_trace(BlockKind source_kind, BlockKind target_kind) noexcept;

/// Legality of a single edge against the kind rules. Unresolved endpoints are
/// reported as E-DANGLING-LINK.
[[nodiscard]] Diagnostics check_relation(const Model& model, const Relation& rel);

std::string relation_label(const Relation& r);

} // namespace mforge
