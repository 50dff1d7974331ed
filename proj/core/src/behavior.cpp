#include "mforge/behavior.hpp"

#include "mforge/derivation.hpp"
#include "mforge/hooks.hpp"
#include "mforge/validation.hpp"

#include "json_scalar.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace mforge {

namespace {

struct KernelParam {
    std::string_view name;
    ParamType type;
};

// Parameters each role reads from the resolved value set.
std::vector<KernelParam> role_params(Role role) {
    switch (role) {
    case Role::Plant:
        return {{"t0", ParamType::Integer},     {"t_n", ParamType::Integer},   {"dt", ParamType::Real},
                {"p_desired0", ParamType::Vec3}, {"v_desired", ParamType::Vec3}, {"v_passive", ParamType::Vec3}};
    case Role::Controller: return {{"t_i", ParamType::Integer}, {"dN", ParamType::Real}};
    case Role::Classifier: return {{"h", ParamType::Real}, {"N0", ParamType::Real}};
    case Role::Target: return {};
    }
    return {};
}

// "s_<j>" -> j
std::optional<std::int64_t> signal_index(std::string_view name) {
    if (!name.starts_with("s_") || name.size() < 3) return std::nullopt;
    std::int64_t j = 0;
    const auto* first = name.data() + 2;
    const auto* last = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(first, last, j);
    if (ec != std::errc{} || ptr != last || j < 0) return std::nullopt;
    if (std::to_string(j) != name.substr(2)) return std::nullopt;  // no leading zeros
    return j;
}

const Scalar& value_of(const ParamValues& v, std::string_view name) {
    auto it = v.find(name);
    if (it == v.end()) throw Failure(codes::kParamMissing, std::string(name), "parameter has no value");
    return it->second;
}

std::int64_t int_of(const ParamValues& v, std::string_view name) {
    const auto* i = std::get_if<std::int64_t>(&value_of(v, name));
    if (i == nullptr) throw Failure(codes::kParamType, std::string(name), "expected an integer");
    return *i;
}

double real_of(const ParamValues& v, std::string_view name) {
    const auto& s = value_of(v, name);
    if (const auto* d = std::get_if<double>(&s)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&s)) return static_cast<double>(*i);
    throw Failure(codes::kParamType, std::string(name), "expected a real number");
}

Vec3 vec_of(const ParamValues& v, std::string_view name) {
    const auto* x = std::get_if<Vec3>(&value_of(v, name));
    if (x == nullptr) throw Failure(codes::kParamType, std::string(name), "expected [x, y, z]");
    return *x;
}

// Forwards steps immediately but holds the report until the hook has shut
// down cleanly.
class DeferredReportSink final : public sim::EventSink {
public:
    explicit DeferredReportSink(sim::EventSink* inner) : inner_(inner) {}
    void on_step(const sim::StepRecord& r) override {
        if (inner_ != nullptr) inner_->on_step(r);
    }
    void on_report(const sim::ScoreReport&) override {}
    void release(const sim::ScoreReport& r) {
        if (inner_ != nullptr) inner_->on_report(r);
    }

private:
    sim::EventSink* inner_;
};

} // namespace

const std::map<std::string, Role, std::less<>>& builtin_kernels() {
    static const std::map<std::string, Role, std::less<>> kernels{
        {std::string(kernels::kAuvKinematics), Role::Plant},
        {std::string(kernels::kDeadbeatMcu), Role::Controller},
        {std::string(kernels::kThresholdTcu), Role::Classifier},
        {std::string(kernels::kStaticTargets), Role::Target},
    };
    return kernels;
}

AttachResult attach_behavior(Model model, BehaviorBinding binding) {
    const Block* b = model.find_block(binding.block_id);
    if (b == nullptr) throw Failure(codes::kUnknownBlock, binding.block_id, "no such block");
    if (b->kind != BlockKind::System)
        throw Failure(codes::kNotSystem, b->id, std::string(to_string(b->kind)) + " blocks cannot carry behavior");
    if (b->is_abstract) throw Failure(codes::kAbstractBehavior, b->id, "abstract System blocks cannot carry behavior");

    AttachResult result;
    auto it = std::find_if(model.behaviors.begin(), model.behaviors.end(),
                           [&](const BehaviorBinding& x) { return x.block_id == binding.block_id; });
    if (it != model.behaviors.end()) {
        result.warnings.push_back(
            warning(codes::kRebind, binding.block_id, "replaced " + std::string(to_string(it->kind)) + " binding '" +
                                                          it->target + "'"));
        *it = std::move(binding);
    } else {
        model.behaviors.push_back(std::move(binding));
    }
    normalize(model);
    result.model = std::move(model);
    return result;
}

std::string_view to_string(ParamType t) noexcept {
    switch (t) {
    case ParamType::Integer: return "integer";
    case ParamType::Real: return "real";
    case ParamType::Vec3: return "vec3";
    case ParamType::Text: return "text";
    }
    return "?";
}

std::optional<ParamDecl> parse_param_decl(std::string_view text) {
    ParamDecl decl;
    std::string_view type = text;
    if (const auto comma = text.find(','); comma != std::string_view::npos) {
        if (text.substr(comma + 1) != "tunable") return std::nullopt;
        decl.tunable = true;
        type = text.substr(0, comma);
    }
    if (type == "integer") decl.type = ParamType::Integer;
    else if (type == "real") decl.type = ParamType::Real;
    else if (type == "vec3") decl.type = ParamType::Vec3;
    else if (type == "text") decl.type = ParamType::Text;
    else return std::nullopt;
    return decl;
}

bool accepts(ParamType type, const Scalar& value) noexcept {
    switch (type) {
    case ParamType::Integer: return std::holds_alternative<std::int64_t>(value);
    case ParamType::Real: return std::holds_alternative<double>(value) || std::holds_alternative<std::int64_t>(value);
    case ParamType::Vec3: return std::holds_alternative<Vec3>(value);
    case ParamType::Text: return std::holds_alternative<std::string>(value);
    }
    return false;
}

const ParamSpec* ExecutableArtifact::find_param(std::string_view name) const noexcept {
    for (const auto& p : param_schema)
        if (p.name == name) return &p;
    return nullptr;
}

const ArtifactMember* ExecutableArtifact::member_with_role(Role role) const noexcept {
    for (const auto& m : members)
        if (m.binding.role == role) return &m;
    return nullptr;
}

ExecutableArtifact assemble_artifact(const Model& specific, const Model& reference) {
    for (const auto& d : validate_specific(specific, reference))
        if (d.severity == Severity::Error) throw Failure(d.code, d.subject, d.message);

    ExecutableArtifact art;
    art.id = specific.id + ".statemachine";
    art.model_id = specific.id;
    art.runtime = Runtime::Builtin;

    std::map<Role, int> role_count;
    for (const auto& b : specific.blocks) {
        if (b.kind != BlockKind::System) continue;
        const BehaviorBinding* binding = specific.find_binding(b.id);
        if (binding == nullptr) throw Failure(codes::kLeafNoBehavior, b.id, "configured System has no behavior");

        switch (binding->kind) {
        case BindingKind::Builtin: {
            auto k = builtin_kernels().find(binding->target);
            if (k == builtin_kernels().end())
                throw Failure(codes::kRuntimeMismatch, b.id, "no builtin kernel named '" + binding->target + "'");
            if (k->second != binding->role)
                throw Failure(codes::kRuntimeMismatch, b.id,
                              "kernel '" + binding->target + "' implements " + std::string(to_string(k->second)) +
                                  ", bound as " + std::string(to_string(binding->role)));
            break;
        }
        case BindingKind::Exec:
        case BindingKind::Http:
            if (binding->role != Role::Classifier)
                throw Failure(codes::kRuntimeMismatch, b.id,
                              std::string(to_string(binding->kind)) + " hooks can only serve the Classifier role");
            if (binding->target.empty()) throw Failure(codes::kRuntimeMismatch, b.id, "hook target is empty");
            break;
        }
        ++role_count[binding->role];
        art.members.push_back(ArtifactMember{b.id, *binding});

        for (const auto& [key, decl_value] : b.params) {
            if (!key.starts_with(kParamDeclPrefix)) continue;
            const std::string name = key.substr(kParamDeclPrefix.size());
            const auto* decl_text = std::get_if<std::string>(&decl_value);
            const auto decl = decl_text ? parse_param_decl(*decl_text) : std::nullopt;
            if (!decl) throw Failure(codes::kParamType, b.id, "malformed declaration for '" + name + "'");
            if (art.find_param(name) != nullptr)
                throw Failure(codes::kParamConflict, name, "parameter declared by more than one member");
            ParamSpec spec{name, b.id, decl->type, decl->tunable, std::nullopt};
            if (auto it = b.params.find(name); it != b.params.end()) spec.default_value = it->second;
            art.param_schema.push_back(std::move(spec));
        }
    }

    for (auto role : {Role::Plant, Role::Controller, Role::Classifier}) {
        if (role_count[role] != 1)
            throw Failure(codes::kRoleCardinality, std::string(to_string(role)),
                          "expected exactly one member, found " + std::to_string(role_count[role]));
    }
    if (role_count[Role::Target] < 1)
        throw Failure(codes::kRoleCardinality, "Target", "expected at least one member, found 0");

    std::sort(art.members.begin(), art.members.end(),
              [](const ArtifactMember& a, const ArtifactMember& b) { return a.block_id < b.block_id; });
    std::sort(art.param_schema.begin(), art.param_schema.end(),
              [](const ParamSpec& a, const ParamSpec& b) { return a.name < b.name; });

    // The kernels' inputs must be declared by the member playing each role.
    for (const auto& m : art.members) {
        for (const auto& kp : role_params(m.binding.role)) {
            const ParamSpec* spec = art.find_param(kp.name);
            if (spec == nullptr || spec->block_id != m.block_id)
                throw Failure(codes::kParamMissing, m.block_id,
                              "role " + std::string(to_string(m.binding.role)) + " requires parameter '" +
                                  std::string(kp.name) + "'");
            if (spec->type != kp.type)
                throw Failure(codes::kParamType, m.block_id,
                              "parameter '" + std::string(kp.name) + "' must be " + std::string(to_string(kp.type)));
        }
    }
    for (const auto& spec : art.param_schema) {
        const auto j = signal_index(spec.name);
        if (!j) continue;
        const ArtifactMember* owner = nullptr;
        for (const auto& m : art.members)
            if (m.block_id == spec.block_id) owner = &m;
        if (owner == nullptr || owner->binding.role != Role::Target) continue;
        const std::string truth = "truth_" + std::to_string(*j);
        const ParamSpec* t = art.find_param(truth);
        if (spec.type != ParamType::Real)
            throw Failure(codes::kParamType, spec.block_id, "parameter '" + spec.name + "' must be real");
        if (t == nullptr || t->block_id != spec.block_id || t->type != ParamType::Text)
            throw Failure(codes::kParamMissing, spec.block_id, "target signal '" + spec.name + "' needs text '" +
                                                                   truth + "'");
    }
    return art;
}

ParamValues parse_param_file(std::string_view json_text) {
    const auto doc = detail::parse_strict_json(json_text);
    if (!doc.is_object()) throw Failure(codes::kParse, "params", "expected an object of name -> value");
    ParamValues out;
    for (auto it = doc.begin(); it != doc.end(); ++it)
        out.emplace(it.key(), detail::scalar_from_json(it.value(), it.key()));
    return out;
}

Scalar parse_scalar_literal(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text.begin(), text.end());
        return detail::scalar_from_json(j, "value");
    } catch (const std::exception&) {
        return std::string(text);
    }
}

ParamValues resolve_params(const ExecutableArtifact& artifact, const ParamValues& provided) {
    for (const auto& [name, _] : provided)
        if (artifact.find_param(name) == nullptr)
            throw Failure(codes::kParamUnknown, name, "artifact declares no such parameter");

    ParamValues out;
    for (const auto& spec : artifact.param_schema) {
        const Scalar* value = nullptr;
        if (auto it = provided.find(spec.name); it != provided.end()) value = &it->second;
        else if (spec.default_value) value = &*spec.default_value;
        if (value == nullptr) throw Failure(codes::kParamMissing, spec.name, "no value and no default");
        if (!accepts(spec.type, *value))
            throw Failure(codes::kParamType, spec.name,
                          "value " + scalar_to_string(*value) + " is not " + std::string(to_string(spec.type)));
        if (spec.type == ParamType::Real)
            if (const auto* i = std::get_if<std::int64_t>(value)) {
                out.emplace(spec.name, static_cast<double>(*i));
                continue;
            }
        out.emplace(spec.name, *value);
    }
    return out;
}

sim::SimParams to_sim_params(const ExecutableArtifact& artifact, const ParamValues& resolved, sim::NoiseOnset onset) {
    sim::SimParams p;
    p.t0 = int_of(resolved, "t0");
    p.t_n = int_of(resolved, "t_n");
    p.dt = real_of(resolved, "dt");
    p.p_desired0 = vec_of(resolved, "p_desired0");
    p.v_desired = vec_of(resolved, "v_desired");
    p.v_passive = vec_of(resolved, "v_passive");
    p.t_i = int_of(resolved, "t_i");
    p.dN = real_of(resolved, "dN");
    p.h = real_of(resolved, "h");
    p.N0 = real_of(resolved, "N0");
    p.noise_onset = onset;

    std::set<std::string> target_blocks;
    for (const auto& m : artifact.members)
        if (m.binding.role == Role::Target) target_blocks.insert(m.block_id);
    for (const auto& spec : artifact.param_schema) {
        const auto j = signal_index(spec.name);
        if (!j || !target_blocks.count(spec.block_id)) continue;
        const std::string truth_name = "truth_" + std::to_string(*j);
        const auto* truth = std::get_if<std::string>(&value_of(resolved, truth_name));
        if (truth == nullptr || (*truth != "wanted" && *truth != "other"))
            throw Failure(codes::kParamType, truth_name, "ground truth must be \"wanted\" or \"other\"");
        p.targets.push_back(sim::TargetSpec{*j, real_of(resolved, spec.name), *truth == "wanted"});
    }
    sim::check_params(p);
    return p;
}

sim::SimResult run_artifact(const ExecutableArtifact& artifact, const ParamValues& params, sim::EventSink* sink,
                            const RunOptions& options) {
    const auto resolved = resolve_params(artifact, params);
    const auto sp = to_sim_params(artifact, resolved, options.noise_onset);

    const ArtifactMember* classifier = artifact.member_with_role(Role::Classifier);
    if (classifier == nullptr) throw Failure(codes::kRoleCardinality, "Classifier", "artifact has no classifier");

    switch (classifier->binding.kind) {
    case BindingKind::Builtin: return sim::run_simulation(sp, sink);
    case BindingKind::Exec: {
        DeferredReportSink deferred(sink);
        hooks::ExecClassifier hook(classifier->binding.target);
        auto result = sim::run_simulation(sp, &deferred, [&](const sim::ClassifyQuery& q) { return hook(q); });
        hook.finish();
        deferred.release(result.report);
        return result;
    }
    case BindingKind::Http: {
        hooks::HttpClassifier hook(classifier->binding.target);
        return sim::run_simulation(sp, sink, [&](const sim::ClassifyQuery& q) { return hook(q); });
    }
    }
    throw Failure(codes::kRuntimeMismatch, classifier->block_id, "unsupported binding kind");
}

} // namespace mforge
