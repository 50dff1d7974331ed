#pragma once

#include "mforge/behavior.hpp"
#include "mforge/derivation.hpp"
#include "mforge/metamodel.hpp"
#include "mforge/simkernel.hpp"
#include "mforge/store.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace mforge::testing {

inline std::filesystem::path models_dir() { return MFORGE_MODELS_DIR; }
inline std::filesystem::path model_path(const std::string& name) { return models_dir() / name; }
inline std::string threshold_hook_path() { return MFORGE_THRESHOLD_HOOK; }

inline Model reference() { return load_model(model_path("atr_reference.json")); }
inline Model specific() { return load_model(model_path("maritime_specific.json")); }
inline Selection selection() { return parse_selection(read_text_file(model_path("maritime_selection.json"))); }
inline ParamValues baseline_values() { return parse_param_file(read_text_file(model_path("baseline_params.json"))); }

inline sim::SimParams baseline_params(sim::NoiseOnset onset = sim::NoiseOnset::AfterActivation) {
    sim::SimParams p;
    p.t0 = 0;
    p.t_n = 5;
    p.t_i = 2;
    p.dt = 1.0;
    p.p_desired0 = {0, 0, 0};
    p.v_desired = {2, 0, 0};
    p.v_passive = {0, 1, 0};
    p.h = 3;
    p.N0 = 0;
    p.dN = 1;
    p.targets = {{0, 3.0, true}, {1, 2.0, false}};
    p.noise_onset = onset;
    return p;
}

inline Block* block(Model& m, const std::string& id) {
    for (auto& b : m.blocks)
        if (b.id == id) return &b;
    return nullptr;
}

inline void remove_relation(Model& m, RelationKind kind, const std::string& source, const std::string& target) {
    std::erase_if(m.relations,
                  [&](const Relation& r) { return r.kind == kind && r.source == source && r.target == target; });
}

inline void remove_block(Model& m, const std::string& id) {
    std::erase_if(m.blocks, [&](const Block& b) { return b.id == id; });
    std::erase_if(m.relations, [&](const Relation& r) { return r.source == id || r.target == id; });
    std::erase_if(m.behaviors, [&](const BehaviorBinding& b) { return b.block_id == id; });
    for (auto& v : m.views) std::erase(v.members, id);
}

/// Canonical single-rule mutation of a clean fixture.
struct Mutation {
    std::string rule;
    std::string expected_code;
    std::function<void(Model&)> apply;
};

inline std::vector<Mutation> reference_mutations() {
    return {
        {"R1", "E-TRACE-MISSING",
         [](Model& m) { remove_relation(m, RelationKind::Trace, "mcu", "movement_control"); }},
        {"R2", "E-TRACE-KIND",
         [](Model& m) { m.relations.push_back({RelationKind::Trace, "auv_plant", "autonomous_survey"}); }},
        {"R3", "E-CYCLE",
         [](Model& m) { m.relations.push_back({RelationKind::Inheritance, "classifier", "threshold_tcu"}); }},
        {"R4", "E-INHERIT-KIND",
         [](Model& m) { m.relations.push_back({RelationKind::Inheritance, "auv_plant", "signal_reception"}); }},
        {"R5", "E-ABSTRACT-BEHAVIOR",
         [](Model& m) {
             m.behaviors.push_back({"classifier", BindingKind::Builtin, "tcu.threshold", Role::Classifier});
         }},
        {"R6", "W-NO-BEHAVIOR",
         [](Model& m) { std::erase_if(m.behaviors, [](const auto& b) { return b.block_id == "threshold_tcu"; }); }},
        {"R7", "W-UNPRESENTED",
         [](Model& m) {
             for (auto& v : m.views) std::erase(v.members, "survey_vehicle");
         }},
    };
}

inline std::vector<Mutation> specific_mutations() {
    return {
        {"S1", "E-DANGLING-REF",
         [](Model& m) {
             Block b;
             b.id = "sonar";
             b.name = "Sonar";
             b.kind = BlockKind::System;
             b.params["ref"] = std::string("ghost");
             m.blocks.push_back(b);
         }},
        {"S2", "E-SELECTION-AMBIGUOUS",
         [](Model& m) {
             Block copy = *block(m, "threshold_tcu");
             copy.id = "remote_tcu";
             copy.name = "Remote TCU";
             copy.params["ref"] = std::string("remote_tcu");
             m.blocks.push_back(copy);
         }},
        {"S2", "E-SELECTION-MISSING", [](Model& m) { remove_block(m, "threshold_tcu"); }},
        {"S3", "E-ABSTRACT-IN-SPECIFIC",
         [](Model& m) {
             Block b;
             b.id = "classifier";
             b.name = "Target Classification Unit";
             b.kind = BlockKind::System;
             b.is_abstract = true;
             b.params["ref"] = std::string("classifier");
             b.params["param:h"] = std::string("real,tunable");
             b.params["param:N0"] = std::string("real");
             b.params["h"] = 3.0;
             b.params["N0"] = 0.0;
             m.blocks.push_back(b);
         }},
        {"S4", "E-PARAM-MISSING", [](Model& m) { block(m, "threshold_tcu")->params.erase("h"); }},
    };
}

/// Random model satisfying the store invariants (not necessarily the
/// validation rules).
inline Model random_model(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nblocks(1, 12);
    std::uniform_int_distribution<int> kind_pick(0, 5);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> small(0, 4);
    std::uniform_real_distribution<double> real(-1e6, 1e6);
    std::uniform_int_distribution<std::int64_t> integer(-1'000'000'000, 1'000'000'000);
    const std::vector<std::string> texts{"", "plain", "quote\"d", "tab\tnew\nline", "ünïcødé ✓", "back\\slash"};

    Model m;
    m.id = "model_" + std::to_string(rng() % 1000);
    m.kind = coin(rng) ? ModelKind::Reference : ModelKind::Specific;
    if (m.kind == ModelKind::Specific) m.parent_ref = "ref_" + std::to_string(rng() % 100);

    const int n = nblocks(rng);
    for (int i = 0; i < n; ++i) {
        Block b;
        b.id = "b" + std::to_string(i);
        b.name = texts[rng() % texts.size()];
        b.kind = kAllBlockKinds[static_cast<std::size_t>(kind_pick(rng))];
        b.is_abstract = b.kind == BlockKind::System && coin(rng);
        if (coin(rng)) b.doc = texts[rng() % texts.size()];
        const int np = small(rng);
        for (int k = 0; k < np; ++k) {
            const std::string key = "p" + std::to_string(k);
            switch (small(rng) % 4) {
            case 0: b.params[key] = integer(rng); break;
            case 1: b.params[key] = real(rng); break;
            case 2: b.params[key] = texts[rng() % texts.size()]; break;
            default: b.params[key] = Vec3{real(rng), real(rng), std::round(real(rng))}; break;
            }
        }
        m.blocks.push_back(std::move(b));
    }

    std::uniform_int_distribution<int> pick(0, n - 1);
    const int nrel = n > 1 ? small(rng) * 2 : 0;
    for (int i = 0; i < nrel; ++i) {
        Relation r{kAllRelationKinds[rng() % 4], m.blocks[pick(rng)].id, m.blocks[pick(rng)].id};
        if (r.source == r.target) continue;
        if (std::find(m.relations.begin(), m.relations.end(), r) != m.relations.end()) continue;
        m.relations.push_back(r);
    }

    for (auto layer : kAllLayers) {
        if (!coin(rng)) continue;
        View v{"view_" + std::string(to_string(layer)), static_cast<Viewpoint>(rng() % 3), layer, {}};
        for (const auto& b : m.blocks)
            if (layer_of(b.kind) == layer && coin(rng)) v.members.push_back(b.id);
        m.views.push_back(std::move(v));
    }

    for (const auto& b : m.blocks) {
        if (b.kind != BlockKind::System || !coin(rng)) continue;
        m.behaviors.push_back({b.id, static_cast<BindingKind>(rng() % 3), texts[rng() % texts.size()],
                               static_cast<Role>(rng() % 4)});
    }
    std::shuffle(m.blocks.begin(), m.blocks.end(), rng);
    std::shuffle(m.relations.begin(), m.relations.end(), rng);
    return m;
}

} // namespace mforge::testing
