#include "mforge/derivation.hpp"
#include "mforge/store.hpp"
#include "mforge/validation.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

namespace mforge {
namespace {

using Strings = std::vector<std::string>;

template <typename F>
std::string failure_code(F&& f) {
    try {
        f();
    } catch (const Failure& e) {
        return e.code();
    }
    return "";
}

Block system(const std::string& id, bool abstract = false) {
    Block b;
    b.id = id;
    b.name = id;
    b.kind = BlockKind::System;
    b.is_abstract = abstract;
    return b;
}

TEST(AlternativeGroups, BundledReference) {
    const auto groups = alternative_groups(testing::reference());
    ASSERT_EQ(groups.size(), 4u);
    EXPECT_EQ(groups[0], (AlternativeGroup{"movement_control", "mcu", {"deadbeat_mcu"}}));
    EXPECT_EQ(groups[1], (AlternativeGroup{"signal_reception", "targets", {"targets"}}));
    EXPECT_EQ(groups[2], (AlternativeGroup{"target_classification", "classifier", {"remote_tcu", "threshold_tcu"}}));
    EXPECT_EQ(groups[3], (AlternativeGroup{"vehicle_kinematics", "auv_plant", {"auv_plant"}}));
}

TEST(AlternativeGroups, AbstractChildlessRootHasNoLeaves) {
    auto m = testing::reference();
    m.blocks.push_back(system("sonar_unit", true));
    m.relations.push_back({RelationKind::Trace, "sonar_unit", "signal_reception"});
    const auto groups = alternative_groups(m);
    const auto it = std::find_if(groups.begin(), groups.end(), [](const auto& g) { return g.root_id == "sonar_unit"; });
    ASSERT_NE(it, groups.end());
    EXPECT_TRUE(it->leaves.empty());
    EXPECT_FALSE(it->usable());
    // targets still serves the function, so the union stays a singleton.
    EXPECT_EQ(service_candidates(m).at("signal_reception"), Strings{"targets"});
}

TEST(AlternativeGroups, DeepHierarchyCollectsConcreteDescendantsOnly) {
    auto m = testing::reference();
    auto mid = system("learned_tcu", true);
    auto leaf = system("cnn_tcu");
    m.blocks.push_back(mid);
    m.blocks.push_back(leaf);
    m.relations.push_back({RelationKind::Inheritance, "learned_tcu", "classifier"});
    m.relations.push_back({RelationKind::Inheritance, "cnn_tcu", "learned_tcu"});
    EXPECT_EQ(service_candidates(m).at("target_classification"), (Strings{"cnn_tcu", "remote_tcu", "threshold_tcu"}));
}

TEST(AlternativeGroups, Partition) {
    // Every concrete System tracing to a service lands in exactly one group per service.
    const auto m = testing::reference();
    const auto groups = alternative_groups(m);
    for (const auto& b : m.blocks) {
        if (b.kind != BlockKind::System || b.is_abstract) continue;
        for (const auto& service : m.out_edges(b.id, RelationKind::Trace)) {
            int hits = 0;
            for (const auto& g : groups)
                if (g.service_id == service) hits += static_cast<int>(std::count(g.leaves.begin(), g.leaves.end(), b.id));
            EXPECT_EQ(hits, 1) << b.id << " -> " << service;
        }
    }
}

TEST(Derive, MatchesBundledSpecific) {
    const auto out = derive_specific(testing::reference(), testing::selection(), "maritime_specific");
    EXPECT_TRUE(structurally_equal(out, testing::specific()));
    EXPECT_EQ(render_model(out), read_text_file(testing::model_path("maritime_specific.json")));
}

TEST(Derive, OutputValidates) {
    const auto ref = testing::reference();
    const auto out = derive_specific(ref, testing::selection(), "x");
    EXPECT_EQ(validate_specific(out, ref), Diagnostics{});
    EXPECT_EQ(out.kind, ModelKind::Specific);
    EXPECT_EQ(out.parent_ref, std::optional<std::string>("atr_reference"));
}

TEST(Derive, ByteDeterministicAcrossInputOrder) {
    const auto sel = testing::selection();
    const auto expected = render_model(derive_specific(testing::reference(), sel, "d"));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        auto ref = testing::reference();
        std::shuffle(ref.blocks.begin(), ref.blocks.end(), rng);
        std::shuffle(ref.relations.begin(), ref.relations.end(), rng);
        std::shuffle(ref.behaviors.begin(), ref.behaviors.end(), rng);
        EXPECT_EQ(render_model(derive_specific(ref, sel, "d")), expected);
    }
}

TEST(Derive, SingletonGroupsNeedNoChoice) {
    auto sel = testing::selection();
    sel.choices.erase("movement_control");
    sel.choices.erase("vehicle_kinematics");
    const auto out = derive_specific(testing::reference(), sel, "d");
    EXPECT_NE(out.find_block("deadbeat_mcu"), nullptr);
    EXPECT_NE(out.find_block("auv_plant"), nullptr);
}

TEST(Derive, AmbiguousGroupWithoutChoice) {
    auto sel = testing::selection();
    sel.choices.erase("target_classification");
    EXPECT_EQ(failure_code([&] { (void)derive_specific(testing::reference(), sel, "d"); }), "E-SELECTION-MISSING");
}

TEST(Derive, AbstractChoice) {
    auto sel = testing::selection();
    sel.choices["target_classification"] = "classifier";
    EXPECT_EQ(failure_code([&] { (void)derive_specific(testing::reference(), sel, "d"); }), "E-SELECTION-ABSTRACT");
}

TEST(Derive, ForeignChoice) {
    auto sel = testing::selection();
    sel.choices["target_classification"] = "auv_plant";
    EXPECT_EQ(failure_code([&] { (void)derive_specific(testing::reference(), sel, "d"); }), "E-SELECTION-FOREIGN");
    sel = testing::selection();
    sel.choices["operate_auv"] = "auv_plant";
    EXPECT_EQ(failure_code([&] { (void)derive_specific(testing::reference(), sel, "d"); }), "E-SELECTION-FOREIGN");
}

TEST(Derive, MissingDeclaredParam) {
    auto sel = testing::selection();
    sel.overrides.erase({"threshold_tcu", "h"});
    EXPECT_EQ(failure_code([&] { (void)derive_specific(testing::reference(), sel, "d"); }), "E-PARAM-MISSING");
}

TEST(Derive, OverrideOfUnselectedBlock) {
    auto sel = testing::selection();
    sel.overrides[{"remote_tcu", "h"}] = 1.0;
    EXPECT_EQ(failure_code([&] { (void)derive_specific(testing::reference(), sel, "d"); }), "E-UNKNOWN-BLOCK");
}

TEST(Derive, RefusesDirtyReference) {
    auto ref = testing::reference();
    testing::remove_relation(ref, RelationKind::Trace, "mcu", "movement_control");
    testing::remove_relation(ref, RelationKind::Trace, "deadbeat_mcu", "movement_control");
    EXPECT_EQ(failure_code([&] { (void)derive_specific(ref, testing::selection(), "d"); }), "E-TRACE-MISSING");
}

TEST(Derive, CopiesBehaviorsAndInternalConnectivity) {
    const auto out = derive_specific(testing::reference(), testing::selection(), "d");
    EXPECT_EQ(out.behaviors.size(), 4u);
    for (const auto& r : out.relations) {
        EXPECT_EQ(r.kind, RelationKind::Connectivity);
        EXPECT_NE(r.target, "remote_tcu");
    }
}

TEST(EffectiveParams, ThreeLevelShadowing) {
    Model m;
    m.id = "shadow";
    auto a = system("a", true);
    auto b = system("b", true);
    auto c = system("c");
    a.params["x"] = std::int64_t{1};
    a.params["y"] = std::int64_t{1};
    a.params["z"] = std::int64_t{1};
    b.params["y"] = std::int64_t{2};
    b.params["z"] = std::int64_t{2};
    c.params["z"] = std::int64_t{3};
    m.blocks = {a, b, c};
    m.relations = {{RelationKind::Inheritance, "b", "a"}, {RelationKind::Inheritance, "c", "b"}};
    const auto p = effective_params(m, "c");
    EXPECT_EQ(p.at("x"), Scalar{std::int64_t{1}});
    EXPECT_EQ(p.at("y"), Scalar{std::int64_t{2}});
    EXPECT_EQ(p.at("z"), Scalar{std::int64_t{3}});
}

TEST(EffectiveParams, OverrideBeatsInheritedDefault) {
    auto sel = testing::selection();
    sel.overrides[{"threshold_tcu", "N0"}] = 0.5;
    const auto out = derive_specific(testing::reference(), sel, "d");
    EXPECT_EQ(out.find_block("threshold_tcu")->params.at("N0"), Scalar{0.5});
    EXPECT_EQ(out.find_block("threshold_tcu")->params.at("param:h"), Scalar{std::string("real,tunable")});
}

TEST(Completeness, BundledSpecificIsComplete) {
    const auto report = completeness(testing::specific(), testing::reference());
    EXPECT_TRUE(report.complete);
    ASSERT_EQ(report.entries.size(), 4u);
    for (const auto& e : report.entries) {
        EXPECT_EQ(e.status, Resolution::Resolved) << e.service_id;
        EXPECT_EQ(e.present.size(), 1u);
    }
}

TEST(Completeness, RemovedClassifierIsMissing) {
    auto m = testing::specific();
    testing::remove_block(m, "threshold_tcu");
    const auto report = completeness(m, testing::reference());
    EXPECT_FALSE(report.complete);
    for (const auto& e : report.entries)
        EXPECT_EQ(e.status, e.service_id == "target_classification" ? Resolution::Missing : Resolution::Resolved);
}

TEST(Completeness, DuplicateProviderIsAmbiguous) {
    auto m = testing::specific();
    testing::specific_mutations()[1].apply(m);
    const auto report = completeness(m, testing::reference());
    EXPECT_FALSE(report.complete);
    const auto& e = report.entries[2];
    EXPECT_EQ(e.service_id, "target_classification");
    EXPECT_EQ(e.status, Resolution::Ambiguous);
    EXPECT_EQ(e.present, (Strings{"remote_tcu", "threshold_tcu"}));
}

TEST(Completeness, NoServicesIsVacuouslyComplete) {
    Model ref;
    ref.id = "empty";
    Model spec;
    spec.id = "s";
    spec.kind = ModelKind::Specific;
    spec.parent_ref = "empty";
    const auto report = completeness(spec, ref);
    EXPECT_TRUE(report.complete);
    EXPECT_TRUE(report.entries.empty());
}

TEST(Selection, ParsesBundledFile) {
    const auto sel = testing::selection();
    EXPECT_EQ(sel.choices.size(), 3u);
    EXPECT_EQ(sel.choices.at("target_classification"), "threshold_tcu");
    EXPECT_EQ(sel.overrides.at({"auv_plant", "t_n"}), Scalar{std::int64_t{5}});
}

TEST(Selection, RejectsMalformed) {
    for (std::string bad : {R"([])", R"({"select": 3})", R"({"params": {"noblock": 1}})",
                            R"({"params": {"a.ref": "x"}})", R"({"params": {"a.param:x": "real"}})",
                            R"({"extra": {}})", R"({"select": {"a": 1}})", R"({"select": {"a": "b", "a": "c"}})"}) {
        EXPECT_EQ(failure_code([&] { (void)parse_selection(bad); }), "E-PARSE") << bad;
    }
}

} // namespace
} // namespace mforge
