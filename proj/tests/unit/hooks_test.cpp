#include "mforge/hooks.hpp"

#include "mforge/behavior.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

namespace mforge {
namespace {

template <typename F>
std::optional<Failure> failure_of(F&& f) {
    try {
        f();
    } catch (const Failure& e) {
        return e;
    }
    return std::nullopt;
}

std::string hook_command(const std::string& extra = "") {
    return "'" + testing::threshold_hook_path() + "'" + (extra.empty() ? "" : " " + extra);
}

ExecutableArtifact artifact_with_classifier(BindingKind kind, const std::string& target) {
    auto m = testing::specific();
    for (auto& b : m.behaviors)
        if (b.block_id == "threshold_tcu") {
            b.kind = kind;
            b.target = target;
        }
    return assemble_artifact(m, testing::reference());
}

struct CountingSink : sim::EventSink {
    int steps = 0;
    int reports = 0;
    void on_step(const sim::StepRecord&) override { ++steps; }
    void on_report(const sim::ScoreReport&) override { ++reports; }
};

TEST(Protocol, RoundTrip) {
    const sim::ClassifyQuery q{3, 1, 2.0, 1.0, 3.0};
    const auto back = hooks::decode_request(hooks::encode_request(q));
    EXPECT_EQ(back.t, 3);
    EXPECT_EQ(back.j, 1);
    EXPECT_EQ(back.s, 2.0);
    EXPECT_EQ(back.N, 1.0);
    EXPECT_EQ(back.h, 3.0);
    EXPECT_EQ(hooks::decode_reply(hooks::encode_reply(sim::Decision::Wanted)), sim::Decision::Wanted);
    EXPECT_EQ(hooks::decode_reply("{\"decision\":\"other\"}\r\n"), sim::Decision::Other);
}

TEST(Protocol, MalformedReplies) {
    for (std::string bad : {"", "wanted", "{}", R"({"decision":1})", R"({"decision":"maybe"})",
                            R"({"decision":"wanted","x":1})"}) {
        const auto f = failure_of([&] { (void)hooks::decode_reply(bad); });
        ASSERT_TRUE(f) << bad;
        EXPECT_EQ(f->code(), "E-HOOK-FAILURE");
    }
}

TEST(Protocol, MalformedRequests) {
    for (std::string bad : {"", "{}", R"({"t":1.5,"j":0,"s":1,"N":0,"h":1})", R"({"t":1,"j":0,"s":1,"N":0})"}) {
        const auto f = failure_of([&] { (void)hooks::decode_request(bad); });
        ASSERT_TRUE(f) << bad;
        EXPECT_EQ(f->code(), "E-PARSE");
    }
}

TEST(Exec, ThresholdHookMatchesBuiltin) {
    const auto art = artifact_with_classifier(BindingKind::Exec, hook_command());
    CountingSink sink;
    const auto r = run_artifact(art, testing::baseline_values(), &sink);
    EXPECT_EQ(r, sim::run_simulation(testing::baseline_params()));
    EXPECT_EQ(sink.steps, 6);
    EXPECT_EQ(sink.reports, 1);
}

TEST(Exec, AlwaysWanted) {
    const auto art = artifact_with_classifier(BindingKind::Exec, hook_command("--always wanted"));
    const auto r = run_artifact(art, testing::baseline_values());
    EXPECT_EQ(r.report.fp_count, 6);
    EXPECT_EQ(r.report.fn_count, 0);
    EXPECT_EQ(r.report.first_fp_t, std::optional<std::int64_t>(0));
}

TEST(Exec, GarbageReplyFailsAtFirstStep) {
    const auto art = artifact_with_classifier(BindingKind::Exec, "while read l; do echo nonsense; done");
    CountingSink sink;
    const auto f = failure_of([&] { (void)run_artifact(art, testing::baseline_values(), &sink); });
    ASSERT_TRUE(f);
    EXPECT_EQ(f->code(), "E-HOOK-FAILURE");
    EXPECT_EQ(f->step(), std::optional<std::int64_t>(0));
    EXPECT_EQ(sink.reports, 0);
}

TEST(Exec, HookDyingMidRun) {
    // Answers the first four queries (steps 0 and 1), then exits.
    const auto art = artifact_with_classifier(
        BindingKind::Exec, "i=0; while [ $i -lt 4 ] && read l; do echo '{\"decision\":\"other\"}'; i=$((i+1)); done");
    const auto f = failure_of([&] { (void)run_artifact(art, testing::baseline_values()); });
    ASSERT_TRUE(f);
    EXPECT_EQ(f->code(), "E-HOOK-FAILURE");
    EXPECT_EQ(f->step(), std::optional<std::int64_t>(2));
}

TEST(Exec, NonzeroExitAfterCompleteRunFails) {
    const auto art = artifact_with_classifier(
        BindingKind::Exec, "while read l; do echo '{\"decision\":\"other\"}'; done; exit 3");
    CountingSink sink;
    const auto f = failure_of([&] { (void)run_artifact(art, testing::baseline_values(), &sink); });
    ASSERT_TRUE(f);
    EXPECT_EQ(f->code(), "E-HOOK-FAILURE");
    EXPECT_NE(f->message().find("exit status 3"), std::string::npos) << f->message();
    EXPECT_EQ(sink.steps, 6);
    EXPECT_EQ(sink.reports, 0);
}

TEST(Exec, MissingProgram) {
    const auto art = artifact_with_classifier(BindingKind::Exec, "/nonexistent/hook-binary");
    const auto f = failure_of([&] { (void)run_artifact(art, testing::baseline_values()); });
    ASSERT_TRUE(f);
    EXPECT_EQ(f->code(), "E-HOOK-FAILURE");
}

class HttpFixture : public ::testing::Test {
protected:
    void start(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Post("/classify", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    void TearDown() override {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/classify"; }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

TEST_F(HttpFixture, ThresholdServiceMatchesBuiltin) {
    std::atomic<int> calls{0};
    start([&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        const auto q = hooks::decode_request(req.body);
        res.set_content(hooks::encode_reply(sim::threshold_decision(q)), "application/json");
    });
    const auto art = artifact_with_classifier(BindingKind::Http, url());
    const auto r = run_artifact(art, testing::baseline_values());
    EXPECT_EQ(r, sim::run_simulation(testing::baseline_params()));
    EXPECT_EQ(calls.load(), 12);
}

TEST_F(HttpFixture, ErrorStatusFails) {
    std::atomic<int> calls{0};
    start([&](const httplib::Request&, httplib::Response& res) {
        if (++calls > 5) {
            res.status = 500;
            return;
        }
        res.set_content(hooks::encode_reply(sim::Decision::Other), "application/json");
    });
    const auto art = artifact_with_classifier(BindingKind::Http, url());
    const auto f = failure_of([&] { (void)run_artifact(art, testing::baseline_values()); });
    ASSERT_TRUE(f);
    EXPECT_EQ(f->code(), "E-HOOK-FAILURE");
    EXPECT_EQ(f->step(), std::optional<std::int64_t>(2));
    EXPECT_NE(f->message().find("500"), std::string::npos);
}

TEST(Http, UnsupportedUrl) {
    const auto f = failure_of([] { hooks::HttpClassifier c("https://example.invalid/x"); });
    ASSERT_TRUE(f);
    EXPECT_EQ(f->code(), "E-HOOK-FAILURE");
}

TEST(Http, ConnectionRefused) {
    // Bind then release a port so nothing is listening on it.
    int port = 0;
    {
        httplib::Server s;
        port = s.bind_to_any_port("127.0.0.1");
    }
    const auto art = artifact_with_classifier(BindingKind::Http, "http://127.0.0.1:" + std::to_string(port) + "/c");
    const auto f = failure_of([&] { (void)run_artifact(art, testing::baseline_values()); });
    ASSERT_TRUE(f);
    EXPECT_EQ(f->code(), "E-HOOK-FAILURE");
    EXPECT_EQ(f->step(), std::optional<std::int64_t>(0));
}

} // namespace
} // namespace mforge
