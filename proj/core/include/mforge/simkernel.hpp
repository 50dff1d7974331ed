#pragma once

#include "mforge/vec3.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace mforge::sim {

/// When the controller's noise increase reaches the classifier.
///   AfterActivation: N0 + dN for t > t_i (reproduces the published scoring run)
///   AtActivation:    N0 + dN for t >= t_i (literal piecewise definition)
enum class NoiseOnset { AfterActivation, AtActivation };

struct TargetSpec {
    std::int64_t j = 0;
    double s = 0.0;
    bool wanted = false;

    friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct SimParams {
    std::int64_t t0 = 0;
    std::int64_t t_i = 0;
    std::int64_t t_n = 0;
    double dt = 1.0;
    Vec3 p_desired0;
    Vec3 v_desired;
    Vec3 v_passive;
    double h = 0.0;
    double N0 = 0.0;
    double dN = 0.0;
    std::vector<TargetSpec> targets;
    NoiseOnset noise_onset = NoiseOnset::AfterActivation;

    friend bool operator==(const SimParams&, const SimParams&) = default;
};

/// Throws Failure(E-PARAM-RANGE) unless t0 <= t_i <= t_n, dt > 0 and the
/// target indices are exactly 0..m.
void check_params(const SimParams& p);

struct SimState {
    std::int64_t t = 0;
    Vec3 p_desired;
    Vec3 p_actual;
    Vec3 p_deviation;
    Vec3 v_active;
    Vec3 v_actual;

    friend bool operator==(const SimState&, const SimState&) = default;
};

enum class Decision { Wanted, Other };
enum class ErrorKind { None, FalsePositive, FalseNegative };

struct Classification {
    std::int64_t t = 0;
    std::int64_t j = 0;
    double s = 0.0;
    double noise = 0.0;
    Decision decision = Decision::Other;
    bool truth = false;
    ErrorKind error = ErrorKind::None;

    friend bool operator==(const Classification&, const Classification&) = default;
};

struct StepRecord {
    /// Position at t; velocities are the ones applied over [t, t+1).
    SimState state;
    std::vector<Classification> classifications;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct ScoreReport {
    std::int64_t fp_count = 0;
    std::int64_t fn_count = 0;
    std::optional<std::int64_t> first_fp_t;
    std::optional<std::int64_t> first_fn_t;

    friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

struct SimResult {
    std::vector<StepRecord> steps;
    ScoreReport report;

    friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// What a classifier sees for one target at one time step.
struct ClassifyQuery {
    std::int64_t t = 0;
    std::int64_t j = 0;
    double s = 0.0;
    double N = 0.0;
    double h = 0.0;
};

using ClassifierFn = std::function<Decision(const ClassifyQuery&)>;

/// Receives records in step order on the caller's thread.
class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void on_step(const StepRecord&) {}
    virtual void on_report(const ScoreReport&) {}
};

[[nodiscard]] Vec3 desired_position(const SimParams& p, std::int64_t t);
[[nodiscard]] Vec3 active_velocity(const SimParams& p, std::int64_t t, const Vec3& p_deviation);
[[nodiscard]] SimState initial_state(const SimParams& p);
[[nodiscard]] SimState step(const SimParams& p, const SimState& state);
[[nodiscard]] double noise_at(const SimParams& p, std::int64_t t);

/// s + N >= h classifies Wanted; ties are Wanted.
[[nodiscard]] Decision threshold_decision(const ClassifyQuery& q) noexcept;
[[nodiscard]] ErrorKind error_of(Decision decision, bool truth) noexcept;

[[nodiscard]] Classification classify(const SimParams& p, std::int64_t t, const TargetSpec& target);
[[nodiscard]] Classification classify(const SimParams& p, std::int64_t t, const TargetSpec& target,
                                      const ClassifierFn& classifier);

[[nodiscard]] ScoreReport score(const std::vector<StepRecord>& steps);

/// Runs t = t0..t_n. A null classifier means the builtin threshold rule.
/// Exceptions thrown by the classifier propagate after tagging with the step.
SimResult run_simulation(const SimParams& p, EventSink* sink = nullptr, const ClassifierFn& classifier = {});

} // namespace mforge::sim
