#include "mforge/simkernel.hpp"

#include "mforge/diagnostic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace mforge::sim {

namespace {

void require_in_range(const SimParams& p, std::int64_t t) {
    if (t < p.t0 || t > p.t_n)
        throw Failure(codes::kParamRange, "t", "t=" + std::to_string(t) + " outside [" + std::to_string(p.t0) + ", " +
                                                   std::to_string(p.t_n) + "]");
}

} // namespace

void check_params(const SimParams& p) {
    if (p.t0 < 0) throw Failure(codes::kParamRange, "t0", "start time must be a natural number");
    if (p.t_i < p.t0 || p.t_i > p.t_n) throw Failure(codes::kParamRange, "t_i", "requires t0 <= t_i <= t_n");
    if (!(p.dt > 0.0) || !std::isfinite(p.dt)) throw Failure(codes::kParamRange, "dt", "time step must be positive");
    if (p.targets.empty()) throw Failure(codes::kParamRange, "targets", "at least one target is required");
    std::set<std::int64_t> indices;
    for (const auto& t : p.targets)
        if (!indices.insert(t.j).second)
            throw Failure(codes::kParamRange, "targets", "duplicate target index " + std::to_string(t.j));
    if (*indices.begin() != 0 || *indices.rbegin() != static_cast<std::int64_t>(indices.size()) - 1)
        throw Failure(codes::kParamRange, "targets", "target indices must be 0..m without gaps");
}

Vec3 desired_position(const SimParams& p, std::int64_t t) {
    require_in_range(p, t);
    return p.p_desired0 + p.v_desired * (static_cast<double>(t - p.t0) * p.dt);
}

Vec3 active_velocity(const SimParams& p, std::int64_t t, const Vec3& p_deviation) {
    if (t < p.t_i) return p.v_desired;
    // Deadbeat: cancel drift and the accumulated deviation within one step.
    return p.v_desired - p.v_passive - p_deviation / p.dt;
}

SimState initial_state(const SimParams& p) {
    SimState s;
    s.t = p.t0;
    s.p_desired = p.p_desired0;
    s.p_actual = p.p_desired0;
    s.p_deviation = Vec3{};
    s.v_active = active_velocity(p, p.t0, s.p_deviation);
    s.v_actual = s.v_active + p.v_passive;
    return s;
}

SimState step(const SimParams& p, const SimState& state) {
    if (state.t >= p.t_n)
        throw Failure(codes::kParamRange, "t", "cannot step past t_n=" + std::to_string(p.t_n));
    SimState next;
    next.v_active = active_velocity(p, state.t, state.p_deviation);
    next.v_actual = next.v_active + p.v_passive;
    next.t = state.t + 1;
    next.p_actual = state.p_actual + next.v_actual * p.dt;
    next.p_desired = desired_position(p, next.t);
    next.p_deviation = next.p_actual - next.p_desired;
    return next;
}

double noise_at(const SimParams& p, std::int64_t t) {
    const bool raised = p.noise_onset == NoiseOnset::AtActivation ? t >= p.t_i : t > p.t_i;
    return raised ? p.N0 + p.dN : p.N0;
}

Decision threshold_decision(const ClassifyQuery& q) noexcept {
    return q.s + q.N >= q.h ? Decision::Wanted : Decision::Other;
}

ErrorKind error_of(Decision decision, bool truth) noexcept {
    if (decision == Decision::Wanted && !truth) return ErrorKind::FalsePositive;
    if (decision == Decision::Other && truth) return ErrorKind::FalseNegative;
    return ErrorKind::None;
}

Classification classify(const SimParams& p, std::int64_t t, const TargetSpec& target) {
    return classify(p, t, target, ClassifierFn{});
}

Classification classify(const SimParams& p, std::int64_t t, const TargetSpec& target, const ClassifierFn& classifier) {
    Classification c;
    c.t = t;
    c.j = target.j;
    c.s = target.s;
    c.noise = noise_at(p, t);
    const ClassifyQuery q{t, target.j, target.s, c.noise, p.h};
    c.decision = classifier ? classifier(q) : threshold_decision(q);
    c.truth = target.wanted;
    c.error = error_of(c.decision, c.truth);
    return c;
}

ScoreReport score(const std::vector<StepRecord>& steps) {
    ScoreReport r;
    for (const auto& s : steps) {
        for (const auto& c : s.classifications) {
            if (c.error == ErrorKind::FalsePositive) {
                ++r.fp_count;
                if (!r.first_fp_t || c.t < *r.first_fp_t) r.first_fp_t = c.t;
            } else if (c.error == ErrorKind::FalseNegative) {
                ++r.fn_count;
                if (!r.first_fn_t || c.t < *r.first_fn_t) r.first_fn_t = c.t;
            }
        }
    }
    return r;
}

SimResult run_simulation(const SimParams& p, EventSink* sink, const ClassifierFn& classifier) {
    check_params(p);
    std::vector<TargetSpec> targets = p.targets;
    std::sort(targets.begin(), targets.end(), [](const TargetSpec& a, const TargetSpec& b) { return a.j < b.j; });

    SimResult result;
    result.steps.reserve(static_cast<std::size_t>(p.t_n - p.t0 + 1));
    SimState state = initial_state(p);
    for (std::int64_t t = p.t0; t <= p.t_n; ++t) {
        StepRecord rec;
        rec.state = state;
        rec.state.v_active = active_velocity(p, t, state.p_deviation);
        rec.state.v_actual = rec.state.v_active + p.v_passive;
        rec.classifications.reserve(targets.size());
        for (const auto& target : targets) {
            try {
                rec.classifications.push_back(classify(p, t, target, classifier));
            } catch (const Failure& f) {
                if (f.step()) throw;
                throw Failure(f.code(), f.subject(), f.message(), t);
            } catch (const std::exception& e) {
                throw Failure(codes::kHookFailure, "classifier", e.what(), t);
            }
        }
        if (sink != nullptr) sink->on_step(rec);
        result.steps.push_back(std::move(rec));
        if (t < p.t_n) state = step(p, state);
    }
    result.report = score(result.steps);
    if (sink != nullptr) sink->on_report(result.report);
    return result;
}

} // namespace mforge::sim
