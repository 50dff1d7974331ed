#pragma once

#include "mforge/simkernel.hpp"

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

namespace mforge::hooks {

inline constexpr std::chrono::seconds kRequestTimeout{5};

/// One JSON line: {"N":..,"h":..,"j":..,"s":..,"t":..}
[[nodiscard]] std::string encode_request(const sim::ClassifyQuery& q);
/// Parses {"decision": "wanted"|"other"}; throws Failure(E-HOOK-FAILURE) otherwise.
[[nodiscard]] sim::Decision decode_reply(std::string_view line);
[[nodiscard]] std::string encode_reply(sim::Decision d);
/// Inverse of encode_request, for hook implementations. Throws Failure(E-PARSE).
[[nodiscard]] sim::ClassifyQuery decode_request(std::string_view line);

/// Classifier backed by a child process started through /bin/sh -c. The
/// process lives for the lifetime of the object; finish() closes its stdin
/// and requires exit status 0.
class ExecClassifier {
public:
    explicit ExecClassifier(const std::string& command);
    ~ExecClassifier();
    ExecClassifier(const ExecClassifier&) = delete;
    ExecClassifier& operator=(const ExecClassifier&) = delete;

    sim::Decision operator()(const sim::ClassifyQuery& q);
    void finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Classifier posting each query to an http:// URL.
class HttpClassifier {
public:
    explicit HttpClassifier(const std::string& url);
    ~HttpClassifier();
    HttpClassifier(const HttpClassifier&) = delete;
    HttpClassifier& operator=(const HttpClassifier&) = delete;

    sim::Decision operator()(const sim::ClassifyQuery& q);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace mforge::hooks
