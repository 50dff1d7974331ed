#include "mforge/diagnostic.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace mforge {

Diagnostic error(std::string_view code, std::string subject, std::string message) {
    return Diagnostic{std::string(code), std::move(message), std::move(subject), Severity::Error};
}

Diagnostic warning(std::string_view code, std::string subject, std::string message) {
    return Diagnostic{std::string(code), std::move(message), std::move(subject), Severity::Warning};
}

std::string render_diagnostic(const Diagnostic& d) {
    std::string out = d.severity == Severity::Error ? "error" : "warning";
    out += ' ';
    out += d.code;
    out += ' ';
    out += d.subject.empty() ? "-" : d.subject;
    out += ": ";
    out += d.message;
    return out;
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) { return os << render_diagnostic(d); }

bool has_errors(const Diagnostics& ds) {
    return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

bool has_code(const Diagnostics& ds, std::string_view code) {
    return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; });
}

void sort_diagnostics(Diagnostics& ds) {
    std::sort(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.code, a.subject, a.message) < std::tie(b.code, b.subject, b.message);
    });
}

namespace {
std::string compose(std::string_view code, const std::string& subject, const std::string& message) {
    std::ostringstream os;
    os << code;
    if (!subject.empty()) os << ' ' << subject;
    os << ": " << message;
    return os.str();
}
} // namespace

Failure::Failure(std::string_view code, std::string subject, const std::string& message,
                 std::optional<long long> step)
    : std::runtime_error(compose(code, subject, message)),
      code_(code),
      subject_(std::move(subject)),
      message_(message),
      step_(step) {}

Diagnostic Failure::as_diagnostic() const {
    std::string message = message_;
    if (step_) message += " (at t=" + std::to_string(*step_) + ")";
    return error(code_, subject_, std::move(message));
}

} // namespace mforge
