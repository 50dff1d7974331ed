#include "json_scalar.hpp"

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

namespace mforge::detail {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Failure(codes::kParse, where, what);
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) parse_fail(where, "expected a number");
    return v.get<double>();
}

} // namespace

Scalar scalar_from_json(const json& v, const std::string& where) {
    if (v.is_number_integer()) {
        if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
            parse_fail(where, "integer out of range");
        return v.get<std::int64_t>();
    }
    if (v.is_number_float()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array() && v.size() == 3)
        return Vec3{as_number(v[0], where), as_number(v[1], where), as_number(v[2], where)};
    parse_fail(where, "value must be an integer, real, string or [x, y, z]");
}

namespace {
void require_finite(double d, const std::string& where) {
    if (!std::isfinite(d)) throw Failure(codes::kParse, where, "non-finite number cannot be stored");
}

} // namespace

json scalar_to_json(const Scalar& s, const std::string& where) {
    struct Visitor {
        const std::string& where;
        json operator()(std::int64_t v) const { return v; }
        json operator()(double v) const {
            require_finite(v, where);
            return v;
        }
        json operator()(const std::string& v) const { return v; }
        json operator()(const Vec3& v) const {
            require_finite(v.x, where);
            require_finite(v.y, where);
            require_finite(v.z, where);
            return json::array({v.x, v.y, v.z});
        }
    };
    return std::visit(Visitor{where}, s);
}

// Rejects duplicate object keys, which nlohmann would otherwise merge silently.
json parse_strict_json(std::string_view text) {
    std::vector<std::set<std::string>> open;
    std::string duplicate;
    json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
        switch (event) {
        case json::parse_event_t::object_start: open.emplace_back(); break;
        case json::parse_event_t::object_end:
            if (!open.empty()) open.pop_back();
            break;
        case json::parse_event_t::key:
            if (!open.empty() && !open.back().insert(parsed.get<std::string>()).second && duplicate.empty())
                duplicate = parsed.get<std::string>();
            break;
        default: break;
        }
        return true;
    };
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), cb);
    } catch (const json::exception& e) {
        parse_fail("", std::string("malformed JSON: ") + e.what());
    }
    if (!duplicate.empty()) parse_fail("", "duplicate key '" + duplicate + "'");
    return doc;
}

} // namespace mforge::detail
