#pragma once

#include "mforge/metamodel.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace mforge {

inline constexpr int kFormatVersion = 1;

/// Parse a model document. Structural invariants (unique ids, resolvable
/// links, kind/layer consistency, strict keys) are checked; the first
/// violation throws Failure with its code.
[[nodiscard]] Model parse_model(std::string_view text);

/// Canonical rendering: sorted keys, 2-space indent, LF, trailing newline.
/// Throws Failure when the model violates its own invariants.
[[nodiscard]] std::string render_model(const Model& model);

/// Throws Failure(E-IO) when the file cannot be read.
[[nodiscard]] Model load_model(const std::filesystem::path& path);
void save_model(const Model& model, const std::filesystem::path& path);

/// Structural checks shared by parse and render.
void check_model_invariants(const Model& model);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace mforge
