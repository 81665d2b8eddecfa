#pragma once

#include <cstdint>
#include <string>

#include "tfrhss/grid.hpp"

namespace tfrhss {

/// Raised for malformed or unknown configuration content. The message carries
/// the 1-based line number when one applies.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sectioned `key = value` text. Recognised layout:
///
///   [grid]      n_cells, side_length
///   [physics]   conductivity
///   [boundary]  sink_length, bottom, right, top, left
///               edge value: `kind start end [T0 [h]] | kind start end ...`
///   [source]    name, shape, center = x y, extent = length width, intensity
///               (one section per source, repeatable)
///   [sensors]   fill_value, cells = r c, r c, ...  (cells may repeat)
///
/// `#` starts a comment. Unknown sections and keys are errors.
SystemSpec parse_system_spec(const std::string& text);
SystemSpec load_system_spec(const std::string& path);

/// Inverse of parse_system_spec; doubles are written in shortest round-trip form.
std::string format_system_spec(const SystemSpec& spec);
void save_system_spec(const SystemSpec& spec, const std::string& path);

/// FNV-1a 64 of the canonical text form.
std::uint64_t spec_hash(const SystemSpec& spec);

std::string format_double(double v);

}  // namespace tfrhss
