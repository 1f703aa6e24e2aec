#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sled/descriptor.hpp"

namespace sled {

// Parses a comma separated list of positive scale factors. Each item is a
// decimal number or a fraction such as "2/3". Throws ParameterError.
std::vector<double> parse_scales(std::string_view text);

// Formats scales the way parse_scales reads them back, e.g. "0.666667,1,1.5".
std::string format_scales(const std::vector<double>& scales);

// Applies `key = value` lines onto cfg. Blank lines and '#' comments are
// ignored. Recognised keys: window (or w), block_size (or W), overlap,
// scales, epsilon_scale, strict_extrema. Unknown keys and unparsable values
// throw ParameterError naming the line.
void apply_config_text(std::string_view text, PipelineConfig& cfg);
void apply_config_file(const std::filesystem::path& path, PipelineConfig& cfg);

}  // namespace sled
