#include "sled/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sled/error.hpp"

namespace sled {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, const std::string& what) {
  s = trim(s);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParameterError("invalid number '" + std::string(s) + "' for " + what);
  }
  return value;
}

int parse_int(std::string_view s, const std::string& what) {
  s = trim(s);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParameterError("invalid integer '" + std::string(s) + "' for " + what);
  }
  return value;
}

bool parse_bool(std::string_view s, const std::string& what) {
  std::string v(trim(s));
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParameterError("invalid boolean '" + v + "' for " + what);
}

}  // namespace

std::vector<double> parse_scales(std::string_view text) {
  std::vector<double> scales;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item = trim(text.substr(start, comma - start));
    if (item.empty()) throw ParameterError("empty entry in scale list '" + std::string(text) + "'");
    double value = 0.0;
    if (const std::size_t slash = item.find('/'); slash != std::string_view::npos) {
      const double num = parse_double(item.substr(0, slash), "scales");
      const double den = parse_double(item.substr(slash + 1), "scales");
      if (den == 0.0) throw ParameterError("zero denominator in scale '" + std::string(item) + "'");
      value = num / den;
    } else {
      value = parse_double(item, "scales");
    }
    if (!(value > 0.0)) throw ParameterError("scales must be positive, got '" + std::string(item) + "'");
    scales.push_back(value);
    start = comma + 1;
  }
  return scales;
}

std::string format_scales(const std::vector<double>& scales) {
  std::ostringstream out;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (i) out << ',';
    out << scales[i];
  }
  return out.str();
}

void apply_config_text(std::string_view text, PipelineConfig& cfg) {
  std::istringstream lines{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string where = "config key '" + key + "' (line " + std::to_string(line_no) + ")";
    if (key == "window" || key == "w") {
      cfg.window = parse_int(value, where);
    } else if (key == "block_size" || key == "W") {
      cfg.block_size = parse_int(value, where);
    } else if (key == "overlap") {
      cfg.overlap = parse_double(value, where);
    } else if (key == "scales") {
      cfg.scales = parse_scales(value);
    } else if (key == "epsilon_scale") {
      cfg.epsilon_scale = parse_double(value, where);
    } else if (key == "strict_extrema") {
      cfg.strict_extrema = parse_bool(value, where);
    } else {
      throw ParameterError("unknown config key '" + key + "' on line " + std::to_string(line_no));
    }
  }
}

void apply_config_file(const std::filesystem::path& path, PipelineConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  apply_config_text(text.str(), cfg);
}

}  // namespace sled
