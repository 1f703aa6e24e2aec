#include <algorithm>
#include <cctype>
#include <set>

#include "sled/error.hpp"
#include "sled/retrieval.hpp"

namespace sled {
namespace {

bool is_image_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".png";
}

}  // namespace

Labeling parse_labeling(std::string_view name) {
  if (name == "subdir") return Labeling::kSubdir;
  if (name == "stem") return Labeling::kStem;
  throw ParameterError("unknown labeling rule '" + std::string(name) + "' (expected subdir or stem)");
}

std::string_view to_string(Labeling labeling) {
  return labeling == Labeling::kSubdir ? "subdir" : "stem";
}

std::string label_for(const std::filesystem::path& file, Labeling labeling) {
  if (labeling == Labeling::kSubdir) {
    return file.parent_path().filename().string();
  }
  std::string stem = file.stem().string();
  const auto dot = stem.rfind('.');
  if (dot != std::string::npos && dot + 1 < stem.size() &&
      std::all_of(stem.begin() + static_cast<std::ptrdiff_t>(dot) + 1, stem.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    stem.erase(dot);
  }
  return stem;
}

std::map<std::string, std::size_t> DatasetManifest::class_sizes() const {
  std::map<std::string, std::size_t> sizes;
  for (const auto& e : entries) ++sizes[e.label];
  return sizes;
}

std::optional<std::size_t> DatasetManifest::uniform_class_size() const {
  const auto sizes = class_sizes();
  if (sizes.empty()) return std::nullopt;
  const std::size_t first = sizes.begin()->second;
  for (const auto& [label, n] : sizes) {
    if (n != first) return std::nullopt;
  }
  return first;
}

DatasetManifest scan_dataset(const std::filesystem::path& root, Labeling labeling) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw DatasetError("dataset directory not found: " + root.string());
  }

  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::follow_directory_symlink, ec);
       !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (it->is_regular_file(ec) && is_image_file(it->path())) files.push_back(it->path());
  }
  if (ec) {
    throw DatasetError("cannot scan " + root.string() + ": " + ec.message());
  }
  if (files.empty()) {
    throw DatasetError("no images found in " + root.string());
  }
  std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
    return a.lexically_relative(root).generic_string() < b.lexically_relative(root).generic_string();
  });

  DatasetManifest manifest;
  manifest.entries.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::string label = label_for(files[i], labeling);
    if (labeling == Labeling::kSubdir && files[i].parent_path() == root) {
      throw DatasetError("file " + files[i].string() +
                         " sits at the dataset root; the subdir rule needs one directory per class");
    }
    manifest.entries.push_back({files[i], std::move(label), static_cast<std::uint64_t>(i)});
  }
  for (const auto& [label, n] : manifest.class_sizes()) {
    if (n == 1) {
      manifest.warnings.push_back("class '" + label + "' has a single image; it has no other relevant match");
    }
  }
  if (!manifest.uniform_class_size()) {
    manifest.warnings.push_back("class sizes differ; ARR will use each query's own class size as N_R");
  }
  return manifest;
}

}  // namespace sled
