#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sled/descriptor.hpp"

namespace sled {

// How class labels are derived from file locations.
enum class Labeling {
  kSubdir,  // name of the directory containing the file
  kStem,    // file stem with a trailing ".NNNN" index removed ("Bark.0000.03.ppm" -> "Bark.0000")
};

Labeling parse_labeling(std::string_view name);
std::string_view to_string(Labeling labeling);

// Class label of a single file under the given rule.
std::string label_for(const std::filesystem::path& file, Labeling labeling);

struct DatasetEntry {
  std::filesystem::path path;
  std::string label;
  std::uint64_t id = 0;
};

struct DatasetManifest {
  std::vector<DatasetEntry> entries;  // sorted by relative path, ids 0..n-1
  std::vector<std::string> warnings;

  std::size_t total() const { return entries.size(); }
  std::map<std::string, std::size_t> class_sizes() const;
  std::size_t class_count() const { return class_sizes().size(); }
  // Images per class when every class has the same size.
  std::optional<std::size_t> uniform_class_size() const;
};

// Recursively collects .ppm/.pgm/.pnm/.png files under root. Throws
// DatasetError when root is missing or holds no images. Classes with a single
// image produce a warning.
DatasetManifest scan_dataset(const std::filesystem::path& root, Labeling labeling);

struct IndexEntry {
  std::uint64_t id = 0;
  std::string label;
  MultiscaleDescriptor descriptor;

  bool operator==(const IndexEntry&) const = default;
};

struct DescriptorIndex {
  PipelineConfig config;
  std::vector<IndexEntry> entries;

  const IndexEntry* find(std::uint64_t id) const;
  std::size_t size() const { return entries.size(); }

  bool operator==(const DescriptorIndex&) const = default;
};

// Describes every manifest image with cfg on up to `jobs` threads (<= 0:
// all hardware threads). Entry order follows the manifest regardless of
// jobs. Any failing image aborts the build with an Error naming its id and
// path.
DescriptorIndex build_index(const DatasetManifest& manifest, const PipelineConfig& cfg, int jobs = 0);

struct Match {
  std::uint64_t id = 0;
  double distance = 0.0;

  bool operator==(const Match&) const = default;
};

// K best matches, ascending by distance, ties by ascending id.
using RankedResult = std::vector<Match>;

// Throws ParameterError when K is outside [1, index size] and
// IncompatibleDescriptorError when the probe's scales differ from the index.
RankedResult query(const DescriptorIndex& index, const MultiscaleDescriptor& probe, int k);

// Symmetric all-pairs multiscale distances with zero diagonal, rows and
// columns in index entry order.
Eigen::MatrixXd distance_matrix(const DescriptorIndex& index, int jobs = 0);

// Ranks one row of a distance matrix; entry i of the index has id ids[i].
RankedResult rank_row(const Eigen::Ref<const Eigen::VectorXd>& distances,
                      const std::vector<std::uint64_t>& ids, int k);

struct ArrReport {
  std::optional<int> k;  // empty: each query used K = its own class size
  double arr = 0.0;
  std::map<std::string, double> per_class;
  bool uniform_relevant = true;  // false when class sizes differ
  std::size_t queries = 0;
};

// Average retrieval rate: every image queries the full index (itself
// included), n_q counts retrieved images sharing its label among the K best,
// and ARR is the mean of n_q / N_R over all queries, N_R being the query's
// class size. Without k, K = N_R per query. Throws ParameterError for k < 1.
ArrReport evaluate_arr(const DescriptorIndex& index, std::optional<int> k = std::nullopt, int jobs = 0);
ArrReport evaluate_arr(const DescriptorIndex& index, const Eigen::MatrixXd& distances,
                       std::optional<int> k = std::nullopt);

// `class,rate` rows in label order followed by `ARR,<value>`; six decimals.
void write_arr_csv(const ArrReport& report, std::ostream& out);

}  // namespace sled
