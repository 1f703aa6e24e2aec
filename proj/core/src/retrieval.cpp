#include "sled/retrieval.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>

#include "sled/error.hpp"
#include "sled/imaging.hpp"
#include "sled/metric.hpp"
#include "sled/parallel.hpp"

namespace sled {
namespace {

std::vector<std::uint64_t> ids_of(const DescriptorIndex& index) {
  std::vector<std::uint64_t> ids;
  ids.reserve(index.entries.size());
  for (const auto& e : index.entries) ids.push_back(e.id);
  return ids;
}

void check_k(int k, std::size_t n) {
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw ParameterError("K must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  }
}

}  // namespace

const IndexEntry* DescriptorIndex::find(std::uint64_t id) const {
  auto it = std::find_if(entries.begin(), entries.end(), [&](const IndexEntry& e) { return e.id == id; });
  return it == entries.end() ? nullptr : &*it;
}

DescriptorIndex build_index(const DatasetManifest& manifest, const PipelineConfig& cfg, int jobs) {
  cfg.validate();
  if (manifest.entries.empty()) {
    throw DatasetError("manifest is empty");
  }
  DescriptorIndex index;
  index.config = cfg;
  index.entries.resize(manifest.entries.size());
  parallel_for(manifest.entries.size(), jobs, [&](std::size_t i) {
    const DatasetEntry& src = manifest.entries[i];
    try {
      index.entries[i] = {src.id, src.label, compute_descriptor(load_image(src.path), cfg)};
    } catch (const DecodeError& e) {
      throw DecodeError(e.path(), "image " + std::to_string(src.id) + ": " + e.reason());
    } catch (const Error& e) {
      // Degenerate sizes surface here, including scales that shrink the
      // image to nothing.
      throw DegenerateInputError("image " + std::to_string(src.id) + " (" + src.path.string() + "): " + e.what());
    }
  });
  return index;
}

RankedResult rank_row(const Eigen::Ref<const Eigen::VectorXd>& distances,
                      const std::vector<std::uint64_t>& ids, int k) {
  const auto n = static_cast<std::size_t>(distances.size());
  check_k(k, n);
  std::vector<Match> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = {ids[i], distances[static_cast<Eigen::Index>(i)]};
  auto closer = [](const Match& a, const Match& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  };
  std::partial_sort(all.begin(), all.begin() + k, all.end(), closer);
  all.resize(static_cast<std::size_t>(k));
  return all;
}

RankedResult query(const DescriptorIndex& index, const MultiscaleDescriptor& probe, int k) {
  check_k(k, index.size());
  if (probe.scales != index.config.scales) {
    throw IncompatibleDescriptorError("probe scales do not match the index configuration");
  }
  const PreparedDescriptor p = prepare(probe);
  Eigen::VectorXd d(static_cast<Eigen::Index>(index.size()));
  for (std::size_t i = 0; i < index.size(); ++i) {
    d[static_cast<Eigen::Index>(i)] = multiscale_distance(p, prepare(index.entries[i].descriptor));
  }
  return rank_row(d, ids_of(index), k);
}

Eigen::MatrixXd distance_matrix(const DescriptorIndex& index, int jobs) {
  const std::size_t n = index.size();
  std::vector<PreparedDescriptor> prepared(n);
  parallel_for(n, jobs, [&](std::size_t i) { prepared[i] = prepare(index.entries[i].descriptor); });

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  // Row i fills the upper triangle j > i; rows are independent.
  parallel_for(n, jobs, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = multiscale_distance(prepared[i], prepared[j]);
    }
  });
  d.triangularView<Eigen::StrictlyLower>() = d.transpose();
  return d;
}

ArrReport evaluate_arr(const DescriptorIndex& index, const Eigen::MatrixXd& distances, std::optional<int> k) {
  const std::size_t n = index.size();
  if (n == 0) throw DatasetError("cannot evaluate an empty index");
  if (k) check_k(*k, n);
  if (distances.rows() != static_cast<Eigen::Index>(n) || distances.cols() != static_cast<Eigen::Index>(n)) {
    throw ParameterError("distance matrix does not match the index size");
  }

  std::map<std::string, std::size_t> class_size;
  for (const auto& e : index.entries) ++class_size[e.label];

  ArrReport report;
  report.k = k;
  report.queries = n;
  report.uniform_relevant = std::adjacent_find(class_size.begin(), class_size.end(), [](const auto& a, const auto& b) {
                              return a.second != b.second;
                            }) == class_size.end();

  const std::vector<std::uint64_t> ids = ids_of(index);
  std::map<std::uint64_t, const std::string*> label_of;
  for (const auto& e : index.entries) label_of[e.id] = &e.label;

  std::map<std::string, double> class_sum;
  double total = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    const std::string& label = index.entries[q].label;
    const std::size_t relevant = class_size[label];
    const int kq = k ? *k : static_cast<int>(relevant);
    const RankedResult ranked = rank_row(distances.row(static_cast<Eigen::Index>(q)).transpose(), ids, kq);
    const auto hits = std::count_if(ranked.begin(), ranked.end(),
                                    [&](const Match& m) { return *label_of[m.id] == label; });
    const double rate = static_cast<double>(hits) / static_cast<double>(relevant);
    class_sum[label] += rate;
    total += rate;
  }
  for (const auto& [label, sum] : class_sum) {
    report.per_class[label] = sum / static_cast<double>(class_size[label]);
  }
  report.arr = total / static_cast<double>(n);
  return report;
}

ArrReport evaluate_arr(const DescriptorIndex& index, std::optional<int> k, int jobs) {
  if (k && *k < 1) throw ParameterError("K must be >= 1");
  return evaluate_arr(index, distance_matrix(index, jobs), k);
}

void write_arr_csv(const ArrReport& report, std::ostream& out) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(6);
  out << "class,rate\n";
  for (const auto& [label, rate] : report.per_class) out << label << ',' << rate << '\n';
  out << "ARR," << report.arr << '\n';
  out.flags(flags);
  out.precision(precision);
}

}  // namespace sled
