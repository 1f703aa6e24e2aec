#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "sled/config_file.hpp"
#include "sled/error.hpp"
#include "sled/index_io.hpp"
#include "sled/metric.hpp"
#include "sled/retrieval.hpp"

namespace sled::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ConfigOverrides {
  std::string config_file;
  std::optional<int> window;
  std::optional<int> block_size;
  std::optional<double> overlap;
  std::optional<std::string> scales;
  std::optional<double> epsilon_scale;
  std::optional<bool> strict_extrema;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config_file, "key=value config file applied over the built-in defaults")
        ->check(CLI::ExistingFile);
    cmd.add_option("-w,--window", window, "Extrema search window, odd >= 3 (default 3)");
    cmd.add_option("--block-size", block_size, "Block side W in pixels (default 32)");
    cmd.add_option("--overlap", overlap, "Overlap between consecutive blocks in [0,1) (default 0.5)");
    cmd.add_option("--scales", scales, "Comma separated scale factors; fractions allowed (default 2/3,1,3/2)");
    cmd.add_option("--epsilon-scale", epsilon_scale,
                   "Diagonal regularisation relative to trace/20 (default 1e-6)");
    cmd.add_option("--strict-extrema", strict_extrema,
                   "Require strict dominance for extrema; false lets ties count (default true)");
  }

  // defaults < config file < flags
  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_file.empty()) apply_config_file(config_file, cfg);
    if (window) cfg.window = *window;
    if (block_size) cfg.block_size = *block_size;
    if (overlap) cfg.overlap = *overlap;
    if (scales) cfg.scales = parse_scales(*scales);
    if (epsilon_scale) cfg.epsilon_scale = *epsilon_scale;
    if (strict_extrema) cfg.strict_extrema = *strict_extrema;
    cfg.validate();
    return cfg;
  }
};

void print_config(const PipelineConfig& cfg, std::ostream& out) {
  out << "config: w=" << cfg.window << " W=" << cfg.block_size << " overlap=" << cfg.overlap
      << " scales=" << format_scales(cfg.scales) << " epsilon_scale=" << cfg.epsilon_scale
      << " strict_extrema=" << (cfg.strict_extrema ? "true" : "false") << '\n';
}

void require_writable_parent(const fs::path& out) {
  const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) {
    throw ParameterError("output directory does not exist: " + parent.string());
  }
}

struct IndexArgs {
  std::string dataset;
  std::string labeling = "subdir";
  std::string out;
  int jobs = 0;
  ConfigOverrides overrides;
};

int cmd_index(const IndexArgs& args, std::ostream& out) {
  const PipelineConfig cfg = args.overrides.resolve();
  const Labeling labeling = parse_labeling(args.labeling);
  require_writable_parent(args.out);

  const DatasetManifest manifest = scan_dataset(args.dataset, labeling);
  for (const auto& w : manifest.warnings) out << "warning: " << w << '\n';
  out << "N_t=" << manifest.total() << " N_c=" << manifest.class_count();
  if (const auto nr = manifest.uniform_class_size()) out << " N_R=" << *nr;
  out << '\n';
  print_config(cfg, out);

  const auto start = Clock::now();
  const DescriptorIndex index = build_index(manifest, cfg, args.jobs);
  const double fe = seconds_since(start);
  save_index(index, args.out);

  out << std::fixed << std::setprecision(4);
  out << "feature extraction: " << fe << " s total, " << fe / static_cast<double>(manifest.total())
      << " s/image\n";
  out << std::defaultfloat;
  out << "wrote " << index.size() << " entries to " << args.out << '\n';
  return kOk;
}

struct EvaluateArgs {
  std::string index;
  std::optional<int> k;
  std::string csv;
  int jobs = 0;
};

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
  if (args.k && *args.k < 1) throw ParameterError("--k must be >= 1");
  if (!args.csv.empty()) require_writable_parent(args.csv);
  const DescriptorIndex index = load_index(args.index);

  const auto start = Clock::now();
  const Eigen::MatrixXd distances = distance_matrix(index, args.jobs);
  const double dm = seconds_since(start);
  const ArrReport report = evaluate_arr(index, distances, args.k);

  std::map<std::string, std::size_t> sizes;
  for (const auto& e : index.entries) ++sizes[e.label];
  out << "N_t=" << index.size() << " N_c=" << sizes.size() << " K="
      << (report.k ? std::to_string(*report.k) : std::string("N_R")) << '\n';
  if (!report.uniform_relevant) out << "warning: class sizes differ; N_R taken per query\n";
  out << std::fixed << std::setprecision(4);
  out << "dissimilarity measurement: " << dm << " s total, " << dm / static_cast<double>(index.size())
      << " s/image\n";
  out << std::defaultfloat;

  if (!args.csv.empty()) {
    std::ofstream csv(args.csv);
    if (!csv) throw ParameterError("cannot write " + args.csv);
    write_arr_csv(report, csv);
    out << "wrote per-class rates to " << args.csv << '\n';
  }
  write_arr_csv(report, out);
  return kOk;
}

struct QueryArgs {
  std::string index;
  std::string image;
  int k = 0;
};

int cmd_query(const QueryArgs& args, std::ostream& out) {
  const DescriptorIndex index = load_index(args.index);
  if (args.k < 1 || static_cast<std::size_t>(args.k) > index.size()) {
    throw ParameterError("--k must lie in [1, " + std::to_string(index.size()) + "], got " +
                         std::to_string(args.k));
  }
  const MultiscaleDescriptor probe = compute_descriptor(load_image(args.image), index.config);
  const RankedResult ranked = query(index, probe, args.k);
  out << std::fixed << std::setprecision(6);
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const IndexEntry* e = index.find(ranked[r].id);
    out << (r + 1) << ',' << ranked[r].id << ',' << e->label << ',' << ranked[r].distance << '\n';
  }
  out << std::defaultfloat;
  return kOk;
}

struct DistanceArgs {
  std::string index;
  std::uint64_t id_a = 0;
  std::uint64_t id_b = 0;
};

class UnknownId : public Error {
 public:
  using Error::Error;
};

int cmd_distance(const DistanceArgs& args, std::ostream& out) {
  const DescriptorIndex index = load_index(args.index);
  const IndexEntry* a = index.find(args.id_a);
  const IndexEntry* b = index.find(args.id_b);
  if (!a) throw UnknownId("unknown id " + std::to_string(args.id_a));
  if (!b) throw UnknownId("unknown id " + std::to_string(args.id_b));

  const std::vector<double> per_scale = per_scale_distances(a->descriptor, b->descriptor);
  double total = 0.0;
  out << std::setprecision(12);
  for (std::size_t s = 0; s < per_scale.size(); ++s) {
    out << "scale," << a->descriptor.scales[s] << ',' << per_scale[s] << '\n';
    total += per_scale[s];
  }
  out << "total," << total << '\n';
  out << std::setprecision(6);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Texture retrieval with multiscale local extrema covariance descriptors", "sled"};
  app.require_subcommand(1);

  IndexArgs index_args;
  auto* index_cmd = app.add_subcommand("index", "Describe every image of a labelled dataset and write an index");
  index_cmd->add_option("--dataset", index_args.dataset, "Dataset root directory")->required();
  index_cmd->add_option("--labeling", index_args.labeling,
                        "Class label rule: subdir (parent directory) or stem (file name minus .NNNN)")
      ->check(CLI::IsMember({"subdir", "stem"}))
      ->capture_default_str();
  index_cmd->add_option("--out", index_args.out, "Index file to write")->required();
  index_cmd->add_option("--jobs", index_args.jobs, "Worker threads, 0 = all cores")->capture_default_str();
  index_args.overrides.attach(*index_cmd);

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Average retrieval rate of an index queried against itself");
  eval_cmd->add_option("--index", eval_args.index, "Index file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--k", eval_args.k, "Images retrieved per query (default N_R, the class size)");
  eval_cmd->add_option("--out", eval_args.csv, "Also write the class,rate CSV to this file");
  eval_cmd->add_option("--jobs", eval_args.jobs, "Worker threads, 0 = all cores")->capture_default_str();

  QueryArgs query_args;
  auto* query_cmd = app.add_subcommand("query", "Rank the index against one image");
  query_cmd->add_option("--index", query_args.index, "Index file")->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--image", query_args.image, "Probe image (PPM or PNG)")->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--k", query_args.k, "Number of matches to print")->required();

  DistanceArgs dist_args;
  auto* dist_cmd = app.add_subcommand("distance", "Multiscale distance between two indexed images");
  dist_cmd->add_option("--index", dist_args.index, "Index file")->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("id_a", dist_args.id_a, "First image id")->required();
  dist_cmd->add_option("id_b", dist_args.id_b, "Second image id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*index_cmd) return cmd_index(index_args, out);
    if (*eval_cmd) return cmd_evaluate(eval_args, out);
    if (*query_cmd) return cmd_query(query_args, out);
    if (*dist_cmd) return cmd_distance(dist_args, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const MetricError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace sled::cli
