#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "sled/error.hpp"
#include "sled/metric.hpp"
#include "sled/retrieval.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"

namespace {

using namespace sled;
using sled::synthetic::Rng;
using sled::testing::TempDir;
namespace fs = std::filesystem;

void touch_ppm(const fs::path& p) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << "P6 1 1 255\n" << std::string(3, '\0');
}

MultiscaleDescriptor single(const Eigen::MatrixXd& m) {
  MultiscaleDescriptor d;
  d.scales = {1.0};
  d.matrices.push_back({m, 0.0, 0});
  return d;
}

DescriptorIndex random_index(std::size_t n, int dim, int classes, Rng& rng) {
  DescriptorIndex index;
  index.config.scales = {1.0};
  for (std::size_t i = 0; i < n; ++i) {
    index.entries.push_back({i, "c" + std::to_string(i % classes), single(synthetic::random_spd(dim, rng))});
  }
  return index;
}

std::vector<std::vector<double>> oracle_matrix(const DescriptorIndex& index) {
  const std::size_t n = index.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::size_t s = 0; s < index.config.scales.size(); ++s) {
        d[i][j] += oracle::riemannian_distance(index.entries[i].descriptor.matrices[s].matrix,
                                               index.entries[j].descriptor.matrices[s].matrix);
      }
    }
  }
  return d;
}

TEST(Labels, Rules) {
  EXPECT_EQ(label_for("/data/bark/img3.ppm", Labeling::kSubdir), "bark");
  EXPECT_EQ(label_for("/data/Bark.0000.03.ppm", Labeling::kStem), "Bark.0000");
  EXPECT_EQ(label_for("/data/plain.png", Labeling::kStem), "plain");
  EXPECT_EQ(label_for("/data/a.b.png", Labeling::kStem), "a.b");
  EXPECT_EQ(parse_labeling("stem"), Labeling::kStem);
  EXPECT_EQ(to_string(parse_labeling("subdir")), "subdir");
  EXPECT_THROW(parse_labeling("folder"), ParameterError);
}

TEST(Dataset, TwoClassesBySubdir) {
  TempDir dir;
  for (const char* c : {"alpha", "beta"})
    for (int i = 0; i < 3; ++i) touch_ppm(dir / c / ("img" + std::to_string(i) + ".ppm"));
  touch_ppm(dir / "alpha" / "notes.txt");
  const DatasetManifest m = scan_dataset(dir.path(), Labeling::kSubdir);
  EXPECT_EQ(m.total(), 6u);
  EXPECT_EQ(m.class_count(), 2u);
  EXPECT_EQ(m.uniform_class_size(), 3u);
  EXPECT_TRUE(m.warnings.empty());
  for (std::size_t i = 0; i < m.entries.size(); ++i) EXPECT_EQ(m.entries[i].id, i);
  EXPECT_EQ(m.entries.front().label, "alpha");
  EXPECT_EQ(m.entries.back().label, "beta");
}

TEST(Dataset, StemLayoutOf640) {
  TempDir dir;
  for (int c = 0; c < 40; ++c) {
    char cls[32];
    std::snprintf(cls, sizeof cls, "Class%02d.%04d", c, c);
    for (int i = 0; i < 16; ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "%s.%02d.ppm", cls, i);
      touch_ppm(dir / name);
    }
  }
  const DatasetManifest m = scan_dataset(dir.path(), Labeling::kStem);
  EXPECT_EQ(m.total(), 640u);
  EXPECT_EQ(m.class_count(), 40u);
  EXPECT_EQ(m.uniform_class_size(), 16u);
}

TEST(Dataset, SubdirLayoutOf2292) {
  TempDir dir;
  for (int c = 0; c < 191; ++c)
    for (int i = 0; i < 12; ++i) touch_ppm(dir / ("c" + std::to_string(c)) / (std::to_string(i) + ".png"));
  const DatasetManifest m = scan_dataset(dir.path(), Labeling::kSubdir);
  EXPECT_EQ(m.total(), 2292u);
  EXPECT_EQ(m.class_count(), 191u);
  EXPECT_EQ(m.uniform_class_size(), 12u);
}

TEST(Dataset, Problems) {
  TempDir dir;
  EXPECT_THROW(scan_dataset(dir / "missing", Labeling::kSubdir), DatasetError);
  try {
    scan_dataset(dir.path(), Labeling::kSubdir);
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("no images found"), std::string::npos);
  }
  touch_ppm(dir / "a" / "1.ppm");
  touch_ppm(dir / "a" / "2.ppm");
  touch_ppm(dir / "b" / "1.ppm");
  const DatasetManifest m = scan_dataset(dir.path(), Labeling::kSubdir);
  EXPECT_FALSE(m.uniform_class_size().has_value());
  EXPECT_EQ(m.warnings.size(), 2u);
  touch_ppm(dir / "loose.ppm");
  EXPECT_THROW(scan_dataset(dir.path(), Labeling::kSubdir), DatasetError);
}

TEST(BuildIndex, EntriesFollowManifestAndJobs) {
  TempDir dir;
  Rng rng(1);
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "b");
  for (int i = 0; i < 4; ++i)
    save_ppm(synthetic::random_rgb(48, 48, rng), dir / (i < 2 ? "a" : "b") / (std::to_string(i) + ".ppm"));
  const DatasetManifest m = scan_dataset(dir.path(), Labeling::kSubdir);
  ASSERT_EQ(m.total(), 4u);
  const DescriptorIndex one = build_index(m, PipelineConfig{}, 1);
  const DescriptorIndex many = build_index(m, PipelineConfig{}, 4);
  EXPECT_EQ(one, many);
  ASSERT_EQ(one.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(one.entries[i].id, m.entries[i].id);
    EXPECT_EQ(one.entries[i].label, m.entries[i].label);
    EXPECT_EQ(one.entries[i].descriptor.matrices.size(), 3u);
  }
  EXPECT_EQ(one.config, PipelineConfig{});
}

TEST(BuildIndex, TwoImages) {
  TempDir dir;
  Rng rng(2);
  fs::create_directories(dir / "k");
  save_ppm(synthetic::random_rgb(40, 40, rng), dir / "k" / "a.ppm");
  save_ppm(synthetic::random_rgb(40, 40, rng), dir / "k" / "b.ppm");
  EXPECT_EQ(build_index(scan_dataset(dir.path(), Labeling::kSubdir), PipelineConfig{}).size(), 2u);
}

TEST(BuildIndex, FailingImageAbortsWithItsId) {
  TempDir dir;
  Rng rng(3);
  fs::create_directories(dir / "k");
  save_ppm(synthetic::random_rgb(40, 40, rng), dir / "k" / "a.ppm");
  touch_ppm(dir / "k" / "b.ppm");  // 1x1 cannot yield two blocks
  {
    std::ofstream bad(dir / "k" / "c.ppm");
    bad << "not an image";
  }
  const DatasetManifest m = scan_dataset(dir.path(), Labeling::kSubdir);
  try {
    build_index(m, PipelineConfig{}, 1);
    FAIL();
  } catch (const DegenerateInputError& e) {
    EXPECT_NE(std::string(e.what()).find("image 1"), std::string::npos) << e.what();
  }
  DatasetManifest only_bad = m;
  only_bad.entries.erase(only_bad.entries.begin(), only_bad.entries.begin() + 2);
  try {
    build_index(only_bad, PipelineConfig{}, 1);
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_NE(std::string(e.what()).find("image 2"), std::string::npos) << e.what();
  }
}

TEST(Query, SelfMatch) {
  Rng rng(4);
  const DescriptorIndex index = random_index(10, 20, 3, rng);
  const RankedResult r = query(index, index.entries[7].descriptor, 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].id, 7u);
  EXPECT_LE(r[0].distance, 1e-10);
}

TEST(Query, TiesByAscendingId) {
  Rng rng(5);
  const Eigen::MatrixXd m = synthetic::random_spd(20, rng);
  DescriptorIndex index;
  index.config.scales = {1.0};
  for (std::uint64_t id : {9, 3, 5, 1, 7, 2}) index.entries.push_back({id, "x", single(m)});
  const RankedResult r = query(index, single(m), 5);
  const std::vector<std::uint64_t> ids = {1, 2, 3, 5, 7};
  ASSERT_EQ(r.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r[i].id, ids[i]);
    EXPECT_LE(r[i].distance, 1e-10);
  }
}

TEST(Query, MatchesFullSortOracle) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const DescriptorIndex index = random_index(10, 5, 2, rng);
    const MultiscaleDescriptor probe = single(synthetic::random_spd(5, rng));
    std::vector<Match> all;
    for (const auto& e : index.entries)
      all.push_back({e.id, oracle::riemannian_distance(probe.matrices[0].matrix, e.descriptor.matrices[0].matrix)});
    std::stable_sort(all.begin(), all.end(), [](const Match& a, const Match& b) { return a.distance < b.distance; });
    const RankedResult r = query(index, probe, 10);
    ASSERT_EQ(r.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_EQ(r[i].id, all[i].id) << "case " << t << " rank " << i;
      EXPECT_NEAR(r[i].distance, all[i].distance, 1e-8);
      if (i > 0) EXPECT_LE(r[i - 1].distance, r[i].distance);
    }
  }
}

TEST(Query, InvariantToEntryOrder) {
  Rng rng(7);
  DescriptorIndex index = random_index(12, 6, 3, rng);
  const Eigen::MatrixXd dup = index.entries[4].descriptor.matrices[0].matrix;
  index.entries[9].descriptor = single(dup);  // a genuine tie
  const MultiscaleDescriptor probe = single(dup);
  const RankedResult before = query(index, probe, 12);
  std::shuffle(index.entries.begin(), index.entries.end(), rng);
  EXPECT_EQ(query(index, probe, 12), before);
  EXPECT_EQ(before[0].id, 4u);
  EXPECT_EQ(before[1].id, 9u);
}

TEST(Query, Errors) {
  Rng rng(8);
  const DescriptorIndex index = random_index(4, 5, 2, rng);
  const MultiscaleDescriptor probe = index.entries[0].descriptor;
  EXPECT_THROW(query(index, probe, 0), ParameterError);
  EXPECT_THROW(query(index, probe, 5), ParameterError);
  MultiscaleDescriptor other = probe;
  other.scales = {1.5};
  EXPECT_THROW(query(index, other, 1), IncompatibleDescriptorError);
}

TEST(DistanceMatrix, SymmetricZeroDiagonalAndJobIndependent) {
  Rng rng(9);
  const DescriptorIndex index = random_index(15, 20, 3, rng);
  const Eigen::MatrixXd d = distance_matrix(index, 1);
  EXPECT_EQ(d, d.transpose());
  EXPECT_TRUE(d.diagonal().isZero(0.0));
  EXPECT_EQ(d, distance_matrix(index, 3));
  const auto ref = oracle_matrix(index);
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) EXPECT_NEAR(d(i, j), ref[i][j], 1e-8);
}

TEST(Arr, DuplicateClassesScorePerfectly) {
  Rng rng(10);
  DescriptorIndex index;
  index.config.scales = {1.0};
  std::uint64_t id = 0;
  for (int c = 0; c < 4; ++c) {
    const Eigen::MatrixXd m = synthetic::random_spd(20, rng);
    for (int i = 0; i < 5; ++i) index.entries.push_back({id++, "class" + std::to_string(c), single(m)});
  }
  const ArrReport r = evaluate_arr(index);
  EXPECT_EQ(r.arr, 1.0);
  EXPECT_EQ(r.per_class.size(), 4u);
  for (const auto& [label, rate] : r.per_class) EXPECT_EQ(rate, 1.0);
  EXPECT_FALSE(r.k.has_value());
}

TEST(Arr, Properties) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const DescriptorIndex index = random_index(12, 5, 3, rng);
    const Eigen::MatrixXd d = distance_matrix(index);
    double previous = 0.0;
    for (int k = 1; k <= 12; ++k) {
      const ArrReport r = evaluate_arr(index, d, k);
      EXPECT_GE(r.arr, previous);
      EXPECT_GE(r.arr, 0.0);
      EXPECT_LE(r.arr, 1.0);
      previous = r.arr;
      double weighted = 0.0;
      for (const auto& [label, rate] : r.per_class) weighted += rate * 4.0;  // four per class
      EXPECT_NEAR(weighted / 12.0, r.arr, 1e-12);
    }
    EXPECT_EQ(evaluate_arr(index, d, 12).arr, 1.0);
  }
}

TEST(Arr, MatchesIndependentComputation) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    DescriptorIndex index = random_index(14, 5, 4, rng);  // sizes 4,4,3,3
    std::vector<std::string> labels;
    std::vector<std::uint64_t> ids;
    for (const auto& e : index.entries) {
      labels.push_back(e.label);
      ids.push_back(e.id);
    }
    const auto ref = oracle_matrix(index);
    const ArrReport r = evaluate_arr(index);
    EXPECT_FALSE(r.uniform_relevant);
    EXPECT_NEAR(r.arr, oracle::arr(ref, labels, ids, 0), 1e-12);
    EXPECT_NEAR(evaluate_arr(index, std::optional<int>{3}).arr, oracle::arr(ref, labels, ids, 3), 1e-12);
  }
}

TEST(Arr, Errors) {
  Rng rng(13);
  const DescriptorIndex index = random_index(4, 5, 2, rng);
  EXPECT_THROW(evaluate_arr(index, std::optional<int>{0}), ParameterError);
  EXPECT_THROW(evaluate_arr(DescriptorIndex{}), DatasetError);
}

TEST(Arr, CsvLayout) {
  ArrReport r;
  r.k = 2;
  r.arr = 0.75;
  r.per_class = {{"a", 1.0}, {"b", 0.5}};
  std::ostringstream out;
  out.precision(3);
  write_arr_csv(r, out);
  EXPECT_EQ(out.str(), "class,rate\na,1.000000\nb,0.500000\nARR,0.750000\n");
  EXPECT_EQ(out.precision(), 3);
}

}  // namespace
