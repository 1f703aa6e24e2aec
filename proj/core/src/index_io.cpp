#include "sled/index_io.hpp"

#include <boost/crc.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <string>

#include "sled/error.hpp"

namespace sled {
namespace {

static_assert(std::endian::native == std::endian::little, "index I/O assumes a little-endian host");

constexpr std::size_t kMatrixDim = kSledDim;
constexpr std::size_t kValuesPerScale = symmetric_parameter_count(kMatrixDim);
constexpr std::size_t kCrcSize = 4;

using Kind = IndexFormatError::Kind;

class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }
  std::span<const std::uint8_t> view() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

// Bounds-checked cursor. Running off the end raises kTruncated.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string get_string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (n > bytes_.size() - pos_) throw IndexFormatError(Kind::kTruncated, "index file is truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

PipelineConfig read_config(Reader& in) {
  PipelineConfig cfg;
  cfg.window = static_cast<int>(in.get<std::uint32_t>());
  cfg.block_size = static_cast<int>(in.get<std::uint32_t>());
  cfg.overlap = in.get<double>();
  const auto n_scales = in.get<std::uint32_t>();
  cfg.scales.clear();
  for (std::uint32_t i = 0; i < n_scales; ++i) cfg.scales.push_back(in.get<double>());
  cfg.epsilon_scale = in.get<double>();
  cfg.strict_extrema = in.get<std::uint8_t>() != 0;
  return cfg;
}

// Walks the layout without materialising matrices; returns the offset where
// the checksum should start.
std::size_t payload_length(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.skip(sizeof(kIndexMagic));
  const PipelineConfig cfg = read_config(in);
  const auto count = in.get<std::uint64_t>();
  for (std::uint64_t e = 0; e < count; ++e) {
    in.skip(sizeof(std::uint64_t));
    in.skip(in.get<std::uint32_t>());
    in.skip(cfg.scales.size() * kValuesPerScale * sizeof(double));
  }
  return in.position();
}

}  // namespace

std::uint32_t crc32c(std::span<const std::uint8_t> bytes) {
  boost::crc_optimal<32, 0x1EDC6F41, 0xFFFFFFFF, 0xFFFFFFFF, true, true> crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::vector<std::uint8_t> encode_index(const DescriptorIndex& index) {
  const PipelineConfig& cfg = index.config;
  Writer out;
  out.put_bytes(std::string_view(kIndexMagic, sizeof(kIndexMagic)));
  out.put(static_cast<std::uint32_t>(cfg.window));
  out.put(static_cast<std::uint32_t>(cfg.block_size));
  out.put(cfg.overlap);
  out.put(static_cast<std::uint32_t>(cfg.scales.size()));
  for (double s : cfg.scales) out.put(s);
  out.put(cfg.epsilon_scale);
  out.put(static_cast<std::uint8_t>(cfg.strict_extrema ? 1 : 0));

  out.put(static_cast<std::uint64_t>(index.entries.size()));
  for (const IndexEntry& e : index.entries) {
    if (e.descriptor.matrices.size() != cfg.scales.size() || e.descriptor.scales != cfg.scales) {
      throw ParameterError("entry " + std::to_string(e.id) + " does not match the index scale list");
    }
    out.put(e.id);
    out.put(static_cast<std::uint32_t>(e.label.size()));
    out.put_bytes(e.label);
    for (const CovarianceDescriptor& c : e.descriptor.matrices) {
      if (c.matrix.rows() != static_cast<Eigen::Index>(kMatrixDim) ||
          c.matrix.cols() != static_cast<Eigen::Index>(kMatrixDim)) {
        throw ParameterError("entry " + std::to_string(e.id) + " holds a non 20x20 matrix");
      }
      for (Eigen::Index r = 0; r < c.matrix.rows(); ++r) {
        for (Eigen::Index col = r; col < c.matrix.cols(); ++col) out.put(c.matrix(r, col));
      }
    }
  }
  out.put(crc32c(out.view()));
  return out.take();
}

DescriptorIndex decode_index(std::span<const std::uint8_t> bytes) {
  const std::string_view magic(kIndexMagic, sizeof(kIndexMagic));
  const std::size_t prefix = std::min(bytes.size(), magic.size());
  const std::string_view head(reinterpret_cast<const char*>(bytes.data()), prefix);
  if (head.substr(0, std::min<std::size_t>(prefix, 7)) != magic.substr(0, std::min<std::size_t>(prefix, 7))) {
    throw IndexFormatError(Kind::kBadMagic, "not a SLED index file (bad magic)");
  }
  if (bytes.size() < magic.size()) {
    throw IndexFormatError(Kind::kTruncated, "index file is truncated");
  }
  if (head != magic) {
    throw IndexFormatError(Kind::kVersionMismatch,
                           "unsupported index version '" + std::string(1, head.back()) + "' (expected '1')");
  }

  const std::size_t payload = payload_length(bytes);  // may throw kTruncated
  if (bytes.size() < payload + kCrcSize) {
    throw IndexFormatError(Kind::kTruncated, "index file is truncated (missing checksum)");
  }
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + payload, kCrcSize);
  if (stored != crc32c(bytes.first(payload))) {
    throw IndexFormatError(Kind::kChecksumMismatch, "index checksum mismatch");
  }
  if (bytes.size() != payload + kCrcSize) {
    throw IndexFormatError(Kind::kMalformed, "trailing bytes after index checksum");
  }

  Reader in(bytes.first(payload));
  in.skip(magic.size());
  DescriptorIndex index;
  index.config = read_config(in);
  try {
    index.config.validate();
  } catch (const ParameterError& e) {
    throw IndexFormatError(Kind::kMalformed, std::string("invalid stored config: ") + e.what());
  }
  const auto count = in.get<std::uint64_t>();
  std::set<std::uint64_t> seen;
  index.entries.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    IndexEntry e;
    e.id = in.get<std::uint64_t>();
    if (!seen.insert(e.id).second) {
      throw IndexFormatError(Kind::kMalformed, "duplicate entry id " + std::to_string(e.id));
    }
    e.label = in.get_string(in.get<std::uint32_t>());
    e.descriptor.scales = index.config.scales;
    for (std::size_t s = 0; s < index.config.scales.size(); ++s) {
      Eigen::MatrixXd m(kMatrixDim, kMatrixDim);
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = r; c < m.cols(); ++c) m(r, c) = m(c, r) = in.get<double>();
      }
      e.descriptor.matrices.push_back({std::move(m), 0.0, 0});
    }
    index.entries.push_back(std::move(e));
  }
  if (index.entries.empty()) {
    throw IndexFormatError(Kind::kMalformed, "index holds no entries");
  }
  return index;
}

void save_index(const DescriptorIndex& index, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_index(index);
  // Write to a sibling and rename so a failed write never leaves a partial index.
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IndexFormatError(Kind::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IndexFormatError(Kind::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IndexFormatError(Kind::kIo, "cannot move index into place at " + path.string() + ": " + ec.message());
}

DescriptorIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexFormatError(Kind::kIo, "cannot open index " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_index(bytes);
}

}  // namespace sled
