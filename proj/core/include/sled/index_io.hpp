#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sled/retrieval.hpp"

namespace sled {

// Binary index layout, little-endian:
//   "SLEDIDX1"
//   u32 window, u32 block_size, f64 overlap, u32 n_scales, f64 scales[n],
//   f64 epsilon_scale, u8 strict_extrema
//   u64 entry count
//   per entry: u64 id, u32 label length, label bytes (UTF-8),
//              per scale 210 f64 (upper triangle of the 20x20 matrix, row-major)
//   u32 CRC-32C of every preceding byte
inline constexpr char kIndexMagic[8] = {'S', 'L', 'E', 'D', 'I', 'D', 'X', '1'};

// CRC-32C (Castagnoli), reflected, init and xor-out 0xFFFFFFFF.
std::uint32_t crc32c(std::span<const std::uint8_t> bytes);

// Throws ParameterError when an entry's matrices are not 20x20 or its scale
// count disagrees with the config.
std::vector<std::uint8_t> encode_index(const DescriptorIndex& index);

// Throws IndexFormatError; kind() tells bad magic, version mismatch,
// truncation, checksum failure and malformed content apart.
DescriptorIndex decode_index(std::span<const std::uint8_t> bytes);

void save_index(const DescriptorIndex& index, const std::filesystem::path& path);
DescriptorIndex load_index(const std::filesystem::path& path);

}  // namespace sled
