#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "numerics/tensor.hpp"
#include "semantic/prompts.hpp"

namespace agiqa::semantic {

// Binary container, all integers little-endian:
//
//   "MAFC" | version u16 = 1 | hidden_size u32 | entry_count u64 |
//   entry_count x ( id_len u8 | id bytes | tag u8 | hidden_size x f32 ) |
//   CRC32 u32 over every preceding byte
//
// The same container holds semantic features (tags a, b) and quality
// features (tag q).

inline constexpr char kCacheMagic[4] = {'M', 'A', 'F', 'C'};
inline constexpr std::uint16_t kCacheVersion = 1;
inline constexpr std::size_t kCacheHeaderSize = 4 + 2 + 4 + 8;
inline constexpr std::size_t kMaxIdBytes = 255;

struct CacheEntry {
  std::string image_id;
  Tag tag = Tag::kSemantic;
  std::vector<float> vec;

  friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

/// Serializes entries; validates non-empty, unique keys, uniform width.
std::vector<std::uint8_t> encode_cache(std::span<const CacheEntry> entries);
/// Parses and validates magic, version, checksum, then entries. Fails closed:
/// no entries are returned from a damaged buffer.
std::vector<CacheEntry> decode_cache(std::span<const std::uint8_t> bytes);

/// Atomic write; returns the CRC32 trailer.
std::uint32_t cache_write(const std::filesystem::path& path, std::span<const CacheEntry> entries);
std::vector<CacheEntry> cache_read(const std::filesystem::path& path);

/// Header fields and checksum status, reported even when the payload is bad.
struct CacheSummary {
  bool magic_ok = false;
  std::uint16_t version = 0;
  std::uint32_t hidden_size = 0;
  std::uint64_t entry_count = 0;
  std::uint64_t count_a = 0;
  std::uint64_t count_b = 0;
  std::uint64_t count_q = 0;
  bool checksum_ok = false;
  std::uint32_t stored_crc = 0;
  std::uint32_t computed_crc = 0;
  std::uint64_t file_size = 0;
  std::string problem;  // empty when the file fully validates
};

CacheSummary inspect_cache(std::span<const std::uint8_t> bytes);

/// Parsed, indexed cache; read-only after construction.
class FeatureCache {
 public:
  FeatureCache() = default;
  explicit FeatureCache(std::vector<CacheEntry> entries);
  static FeatureCache load(const std::filesystem::path& path);

  std::uint32_t hidden_size() const noexcept { return hidden_size_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<CacheEntry>& entries() const noexcept { return entries_; }

  bool contains(const std::string& image_id, Tag tag) const;
  /// Vector for (id, tag); not-found error lists the nearest known ids.
  nn::Tensor1 get(const std::string& image_id, Tag tag) const;
  /// Stored f32 payload for (id, tag), or nullptr.
  const std::vector<float>* find(const std::string& image_id, Tag tag) const;
  /// (f_a, f_b) in tag order; partial-feature error names a missing tag.
  std::pair<nn::Tensor1, nn::Tensor1> lookup(const std::string& image_id) const;

  /// Up to `k` known ids closest to `image_id` by edit distance.
  std::vector<std::string> nearest_ids(const std::string& image_id, std::size_t k = 3) const;

 private:
  std::vector<CacheEntry> entries_;
  std::map<std::pair<std::string, Tag>, std::size_t> index_;
  std::uint32_t hidden_size_ = 0;
};

}  // namespace agiqa::semantic
