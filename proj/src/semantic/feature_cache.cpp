#include "semantic/feature_cache.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <set>

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace agiqa::semantic {

namespace {

std::string key_name(const std::string& id, Tag tag) {
  return "('" + id + "', " + tag_char(tag) + ")";
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::vector<std::uint8_t> encode_cache(std::span<const CacheEntry> entries) {
  if (entries.empty()) fail(ErrorCode::kInvalidArgument, "cache_write: no entries to write");
  const std::size_t hidden = entries.front().vec.size();
  if (hidden == 0 || hidden > UINT32_MAX) {
    fail(ErrorCode::kFormat, "cache_write: hidden_size must be in [1, 2^32), got " +
                                 std::to_string(hidden));
  }
  std::set<std::pair<std::string, Tag>> seen;
  for (const auto& e : entries) {
    if (e.vec.size() != hidden) {
      fail(ErrorCode::kFormat, "cache_write: entry " + key_name(e.image_id, e.tag) + " has " +
                                   std::to_string(e.vec.size()) + " values, expected hidden_size " +
                                   std::to_string(hidden));
    }
    if (e.image_id.empty() || e.image_id.size() > kMaxIdBytes) {
      fail(ErrorCode::kFormat, "cache_write: image_id must be 1..255 bytes, got " +
                                   std::to_string(e.image_id.size()));
    }
    if (!tag_from_byte(static_cast<std::uint8_t>(e.tag))) {
      fail(ErrorCode::kFormat, "cache_write: unknown tag byte " +
                                   std::to_string(static_cast<int>(e.tag)));
    }
    if (!seen.emplace(e.image_id, e.tag).second) {
      fail(ErrorCode::kConflict, "cache_write: duplicate entry " + key_name(e.image_id, e.tag));
    }
  }

  io::ByteWriter w;
  w.put_bytes(std::string_view(kCacheMagic, 4));
  w.put<std::uint16_t>(kCacheVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(hidden));
  w.put<std::uint64_t>(entries.size());
  for (const auto& e : entries) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(e.image_id.size()));
    w.put_bytes(e.image_id);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(e.tag));
    for (float v : e.vec) w.put<float>(v);
  }
  w.seal_with_crc();
  return w.release();
}

std::vector<CacheEntry> decode_cache(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCacheMagic, 4) != 0) {
    fail_at(ErrorCode::kMagic, 0, "not a feature cache: expected magic \"MAFC\"");
  }
  if (bytes.size() < 6) {
    fail_at(ErrorCode::kChecksum, bytes.size(), "file truncated inside the header");
  }
  std::uint16_t version;
  std::memcpy(&version, bytes.data() + 4, 2);
  if (version != kCacheVersion) {
    fail_at(ErrorCode::kVersion, 4,
            "cache version " + std::to_string(version) + " is not supported (supported versions: " +
                std::to_string(kCacheVersion) + ")");
  }
  if (bytes.size() < kCacheHeaderSize + 4) {
    fail_at(ErrorCode::kChecksum, bytes.size(), "file truncated: too short for header and checksum");
  }
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  const std::uint32_t computed = io::crc32(bytes.first(body));
  if (stored != computed) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "checksum mismatch: stored %08x, computed %08x", stored, computed);
    fail_at(ErrorCode::kChecksum, body, msg);
  }

  io::ByteReader r(bytes.first(body));
  r.get_string(4, "magic");
  r.get<std::uint16_t>("version");
  const auto hidden = r.get<std::uint32_t>("hidden_size");
  const auto count = r.get<std::uint64_t>("entry_count");
  if (hidden == 0) fail_at(ErrorCode::kFormat, 6, "hidden_size is zero");
  const std::uint64_t min_entry = 1 + 1 + 1 + 4ull * hidden;
  if (count == 0 || count > r.remaining() / min_entry) {
    fail_at(ErrorCode::kFormat, 10, "entry_count " + std::to_string(count) +
                                        " is inconsistent with the file size");
  }

  std::vector<CacheEntry> out;
  out.reserve(count);
  std::set<std::pair<std::string, Tag>> seen;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t entry_offset = r.offset();
    const auto id_len = r.get<std::uint8_t>("id_len");
    if (id_len == 0) fail_at(ErrorCode::kFormat, entry_offset, "empty image_id");
    CacheEntry e;
    e.image_id = r.get_string(id_len, "image_id");
    const std::size_t tag_offset = r.offset();
    const auto tag = tag_from_byte(r.get<std::uint8_t>("tag"));
    if (!tag) fail_at(ErrorCode::kFormat, tag_offset, "unknown tag byte");
    e.tag = *tag;
    e.vec.resize(hidden);
    for (auto& v : e.vec) v = r.get<float>("payload");
    if (!seen.emplace(e.image_id, e.tag).second) {
      fail_at(ErrorCode::kFormat, entry_offset, "duplicate entry " + key_name(e.image_id, e.tag));
    }
    out.push_back(std::move(e));
  }
  if (r.remaining() != 0) {
    fail_at(ErrorCode::kFormat, r.offset(),
            std::to_string(r.remaining()) + " trailing bytes after the last entry");
  }
  return out;
}

std::uint32_t cache_write(const std::filesystem::path& path, std::span<const CacheEntry> entries) {
  const auto bytes = encode_cache(entries);
  io::write_file_atomic(path, bytes);
  std::uint32_t crc;
  std::memcpy(&crc, bytes.data() + bytes.size() - 4, 4);
  return crc;
}

std::vector<CacheEntry> cache_read(const std::filesystem::path& path) {
  return decode_cache(io::read_file(path));
}

CacheSummary inspect_cache(std::span<const std::uint8_t> bytes) {
  CacheSummary s;
  s.file_size = bytes.size();
  s.magic_ok = bytes.size() >= 4 && std::memcmp(bytes.data(), kCacheMagic, 4) == 0;
  if (bytes.size() >= kCacheHeaderSize) {
    std::memcpy(&s.version, bytes.data() + 4, 2);
    std::memcpy(&s.hidden_size, bytes.data() + 6, 4);
    std::memcpy(&s.entry_count, bytes.data() + 10, 8);
  }
  if (bytes.size() >= 4) {
    std::memcpy(&s.stored_crc, bytes.data() + bytes.size() - 4, 4);
    s.computed_crc = io::crc32(bytes.first(bytes.size() - 4));
    s.checksum_ok = s.stored_crc == s.computed_crc;
  }
  try {
    for (const auto& e : decode_cache(bytes)) {
      switch (e.tag) {
        case Tag::kSemantic: ++s.count_a; break;
        case Tag::kCoherence: ++s.count_b; break;
        case Tag::kQuality: ++s.count_q; break;
      }
    }
  } catch (const Error& err) {
    s.problem = err.what();
    if (err.code() == ErrorCode::kChecksum) s.checksum_ok = false;
  }
  return s;
}

FeatureCache::FeatureCache(std::vector<CacheEntry> entries) : entries_(std::move(entries)) {
  if (!entries_.empty()) hidden_size_ = static_cast<std::uint32_t>(entries_.front().vec.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.vec.size() != hidden_size_) {
      fail(ErrorCode::kFormat, "entry " + key_name(e.image_id, e.tag) + " has width " +
                                   std::to_string(e.vec.size()) + ", cache width is " +
                                   std::to_string(hidden_size_));
    }
    if (!index_.emplace(std::make_pair(e.image_id, e.tag), i).second) {
      fail(ErrorCode::kConflict, "duplicate entry " + key_name(e.image_id, e.tag));
    }
  }
}

FeatureCache FeatureCache::load(const std::filesystem::path& path) {
  return FeatureCache(cache_read(path));
}

bool FeatureCache::contains(const std::string& image_id, Tag tag) const {
  return index_.count({image_id, tag}) != 0;
}

nn::Tensor1 FeatureCache::get(const std::string& image_id, Tag tag) const {
  const auto it = index_.find({image_id, tag});
  if (it == index_.end()) {
    std::string msg = "no cached feature for " + key_name(image_id, tag);
    const auto near = nearest_ids(image_id);
    if (!near.empty()) {
      msg += "; nearest ids:";
      for (const auto& id : near) msg += " '" + id + "'";
    }
    fail(ErrorCode::kNotFound, msg);
  }
  const auto& vec = entries_[it->second].vec;
  return nn::Tensor1(vec.begin(), vec.end());
}

const std::vector<float>* FeatureCache::find(const std::string& image_id, Tag tag) const {
  const auto it = index_.find({image_id, tag});
  return it == index_.end() ? nullptr : &entries_[it->second].vec;
}

std::pair<nn::Tensor1, nn::Tensor1> FeatureCache::lookup(const std::string& image_id) const {
  const bool has_a = contains(image_id, Tag::kSemantic);
  const bool has_b = contains(image_id, Tag::kCoherence);
  if (!has_a && !has_b) return {get(image_id, Tag::kSemantic), {}};  // throws not-found
  if (!has_a || !has_b) {
    fail(ErrorCode::kPartialFeature, "image '" + image_id + "' is missing semantic feature tag '" +
                                         (has_a ? 'b' : 'a') + "'");
  }
  return {get(image_id, Tag::kSemantic), get(image_id, Tag::kCoherence)};
}

std::vector<std::string> FeatureCache::nearest_ids(const std::string& image_id,
                                                   std::size_t k) const {
  std::set<std::string> ids;
  for (const auto& e : entries_) ids.insert(e.image_id);
  std::vector<std::pair<std::size_t, std::string>> scored;
  scored.reserve(ids.size());
  for (const auto& id : ids) scored.emplace_back(edit_distance(image_id, id), id);
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace agiqa::semantic
