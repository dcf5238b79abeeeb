#include "embclf/store.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "binary_io.hpp"
#include "embclf/error.hpp"

namespace embclf {

namespace {

constexpr char kMagic[4] = {'R', 'E', 'M', 'B'};

std::string id_str(std::uint64_t id) { return "record id " + std::to_string(id); }

}  // namespace

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw ValidationError("unknown split '" + std::string(s) + "' (expected train, val or test)");
}

SplitSelector parse_split_selector(std::string_view s) {
  if (s == "all") return std::nullopt;
  return parse_split(s);
}

bool operator==(const EmbeddingRecord& a, const EmbeddingRecord& b) {
  return a.id == b.id && a.label == b.label && a.split == b.split && a.dataset_tag == b.dataset_tag &&
         a.hidden.size() == b.hidden.size() &&
         std::memcmp(a.hidden.data(), b.hidden.data(), a.hidden.size() * sizeof(float)) == 0;
}

bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
  return a.dimension_ == b.dimension_ && a.provenance_ == b.provenance_ && a.records_ == b.records_;
}

EmbeddingStore EmbeddingStore::create(std::uint32_t dimension, std::vector<EmbeddingRecord> records,
                                      std::string provenance) {
  if (dimension == 0) throw ValidationError("store dimension must be positive");
  if (provenance.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("provenance string too long");
  }
  for (const auto& r : records) {
    if (r.hidden.size() != dimension) {
      throw DimensionError(id_str(r.id) + ": hidden vector has dimension " + std::to_string(r.hidden.size()) +
                           ", store declares " + std::to_string(dimension));
    }
    if (r.label > 1) throw ValidationError(id_str(r.id) + ": label must be 0 or 1");
    if (static_cast<unsigned>(r.split) > 2) throw ValidationError(id_str(r.id) + ": invalid split");
    if (r.dataset_tag.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ValidationError(id_str(r.id) + ": dataset tag longer than 65535 bytes");
    }
    for (float v : r.hidden) {
      if (!std::isfinite(v)) throw ValidationError(id_str(r.id) + ": hidden vector contains a non-finite value");
    }
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const EmbeddingRecord& a, const EmbeddingRecord& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].id == records[i - 1].id) throw ValidationError("duplicate " + id_str(records[i].id));
  }
  EmbeddingStore s;
  s.dimension_ = dimension;
  s.provenance_ = std::move(provenance);
  s.records_ = std::move(records);
  return s;
}

EmbeddingStore EmbeddingStore::subset(SplitSelector split) const {
  EmbeddingStore s;
  s.dimension_ = dimension_;
  s.provenance_ = provenance_;
  for (const auto& r : records_) {
    if (!split || r.split == *split) s.records_.push_back(r);
  }
  return s;
}

std::size_t EmbeddingStore::count(SplitSelector split) const {
  if (!split) return records_.size();
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(), [&](const auto& r) { return r.split == *split; }));
}

std::optional<std::size_t> EmbeddingStore::find(std::uint64_t id) const {
  auto it = std::lower_bound(records_.begin(), records_.end(), id,
                             [](const EmbeddingRecord& r, std::uint64_t v) { return r.id < v; });
  if (it == records_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - records_.begin());
}

std::vector<std::uint8_t> encode_store(const EmbeddingStore& store) {
  detail::ByteWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kStoreFormatVersion);
  w.u32(store.dimension());
  w.u64(store.size());
  w.u32(static_cast<std::uint32_t>(store.provenance().size()));
  w.bytes(store.provenance());
  for (const auto& r : store.records()) {
    w.u64(r.id);
    w.u8(r.label);
    w.u8(static_cast<std::uint8_t>(r.split));
    w.u16(static_cast<std::uint16_t>(r.dataset_tag.size()));
    w.bytes(r.dataset_tag);
    w.f32_array(r.hidden);
  }
  return w.data();
}

EmbeddingStore decode_store(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("corrupt header: missing REMB magic");
  }
  r.bytes(4, "magic");
  const auto version = r.u32("format version");
  if (version != kStoreFormatVersion) {
    throw FormatError("corrupt header: unsupported format version " + std::to_string(version));
  }
  const auto dimension = r.u32("dimension");
  if (dimension == 0) throw FormatError("corrupt header: zero dimension");
  const auto count = r.u64("record count");
  const auto prov_len = r.u32("provenance length");
  std::string provenance = r.bytes(prov_len, "provenance");

  // Each record needs at least 12 + 4*d bytes; reject impossible counts
  // before allocating.
  const std::uint64_t min_record = 12 + 4ull * dimension;
  if (count > r.remaining() / min_record) {
    throw FormatError("truncated payload: header declares " + std::to_string(count) + " records but only " +
                      std::to_string(r.remaining()) + " bytes follow");
  }
  std::vector<EmbeddingRecord> records(count);
  for (auto& rec : records) {
    rec.id = r.u64("record id");
    rec.label = r.u8("label");
    const auto split = r.u8("split");
    if (split > 2) throw FormatError(id_str(rec.id) + ": invalid split code " + std::to_string(split));
    rec.split = static_cast<Split>(split);
    const auto tag_len = r.u16("dataset tag length");
    rec.dataset_tag = r.bytes(tag_len, "dataset tag");
    rec.hidden.resize(dimension);
    r.f32_array(rec.hidden, "hidden vector");
  }
  if (r.remaining() != 0) {
    throw FormatError("trailing bytes: " + std::to_string(r.remaining()) + " bytes after declared " +
                      std::to_string(count) + " records");
  }
  return EmbeddingStore::create(dimension, std::move(records), std::move(provenance));
}

void write_store(const EmbeddingStore& store, const std::string& path) {
  // Stores built through create() already satisfy every invariant, but a
  // default-constructed store has dimension 0.
  if (store.dimension() == 0) throw ValidationError("cannot write a store with dimension 0");
  detail::write_file(path, encode_store(store));
}

EmbeddingStore read_store(const std::string& path) { return decode_store(detail::read_file(path)); }

EmbeddingStore merge_stores(const EmbeddingStore& base, const EmbeddingStore& extra, std::uint64_t id_offset) {
  if (base.dimension() != extra.dimension()) {
    throw DimensionError("cannot merge stores of dimension " + std::to_string(base.dimension()) + " and " +
                         std::to_string(extra.dimension()));
  }
  std::vector<EmbeddingRecord> merged(base.records().begin(), base.records().end());
  merged.reserve(base.size() + extra.size());
  for (const auto& rec : extra.records()) {
    if (rec.id > std::numeric_limits<std::uint64_t>::max() - id_offset) {
      throw ValidationError(id_str(rec.id) + ": id overflows after offset " + std::to_string(id_offset));
    }
    EmbeddingRecord shifted = rec;
    shifted.id += id_offset;
    if (base.find(shifted.id)) {
      throw ValidationError("id collision after offset: " + id_str(shifted.id) + " exists in base store");
    }
    merged.push_back(std::move(shifted));
  }
  std::string prov = base.provenance();
  if (!extra.empty() && !extra.provenance().empty() && extra.provenance() != base.provenance()) {
    prov += prov.empty() ? extra.provenance() : " + " + extra.provenance();
  }
  return EmbeddingStore::create(base.dimension(), std::move(merged), std::move(prov));
}

}  // namespace embclf
