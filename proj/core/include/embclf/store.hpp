#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace embclf {

enum class Split : std::uint8_t { train = 0, val = 1, test = 2 };

std::string_view to_string(Split s);
// Accepts "train", "val", "test"; throws ValidationError otherwise.
Split parse_split(std::string_view s);

// nullopt selects every record regardless of split.
using SplitSelector = std::optional<Split>;
// Accepts the Split names plus "all".
SplitSelector parse_split_selector(std::string_view s);

// One labeled example: the hidden-state vector of a frozen encoder plus
// bookkeeping. label is 0 or 1, with 1 the positive class.
struct EmbeddingRecord {
  std::uint64_t id = 0;
  std::uint8_t label = 0;
  Split split = Split::train;
  std::string dataset_tag;
  std::vector<float> hidden;

  // Bitwise on the vector payload.
  friend bool operator==(const EmbeddingRecord& a, const EmbeddingRecord& b);
};

// Immutable collection of records sharing one dimension, ordered by
// ascending id. Construct through create(), which validates everything.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Sorts by id and validates: dimension > 0, every vector of length
  // `dimension`, finite, labels in {0,1}, ids unique, tags fit in u16.
  // Throws ValidationError / DimensionError naming the offending id.
  static EmbeddingStore create(std::uint32_t dimension, std::vector<EmbeddingRecord> records,
                               std::string provenance = {});

  std::uint32_t dimension() const { return dimension_; }
  const std::string& provenance() const { return provenance_; }
  std::span<const EmbeddingRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Records of one split (or all), same order, same dimension/provenance.
  EmbeddingStore subset(SplitSelector split) const;
  std::size_t count(SplitSelector split) const;
  // Index into records() of `id`, or nullopt.
  std::optional<std::size_t> find(std::uint64_t id) const;

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b);

 private:
  std::uint32_t dimension_ = 0;
  std::string provenance_;
  std::vector<EmbeddingRecord> records_;
};

// `.remb` binary format, all integers little-endian:
//   "REMB" | u32 version=1 | u32 dimension | u64 count | u32 provenance_len | provenance
//   per record: u64 id | u8 label | u8 split | u16 tag_len | tag | dimension x f32
inline constexpr std::uint32_t kStoreFormatVersion = 1;

std::vector<std::uint8_t> encode_store(const EmbeddingStore& store);
EmbeddingStore decode_store(std::span<const std::uint8_t> bytes);

void write_store(const EmbeddingStore& store, const std::string& path);
EmbeddingStore read_store(const std::string& path);

// Union of `base` and `extra`, with `id_offset` added to every id of
// `extra`. Throws DimensionError on dimension mismatch and ValidationError
// when a shifted id collides with a base id (or overflows).
EmbeddingStore merge_stores(const EmbeddingStore& base, const EmbeddingStore& extra,
                            std::uint64_t id_offset);

}  // namespace embclf
