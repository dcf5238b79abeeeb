#pragma once

// Little-endian primitive encoding shared by the store and checkpoint formats.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace embclf::detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v);
  void f64(double v);
  void bytes(std::string_view s);
  void f32_array(std::span<const float> v);

  const std::vector<std::uint8_t>& data() const { return buf_; }

 private:
  void put(std::uint64_t v, int n);
  std::vector<std::uint8_t> buf_;
};

// Bounds-checked cursor over an in-memory file image. Every read past the
// end throws FormatError with `what` describing the field.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8(const char* what);
  std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(get(2, what)); }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(get(4, what)); }
  std::uint64_t u64(const char* what) { return get(8, what); }
  float f32(const char* what);
  double f64(const char* what);
  std::string bytes(std::size_t n, const char* what);
  void f32_array(std::span<float> out, const char* what);

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n, const char* what) const;
  std::uint64_t get(int n, const char* what);
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace embclf::detail
