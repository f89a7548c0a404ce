#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "augrl/spectrogram.hpp"

namespace augrl {

// Little-endian byte stream builders, independent of host endianness.
class ByteWriter {
 public:
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void bytes(const void* p, std::size_t n);
  void str(const std::string& s) { bytes(s.data(), s.size()); }
  const std::vector<std::uint8_t>& data() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::vector<std::uint8_t> data)
      : buf_(std::move(data)) {}
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  void bytes(void* p, std::size_t n);
  std::string str(std::size_t n);
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n);
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

// Write-temp-then-rename; partial files never appear under the final name.
void atomic_write_file(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& data);
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& text);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// "SPEC1" spectrogram file: magic, u32 n_time, u32 n_freq, then
// n_time*n_freq f32 cells, time-major, all little-endian.
void write_spectrogram_file(const std::filesystem::path& path,
                            const Spectrogram& s);
Spectrogram read_spectrogram_file(const std::filesystem::path& path);

// Labeled spectrogram set with uniform shape.
struct Dataset {
  int n_time = 0;
  int n_freq = 0;
  int n_classes = 0;
  std::vector<Spectrogram> specs;
  std::vector<int> labels;

  std::size_t size() const { return specs.size(); }
};

// "SPDS1" dataset file: magic, u32 count, n_time, n_freq, n_classes, then
// count records of (u32 label, n_time*n_freq f32 cells, time-major).
void write_dataset_file(const std::filesystem::path& path, const Dataset& d);
Dataset read_dataset_file(const std::filesystem::path& path);

}  // namespace augrl
