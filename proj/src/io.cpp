#include "augrl/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace augrl {

namespace {
constexpr char kSpecMagic[] = "SPEC1";
constexpr char kDatasetMagic[] = "SPDS1";
}  // namespace

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back((v >> (8 * i)) & 0xff);
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back((v >> (8 * i)) & 0xff);
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::bytes(const void* p, std::size_t n) {
  const auto* b = static_cast<const std::uint8_t*>(p);
  buf_.insert(buf_.end(), b, b + n);
}

void ByteReader::need(std::size_t n) {
  if (pos_ + n > buf_.size())
    throw std::runtime_error("truncated file: wanted " + std::to_string(n) +
                             " more bytes at offset " + std::to_string(pos_));
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

void ByteReader::bytes(void* p, std::size_t n) {
  need(n);
  std::memcpy(p, buf_.data() + pos_, n);
  pos_ += n;
}

std::string ByteReader::str(std::size_t n) {
  need(n);
  std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
  pos_ += n;
  return s;
}

void atomic_write_file(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& data) {
  const auto tmp = path.parent_path() /
                   (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::vector<std::uint8_t> data(text.begin(), text.end());
  atomic_write_file(path, data);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> data(
      (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

void write_spectrogram_file(const std::filesystem::path& path,
                            const Spectrogram& s) {
  ByteWriter w;
  w.str(kSpecMagic);
  w.u32(static_cast<std::uint32_t>(s.n_time));
  w.u32(static_cast<std::uint32_t>(s.n_freq));
  for (float v : s.values) w.f32(v);
  atomic_write_file(path, w.data());
}

Spectrogram read_spectrogram_file(const std::filesystem::path& path) {
  ByteReader r(read_file(path));
  if (r.str(5) != kSpecMagic)
    throw std::runtime_error(path.string() + ": not a SPEC1 file");
  Spectrogram s;
  s.n_time = static_cast<int>(r.u32());
  s.n_freq = static_cast<int>(r.u32());
  if (s.n_time < 1 || s.n_freq < 1 || s.n_time > (1 << 24) ||
      s.n_freq > (1 << 24))
    throw std::runtime_error(path.string() + ": bad spectrogram shape");
  s.values.resize(static_cast<std::size_t>(s.n_time) * s.n_freq);
  for (float& v : s.values) v = r.f32();
  if (!r.at_end())
    throw std::runtime_error(path.string() + ": trailing bytes");
  return s;
}

void write_dataset_file(const std::filesystem::path& path, const Dataset& d) {
  if (d.specs.size() != d.labels.size())
    throw std::invalid_argument("dataset: specs/labels size mismatch");
  ByteWriter w;
  w.str(kDatasetMagic);
  w.u32(static_cast<std::uint32_t>(d.specs.size()));
  w.u32(static_cast<std::uint32_t>(d.n_time));
  w.u32(static_cast<std::uint32_t>(d.n_freq));
  w.u32(static_cast<std::uint32_t>(d.n_classes));
  for (std::size_t i = 0; i < d.specs.size(); ++i) {
    const auto& s = d.specs[i];
    if (s.n_time != d.n_time || s.n_freq != d.n_freq)
      throw std::invalid_argument("dataset: nonuniform spectrogram shape");
    w.u32(static_cast<std::uint32_t>(d.labels[i]));
    for (float v : s.values) w.f32(v);
  }
  atomic_write_file(path, w.data());
}

Dataset read_dataset_file(const std::filesystem::path& path) {
  ByteReader r(read_file(path));
  if (r.str(5) != kDatasetMagic)
    throw std::runtime_error(path.string() + ": not a SPDS1 file");
  Dataset d;
  const auto count = r.u32();
  d.n_time = static_cast<int>(r.u32());
  d.n_freq = static_cast<int>(r.u32());
  d.n_classes = static_cast<int>(r.u32());
  if (d.n_time < 1 || d.n_freq < 1 || d.n_classes < 1)
    throw std::runtime_error(path.string() + ": bad dataset header");
  d.specs.reserve(count);
  d.labels.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const int label = static_cast<int>(r.u32());
    if (label < 0 || label >= d.n_classes)
      throw std::runtime_error(path.string() + ": label out of range");
    Spectrogram s(d.n_time, d.n_freq);
    for (float& v : s.values) v = r.f32();
    d.specs.push_back(std::move(s));
    d.labels.push_back(label);
  }
  if (!r.at_end())
    throw std::runtime_error(path.string() + ": trailing bytes");
  return d;
}

}  // namespace augrl
