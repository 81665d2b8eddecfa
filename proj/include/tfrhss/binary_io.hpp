#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfrhss/grid.hpp"

namespace tfrhss {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io {

// Little-endian helpers shared by the dataset, fields and checkpoint files.
class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw FormatError("cannot open '" + path + "' for writing");
  }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    bytes(reinterpret_cast<const char*>(b), 4);
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void floats(const float* p, std::size_t count) {
    buffer_.resize(count * 4);
    for (std::size_t k = 0; k < count; ++k) {
      const auto v = std::bit_cast<std::uint32_t>(p[k]);
      for (int b = 0; b < 4; ++b) buffer_[4 * k + b] = static_cast<char>((v >> (8 * b)) & 0xFF);
    }
    bytes(buffer_.data(), buffer_.size());
  }
  void field(const Field& f) {
    buffer_.resize(f.size() * 4);
    for (std::size_t k = 0; k < f.size(); ++k) {
      const auto v = std::bit_cast<std::uint32_t>(static_cast<float>(f[k]));
      for (int b = 0; b < 4; ++b) buffer_[4 * k + b] = static_cast<char>((v >> (8 * b)) & 0xFF);
    }
    bytes(buffer_.data(), buffer_.size());
  }
  void nan_field(std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) f32(std::numeric_limits<float>::quiet_NaN());
  }
  void finish(const std::string& path) {
    out_.flush();
    if (!out_) throw FormatError("write to '" + path + "' failed");
  }

 private:
  std::ofstream out_;
  std::vector<char> buffer_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open '" + path + "'");
  }
  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) throw FormatError("'" + path_ + "': truncated file");
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str(std::uint32_t max_length) {
    const std::uint32_t n = u32();
    if (n > max_length) throw FormatError("'" + path_ + "': string length " + std::to_string(n) + " out of range");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  void floats(float* p, std::size_t count) {
    buffer_.resize(count * 4);
    bytes(buffer_.data(), buffer_.size());
    for (std::size_t k = 0; k < count; ++k) {
      std::uint32_t v = 0;
      for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buffer_[4 * k + b])) << (8 * b);
      p[k] = std::bit_cast<float>(v);
    }
  }
  Field field(int n) {
    Field f(n, 0.0);
    buffer_.resize(f.size() * 4);
    bytes(buffer_.data(), buffer_.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
      std::uint32_t v = 0;
      for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buffer_[4 * k + b])) << (8 * b);
      f[k] = std::bit_cast<float>(v);
    }
    return f;
  }
  void expect_magic(const char (&magic)[4]) {
    char m[4];
    bytes(m, 4);
    if (std::memcmp(m, magic, 4) != 0)
      throw FormatError("'" + path_ + "': bad magic, expected " + std::string(magic, 4));
  }
  void expect_eof() {
    if (in_.peek() != std::char_traits<char>::eof()) throw FormatError("'" + path_ + "': trailing bytes");
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::vector<char> buffer_;
};

}  // namespace io
}  // namespace tfrhss
