#pragma once

#include <cstdint>
#include <cstring>
#include <iosfwd>
#include <string>
#include <vector>

#include "csifb/errors.hpp"

namespace csifb {

// Little-endian binary writer over a growable byte buffer.
class ByteWriter {
  public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v);
    void u32(uint32_t v);
    void u64(uint64_t v);
    void f32(float v);
    void f64(double v);
    void bytes(const void* p, std::size_t n);
    void magic(const char* tag, std::size_t n) { bytes(tag, n); }

    const std::vector<uint8_t>& data() const { return buf_; }
    std::size_t size() const { return buf_.size(); }

  private:
    std::vector<uint8_t> buf_;
};

// Little-endian binary reader. Throws FormatError (with offset) on underrun.
class ByteReader {
  public:
    ByteReader(const uint8_t* p, std::size_t n) : p_(p), n_(n) {}
    explicit ByteReader(const std::vector<uint8_t>& v) : p_(v.data()), n_(v.size()) {}

    uint8_t u8();
    uint16_t u16();
    uint32_t u32();
    uint64_t u64();
    float f32();
    double f64();
    void bytes(void* out, std::size_t n);
    void expect_magic(const char* tag, std::size_t n, const char* what);

    std::size_t offset() const { return off_; }
    std::size_t remaining() const { return n_ - off_; }

  private:
    void need(std::size_t n) const {
        if (off_ + n > n_) throw FormatError("truncated payload", off_);
    }
    const uint8_t* p_;
    std::size_t n_;
    std::size_t off_ = 0;
};

// MSB-first bit packer shared by the angle and codeword codecs.
class BitWriter {
  public:
    void put(uint32_t value, unsigned nbits);
    // Zero-pads the final partial byte.
    const std::vector<uint8_t>& bytes() const { return buf_; }
    uint64_t bit_length() const { return bits_; }

  private:
    std::vector<uint8_t> buf_;
    uint64_t bits_ = 0;
};

class BitReader {
  public:
    BitReader(const std::vector<uint8_t>& bytes, uint64_t bit_length)
        : buf_(bytes), bits_(bit_length) {}
    uint32_t get(unsigned nbits);
    uint64_t consumed() const { return pos_; }
    uint64_t remaining() const { return bits_ - pos_; }

  private:
    const std::vector<uint8_t>& buf_;
    uint64_t bits_;
    uint64_t pos_ = 0;
};

uint32_t crc32(const uint8_t* data, std::size_t n, uint32_t seed = 0);

std::vector<uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<uint8_t>& data);

}  // namespace csifb
