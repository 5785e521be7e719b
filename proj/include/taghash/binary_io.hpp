#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

namespace taghash {

// Little-endian byte encoding shared by the DMAT1 / HCOD1 / HMOD1 formats.
class ByteWriter {
public:
    template <std::size_t N>
    void magic(const std::array<char, N>& m) { buf_.append(m.data(), N); }
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u64(std::uint64_t v) {
        for (int b = 0; b < 8; ++b) buf_.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    const std::string& bytes() const { return buf_; }
    void save(const std::filesystem::path& path) const;

private:
    std::string buf_;
};

class ByteReader {
public:
    ByteReader(std::string_view bytes, std::string source)
        : bytes_(bytes), source_(std::move(source)) {}

    template <std::size_t N>
    void expect_magic(const std::array<char, N>& m) {
        need(N);
        if (std::memcmp(bytes_.data() + pos_, m.data(), N) != 0) fail("bad magic");
        pos_ += N;
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(bytes_[pos_++]);
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (remaining() < n) fail("truncated file");
    }
    [[noreturn]] void fail(const std::string& what) const;

    std::string_view bytes_;
    std::string source_;
    std::size_t pos_ = 0;
};

std::string read_binary_file(const std::filesystem::path& path);

}  // namespace taghash
