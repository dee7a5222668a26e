#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace singlet::hash {

using Digest = std::array<std::uint8_t, 32>;

/// Serialized mid-stream snapshot of a SHA-256 computation paused at a
/// 64-byte block boundary: the eight chaining words plus the byte count of
/// input already compressed. 45 bytes on the wire.
struct BaseHash {
    static constexpr std::array<std::uint8_t, 4> kMagic = {'S', 'I', 'N', 'B'};
    static constexpr std::uint8_t kVersion = 0x01;
    static constexpr std::size_t kEncodedSize = 45;

    std::array<std::uint32_t, 8> h{};
    std::uint64_t length = 0;  // bytes compressed so far; multiple of 64

    std::array<std::uint8_t, kEncodedSize> encode() const;
    static BaseHash decode(std::span<const std::uint8_t> raw);  // Err::MalformedSnapshot

    std::string to_hex() const;  // 90 lowercase hex chars
    static BaseHash from_hex(std::string_view hex);

    bool operator==(const BaseHash&) const = default;
};

/// Streaming SHA-256 with value semantics. States can be copied freely; all
/// operations behave as pure functions of (state, input).
class Sha256 {
  public:
    static constexpr std::size_t kBlockSize = 64;

    Sha256();  // FIPS 180-4 initial vector, length 0

    // Err::MessageTooLong once the 64-bit bit-length counter would overflow.
    Sha256& update(std::span<const std::uint8_t> data);

    // Pads and produces the digest. Pure: the state itself is not consumed,
    // but continuing to update a finalized stream is outside the contract.
    Digest finalize() const;

    // Snapshot of the current state; only valid between blocks.
    // Err::NotBlockAligned when buffered input exists.
    BaseHash export_base() const;

    // Reconstructs a state that continues exactly where the snapshot stopped.
    static Sha256 resume(const BaseHash& base);

    // finalize(resume(base)) without materializing the state: exactly one
    // compression of the padding block, independent of base.length.
    static Digest finalize_base(const BaseHash& base);

    static Digest digest_of(std::span<const std::uint8_t> data);

    std::uint64_t length() const { return length_; }
    std::size_t pending() const { return buf_len_; }

    bool operator==(const Sha256&) const = default;

  private:
    void compress(const std::uint8_t block[kBlockSize]);
    static void compress_into(std::array<std::uint32_t, 8>& h, const std::uint8_t block[kBlockSize]);

    std::array<std::uint32_t, 8> h_;
    std::uint64_t length_ = 0;          // total message bytes consumed
    std::array<std::uint8_t, kBlockSize> buf_{};
    std::size_t buf_len_ = 0;           // == length_ % 64
};

// Number of compression-function invocations on this thread. Test and
// benchmark instrumentation.
std::uint64_t compression_count();

}  // namespace singlet::hash
