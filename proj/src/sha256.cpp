#include "singlet/sha256.hpp"

#include <cstring>

#include "singlet/bytes.hpp"
#include "singlet/error.hpp"

namespace singlet::hash {

namespace {

constexpr std::array<std::uint32_t, 8> kIv = {
    0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
    0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u,
};

constexpr std::uint32_t kRound[64] = {
    0x428a2f98u, 0x71374491u, 0xb5c0fbcfu, 0xe9b5dba5u, 0x3956c25bu, 0x59f111f1u,
    0x923f82a4u, 0xab1c5ed5u, 0xd807aa98u, 0x12835b01u, 0x243185beu, 0x550c7dc3u,
    0x72be5d74u, 0x80deb1feu, 0x9bdc06a7u, 0xc19bf174u, 0xe49b69c1u, 0xefbe4786u,
    0x0fc19dc6u, 0x240ca1ccu, 0x2de92c6fu, 0x4a7484aau, 0x5cb0a9dcu, 0x76f988dau,
    0x983e5152u, 0xa831c66du, 0xb00327c8u, 0xbf597fc7u, 0xc6e00bf3u, 0xd5a79147u,
    0x06ca6351u, 0x14292967u, 0x27b70a85u, 0x2e1b2138u, 0x4d2c6dfcu, 0x53380d13u,
    0x650a7354u, 0x766a0abbu, 0x81c2c92eu, 0x92722c85u, 0xa2bfe8a1u, 0xa81a664bu,
    0xc24b8b70u, 0xc76c51a3u, 0xd192e819u, 0xd6990624u, 0xf40e3585u, 0x106aa070u,
    0x19a4c116u, 0x1e376c08u, 0x2748774cu, 0x34b0bcb5u, 0x391c0cb3u, 0x4ed8aa4au,
    0x5b9cca4fu, 0x682e6ff3u, 0x748f82eeu, 0x78a5636fu, 0x84c87814u, 0x8cc70208u,
    0x90befffau, 0xa4506cebu, 0xbef9a3f7u, 0xc67178f2u,
};

inline std::uint32_t rotr(std::uint32_t x, unsigned n) { return (x >> n) | (x << (32 - n)); }

// Largest message in bytes whose bit count still fits the 64-bit length word.
constexpr std::uint64_t kMaxMessageBytes = (~0ull) / 8;

thread_local std::uint64_t t_compressions = 0;

}  // namespace

std::uint64_t compression_count() { return t_compressions; }

Sha256::Sha256() : h_(kIv) {}

void Sha256::compress_into(std::array<std::uint32_t, 8>& h, const std::uint8_t block[kBlockSize]) {
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i) w[i] = get_u32_be(block + 4 * i);
    for (int i = 16; i < 64; ++i) {
        std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }

    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
    std::uint32_t e = h[4], f = h[5], g = h[6], k = h[7];

    for (int i = 0; i < 64; ++i) {
        std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        std::uint32_t ch = (e & f) ^ (~e & g);
        std::uint32_t t1 = k + s1 + ch + kRound[i] + w[i];
        std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        std::uint32_t t2 = s0 + maj;
        k = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }

    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
    h[5] += f;
    h[6] += g;
    h[7] += k;
    ++t_compressions;
}

void Sha256::compress(const std::uint8_t block[kBlockSize]) { compress_into(h_, block); }

Sha256& Sha256::update(std::span<const std::uint8_t> data) {
    if (data.size() > kMaxMessageBytes - length_)
        throw Error(Err::MessageTooLong, "sha256: message exceeds 2^64-1 bits");

    const std::uint8_t* p = data.data();
    std::size_t n = data.size();
    length_ += n;

    if (buf_len_ > 0) {
        std::size_t take = std::min(n, kBlockSize - buf_len_);
        std::memcpy(buf_.data() + buf_len_, p, take);
        buf_len_ += take;
        p += take;
        n -= take;
        if (buf_len_ == kBlockSize) {
            compress(buf_.data());
            buf_len_ = 0;
        }
    }
    while (n >= kBlockSize) {
        compress(p);
        p += kBlockSize;
        n -= kBlockSize;
    }
    if (n > 0) {
        std::memcpy(buf_.data(), p, n);
        buf_len_ = n;
    }
    return *this;
}

Digest Sha256::finalize() const {
    auto h = h_;

    // Padding: 0x80, zeros to 56 mod 64, then the bit length. Fits in one
    // extra block when fewer than 56 bytes are pending, two otherwise.
    std::uint8_t block[kBlockSize] = {0};
    std::memcpy(block, buf_.data(), buf_len_);
    block[buf_len_] = 0x80;
    if (buf_len_ >= 56) {
        compress_into(h, block);
        std::memset(block, 0, kBlockSize);
    }
    put_u64_be(block + 56, length_ * 8);
    compress_into(h, block);

    Digest out;
    for (int i = 0; i < 8; ++i) put_u32_be(out.data() + 4 * i, h[i]);
    return out;
}

BaseHash Sha256::export_base() const {
    if (buf_len_ != 0)
        throw Error(Err::NotBlockAligned, "sha256: snapshot requested mid-block");
    return BaseHash{h_, length_};
}

Sha256 Sha256::resume(const BaseHash& base) {
    if (base.length % kBlockSize != 0)
        throw Error(Err::MalformedSnapshot, "sha256: snapshot length not block-aligned");
    Sha256 s;
    s.h_ = base.h;
    s.length_ = base.length;
    return s;
}

Digest Sha256::finalize_base(const BaseHash& base) {
    if (base.length % kBlockSize != 0)
        throw Error(Err::MalformedSnapshot, "sha256: snapshot length not block-aligned");

    // The snapshot has no pending bytes, so the padding always occupies a
    // single block: marker, 55 zero bytes, 8 length bytes.
    auto h = base.h;
    std::uint8_t block[kBlockSize] = {0};
    block[0] = 0x80;
    put_u64_be(block + 56, base.length * 8);
    compress_into(h, block);

    Digest out;
    for (int i = 0; i < 8; ++i) put_u32_be(out.data() + 4 * i, h[i]);
    return out;
}

Digest Sha256::digest_of(std::span<const std::uint8_t> data) {
    Sha256 s;
    s.update(data);
    return s.finalize();
}

std::array<std::uint8_t, BaseHash::kEncodedSize> BaseHash::encode() const {
    std::array<std::uint8_t, kEncodedSize> out{};
    std::memcpy(out.data(), kMagic.data(), 4);
    out[4] = kVersion;
    for (int i = 0; i < 8; ++i) put_u32_be(out.data() + 5 + 4 * i, h[i]);
    put_u64_be(out.data() + 37, length);
    return out;
}

BaseHash BaseHash::decode(std::span<const std::uint8_t> raw) {
    if (raw.size() != kEncodedSize)
        throw Error(Err::MalformedSnapshot, "base hash: expected 45 bytes");
    if (std::memcmp(raw.data(), kMagic.data(), 4) != 0)
        throw Error(Err::MalformedSnapshot, "base hash: bad magic");
    if (raw[4] != kVersion)
        throw Error(Err::MalformedSnapshot, "base hash: unsupported version");
    BaseHash b;
    for (int i = 0; i < 8; ++i) b.h[i] = get_u32_be(raw.data() + 5 + 4 * i);
    b.length = get_u64_be(raw.data() + 37);
    if (b.length % Sha256::kBlockSize != 0)
        throw Error(Err::MalformedSnapshot, "base hash: length not block-aligned");
    return b;
}

std::string BaseHash::to_hex() const {
    auto enc = encode();
    return singlet::to_hex(enc);
}

BaseHash BaseHash::from_hex(std::string_view hex) {
    Bytes raw;
    try {
        raw = singlet::from_hex(hex);
    } catch (const Error&) {
        throw Error(Err::MalformedSnapshot, "base hash: invalid hex");
    }
    return decode(raw);
}

}  // namespace singlet::hash
