#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "singlet/bytes.hpp"
#include "singlet/error.hpp"
#include "singlet/sha256.hpp"

using namespace singlet;
using hash::BaseHash;
using hash::Digest;
using hash::Sha256;

namespace {
Bytes str_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
}  // namespace

TEST_CASE("fresh state matches the FIPS initial vector") {
    Sha256 s;
    CHECK(s.length() == 0);
    CHECK(s.pending() == 0);
    auto base = s.export_base();
    CHECK(base.h == std::array<std::uint32_t, 8>{0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                                                 0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u});
    CHECK(base.length == 0);
    CHECK(Sha256() == Sha256());
}

TEST_CASE("FIPS 180-4 test vectors") {
    // "abc"
    auto abc = str_bytes("abc");
    CHECK(to_hex(Sha256::digest_of(abc)) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // empty message
    CHECK(to_hex(Sha256().finalize()) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    // two-block vector
    auto two = str_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq");
    CHECK(to_hex(Sha256::digest_of(two)) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("digest agrees with reference implementation on random messages") {
    oracle::TestRng rng(0x5eed5eed);
    for (int i = 0; i < 1000; ++i) {
        auto msg = rng.bytes(rng.below(8193));
        CHECK(Sha256::digest_of(msg) == oracle::sha256(msg));
    }
}

TEST_CASE("update is chunking-invariant") {
    oracle::TestRng rng(7);
    for (int i = 0; i < 200; ++i) {
        auto a = rng.bytes(rng.below(300));
        auto b = rng.bytes(rng.below(300));
        Bytes joined = a;
        joined.insert(joined.end(), b.begin(), b.end());

        Sha256 split;
        split.update(a).update(b);
        CHECK(split.finalize() == Sha256::digest_of(joined));
    }
}

TEST_CASE("empty update leaves the state unchanged") {
    Sha256 s;
    s.update(str_bytes("block-sized prefix padding....."));
    Sha256 t = s;
    t.update({});
    CHECK(t == s);
}

TEST_CASE("64 zero bytes") {
    Bytes zeros(64, 0);
    Sha256 s;
    s.update(zeros);
    CHECK(s.pending() == 0);
    CHECK(s.finalize() == oracle::sha256(zeros));
}

TEST_CASE("length counter overflow is rejected") {
    BaseHash near_max{.h = Sha256().export_base().h, .length = ((~0ull) / 8) / 64 * 64};
    Sha256 s = Sha256::resume(near_max);
    Bytes chunk(128, 0xaa);
    CHECK_THROWS_AS(s.update(chunk), Error);
    try {
        Sha256::resume(near_max).update(chunk);
    } catch (const Error& e) {
        CHECK(e.code() == Err::MessageTooLong);
    }
}

TEST_CASE("export_base requires block alignment") {
    Sha256 s;
    s.update(Bytes(100, 1));
    CHECK_THROWS_AS(s.export_base(), Error);
    try {
        s.export_base();
    } catch (const Error& e) {
        CHECK(e.code() == Err::NotBlockAligned);
    }

    s.update(Bytes(28, 1));  // 128 total
    auto base = s.export_base();
    CHECK(base.length == 128);
}

TEST_CASE("export/resume round trip preserves the stream") {
    oracle::TestRng rng(42);
    for (int i = 0; i < 100; ++i) {
        std::size_t blocks = rng.below(32);
        std::size_t tail_len = rng.below(500);
        auto head = rng.bytes(blocks * 64);
        auto tail = rng.bytes(tail_len);
        Bytes full = head;
        full.insert(full.end(), tail.begin(), tail.end());

        Sha256 s;
        s.update(head);
        auto resumed = Sha256::resume(s.export_base());
        CHECK(resumed == s);
        resumed.update(tail);
        CHECK(resumed.finalize() == oracle::sha256(full));
    }
}

TEST_CASE("snapshot encoding is 45 bytes and round-trips") {
    Sha256 s;
    s.update(Bytes(192, 3));
    auto base = s.export_base();
    auto encoded = base.encode();
    CHECK(encoded.size() == 45);
    CHECK(encoded[0] == 'S');
    CHECK(encoded[1] == 'I');
    CHECK(encoded[2] == 'N');
    CHECK(encoded[3] == 'B');
    CHECK(encoded[4] == 0x01);
    CHECK(BaseHash::decode(encoded) == base);

    auto hex = base.to_hex();
    CHECK(hex.size() == 90);
    CHECK(BaseHash::from_hex(hex) == base);
}

TEST_CASE("malformed snapshots are rejected") {
    auto good = Sha256().export_base().encode();

    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(BaseHash::decode(bad_magic), Error);

    auto bad_version = good;
    bad_version[4] = 0x02;
    CHECK_THROWS_AS(BaseHash::decode(bad_version), Error);

    auto bad_length = good;
    bad_length[44] = 1;  // 1 mod 64 != 0
    try {
        BaseHash::decode(bad_length);
        FAIL("unaligned length accepted");
    } catch (const Error& e) {
        CHECK(e.code() == Err::MalformedSnapshot);
    }

    Bytes truncated(good.begin(), good.end() - 1);
    CHECK_THROWS_AS(BaseHash::decode(truncated), Error);
}

TEST_CASE("finalize_base equals finalize-after-resume") {
    CHECK(Sha256::finalize_base(Sha256().export_base()) == Sha256().finalize());

    oracle::TestRng rng(99);
    for (int i = 0; i < 100; ++i) {
        auto data = rng.bytes(rng.below(64) * 64);
        Sha256 s;
        s.update(data);
        auto base = s.export_base();
        CHECK(Sha256::finalize_base(base) == Sha256::resume(base).finalize());
        CHECK(Sha256::finalize_base(base) == oracle::sha256(data));
    }
}

TEST_CASE("finalize_base compresses exactly once") {
    Sha256 small, large;
    small.update(Bytes(1024, 0x11));
    large.update(Bytes(1024 * 1024, 0x22));

    for (const auto& base : {small.export_base(), large.export_base()}) {
        auto before = hash::compression_count();
        Sha256::finalize_base(base);
        CHECK(hash::compression_count() - before == 1);
    }
}

TEST_CASE("finalize_base wall time is independent of snapshot length") {
    Sha256 small, large;
    small.update(Bytes(1024, 0x11));
    auto small_base = small.export_base();
    // 64 MB worth of compressed input, synthesized: finalize_base only reads
    // the chaining words and the length.
    BaseHash large_base{.h = small_base.h, .length = 64ull << 20};

    auto measure = [](const BaseHash& base) {
        constexpr int kBatch = 4096;
        auto start = std::chrono::steady_clock::now();
        for (int i = 0; i < kBatch; ++i) {
            auto d = Sha256::finalize_base(base);
            (void)d;
        }
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    measure(small_base);  // warm
    std::vector<double> small_times, large_times;
    for (int run = 0; run < 30; ++run) {
        small_times.push_back(measure(small_base));
        large_times.push_back(measure(large_base));
    }
    std::sort(small_times.begin(), small_times.end());
    std::sort(large_times.begin(), large_times.end());
    double ratio = large_times[large_times.size() / 2] / small_times[small_times.size() / 2];
    CHECK(ratio < 2.0);
}

TEST_CASE("block-aligned split property") {
    oracle::TestRng rng(0xabcdef);
    for (int i = 0; i < 200; ++i) {
        std::size_t len = rng.below(4096) + 64;
        auto msg = rng.bytes(len);
        std::size_t split = rng.below(len / 64 + 1) * 64;

        Sha256 a;
        a.update(std::span(msg).first(split));
        Sha256 b = Sha256::resume(a.export_base());
        b.update(std::span(msg).subspan(split));
        CHECK(b.finalize() == Sha256::digest_of(msg));
    }
}
