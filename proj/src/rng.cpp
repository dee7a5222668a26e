#include "singlet/rng.hpp"

#include <sys/random.h>

#include <cstdlib>
#include <cstring>
#include <mutex>
#include <optional>

#include "singlet/error.hpp"
#include "singlet/sha256.hpp"

namespace singlet {

namespace {

std::array<std::uint8_t, 32> derive_key(std::span<const std::uint8_t> material,
                                        std::string_view label) {
    hash::Sha256 s;
    s.update(std::span(reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
    s.update(material);
    return s.finalize();
}

}  // namespace

Drbg::Drbg(std::span<const std::uint8_t> seed) { key_ = derive_key(seed, "singlet-drbg-v1"); }

Drbg::Drbg(std::string_view seed_text)
    : Drbg(std::span(reinterpret_cast<const std::uint8_t*>(seed_text.data()), seed_text.size())) {}

void Drbg::fill(std::span<std::uint8_t> out) {
    std::size_t off = 0;
    while (off < out.size()) {
        std::uint8_t ctr[8];
        put_u64_be(ctr, counter_++);
        hash::Sha256 s;
        s.update(key_);
        s.update(ctr);
        auto block = s.finalize();
        std::size_t take = std::min(block.size(), out.size() - off);
        std::memcpy(out.data() + off, block.data(), take);
        off += take;
    }
}

Bytes Drbg::bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
}

std::uint64_t Drbg::next_u64() {
    std::uint8_t raw[8];
    fill(raw);
    return get_u64_be(raw);
}

Drbg Drbg::fork(std::string_view label) const {
    Drbg child;
    child.key_ = derive_key(key_, label);
    return child;
}

namespace {

struct GlobalRng {
    std::mutex mu;
    std::optional<Drbg> drbg;
    bool seeded = false;

    GlobalRng() {
        if (const char* seed = std::getenv("SINCLAVE_SEED"); seed != nullptr && *seed != '\0') {
            drbg.emplace(std::string_view(seed));
            seeded = true;
        }
    }

    void fill(std::span<std::uint8_t> out) {
        std::lock_guard lock(mu);
        if (drbg) {
            drbg->fill(out);
            return;
        }
        std::size_t off = 0;
        while (off < out.size()) {
            ssize_t n = getrandom(out.data() + off, out.size() - off, 0);
            if (n < 0) throw Error(Err::Entropy, "getrandom failed");
            off += static_cast<std::size_t>(n);
        }
    }
};

GlobalRng& instance() {
    static GlobalRng g;
    return g;
}

}  // namespace

void global_rng_fill(std::span<std::uint8_t> out) { instance().fill(out); }

Bytes random_bytes(std::size_t n) {
    Bytes out(n);
    global_rng_fill(out);
    return out;
}

bool global_rng_seeded() { return instance().seeded; }

void reset_global_rng() {
    auto& g = instance();
    std::lock_guard lock(g.mu);
    g.drbg.reset();
    g.seeded = false;
    if (const char* seed = std::getenv("SINCLAVE_SEED"); seed != nullptr && *seed != '\0') {
        g.drbg.emplace(std::string_view(seed));
        g.seeded = true;
    }
}

}  // namespace singlet
