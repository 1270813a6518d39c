#pragma once

// Seeded RNG with a fixed algorithm (splitmix64) so augmentation,
// balancing, shuffling and training are reproducible across platforms —
// the standard distributions are not.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace adarag::rng {

class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform-ish draw in [0, n); n must be > 0.
    size_t bounded(size_t n) { return static_cast<size_t>(next() % n); }

private:
    uint64_t state_;
};

/// Derives an independent stream from a master seed and a tag.
inline uint64_t derive(uint64_t seed, uint64_t tag) {
    SplitMix64 s(seed ^ (tag * 0x9E3779B97F4A7C15ULL + 0x1ULL));
    return s.next();
}

inline uint64_t fnv1a(const void* data, size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

/// Fisher-Yates with the fixed generator above.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& gen) {
    for (size_t i = items.size(); i > 1; --i) {
        size_t j = gen.bounded(i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace adarag::rng
