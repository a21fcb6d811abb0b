#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

namespace laminar {

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept {
    return mix_seed(mix_seed(mix_seed(master) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

// Deterministic across platforms: std::mt19937_64 is fully specified, and the
// range reductions below avoid the implementation-defined std distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool coin(double p = 0.5) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

    /// m distinct values from [0, n), sorted ascending (Floyd's algorithm).
    std::vector<std::uint64_t> sample_distinct(std::uint64_t m, std::uint64_t n) {
        std::unordered_set<std::uint64_t> chosen;
        std::vector<std::uint64_t> out;
        out.reserve(m);
        for (std::uint64_t j = n - m; j < n; ++j) {
            auto t = below(j + 1);
            if (!chosen.insert(t).second) {
                chosen.insert(j);
                out.push_back(j);
            } else {
                out.push_back(t);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace laminar
