#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace laminar {

// Fixed-width dense bitset sized at runtime. Used for subsets of a universe,
// down-sets of forest nodes and sign vectors alike.
class BitSet {
  public:
    BitSet() = default;
    explicit BitSet(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}
    BitSet(std::size_t bits, std::initializer_list<std::size_t> members) : BitSet(bits) {
        for (auto m : members)
            set(m);
    }

    std::size_t size() const noexcept { return bits_; }

    bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    void assign(std::size_t i, bool v) noexcept { v ? set(i) : reset(i); }

    void clear() noexcept {
        for (auto& w : words_)
            w = 0;
    }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool none() const noexcept {
        for (auto w : words_)
            if (w)
                return false;
        return true;
    }
    bool any() const noexcept { return !none(); }

    bool is_subset_of(const BitSet& other) const noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i])
                return false;
        return true;
    }

    bool intersects(const BitSet& other) const noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & other.words_[i])
                return true;
        return false;
    }

    BitSet& operator&=(const BitSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= o.words_[i];
        return *this;
    }
    BitSet& operator|=(const BitSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] |= o.words_[i];
        return *this;
    }
    BitSet& operator^=(const BitSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] ^= o.words_[i];
        return *this;
    }
    BitSet& subtract(const BitSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= ~o.words_[i];
        return *this;
    }

    friend BitSet operator&(BitSet a, const BitSet& b) noexcept { return a &= b; }
    friend BitSet operator|(BitSet a, const BitSet& b) noexcept { return a |= b; }
    friend BitSet operator^(BitSet a, const BitSet& b) noexcept { return a ^= b; }

    /// Index of the lowest member, or size() when empty.
    std::size_t first() const noexcept { return next(0); }

    /// Index of the lowest member >= from, or size() when there is none.
    std::size_t next(std::size_t from) const noexcept {
        if (from >= bits_)
            return bits_;
        std::size_t w = from >> 6;
        std::uint64_t word = words_[w] & (~std::uint64_t{0} << (from & 63));
        while (true) {
            if (word)
                return (w << 6) + static_cast<std::size_t>(std::countr_zero(word));
            if (++w == words_.size())
                return bits_;
            word = words_[w];
        }
    }

    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        for (auto i = first(); i < bits_; i = next(i + 1))
            out.push_back(i);
        return out;
    }

    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    friend bool operator==(const BitSet&, const BitSet&) = default;

    /// Lexicographic by member list, smaller first member first.
    friend bool operator<(const BitSet& a, const BitSet& b) noexcept {
        auto i = a.first(), j = b.first();
        while (i < a.bits_ && j < b.bits_) {
            if (i != j)
                return i < j;
            i = a.next(i + 1);
            j = b.next(j + 1);
        }
        return i == a.bits_ && j < b.bits_;
    }

    std::size_t hash() const noexcept {
        std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ bits_;
        for (auto w : words_) {
            h ^= w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
            h *= 0xBF58476D1CE4E5B9ULL;
        }
        return static_cast<std::size_t>(h ^ (h >> 31));
    }

  private:
    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitSetHash {
    std::size_t operator()(const BitSet& b) const noexcept { return b.hash(); }
};

} // namespace laminar
