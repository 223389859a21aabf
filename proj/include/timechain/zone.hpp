#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace timechain::zone {

/// Bound of a difference constraint: (value, <=) or (value, <) or +infinity.
///
/// Bounds are totally ordered so that (v, <=) > (v, <) > (v-1, <=) and
/// infinity is the greatest element. Internally a bound is one integer,
/// 2*value + (1 if non-strict), which makes comparison plain integer
/// comparison and path addition a single add.
class Bound {
public:
    constexpr Bound() : rank_(kInfinityRank) {}

    static constexpr Bound infinity() { return Bound(kInfinityRank); }
    static constexpr Bound nonstrict(std::int64_t value) { return Bound(2 * value + 1); }
    static constexpr Bound strict(std::int64_t value) { return Bound(2 * value); }
    static constexpr Bound le_zero() { return nonstrict(0); }

    constexpr bool is_infinity() const { return rank_ == kInfinityRank; }
    constexpr bool is_strict() const { return !is_infinity() && (rank_ & 1) == 0; }
    /// Finite bound value; meaningless for infinity.
    constexpr std::int64_t value() const { return rank_ >> 1; }

    friend constexpr bool operator==(Bound a, Bound b) { return a.rank_ == b.rank_; }
    friend constexpr bool operator!=(Bound a, Bound b) { return a.rank_ != b.rank_; }
    friend constexpr bool operator<(Bound a, Bound b) { return a.rank_ < b.rank_; }
    friend constexpr bool operator<=(Bound a, Bound b) { return a.rank_ <= b.rank_; }
    friend constexpr bool operator>(Bound a, Bound b) { return a.rank_ > b.rank_; }
    friend constexpr bool operator>=(Bound a, Bound b) { return a.rank_ >= b.rank_; }

    /// Path addition: (v1,s1) + (v2,s2) = (v1+v2, strict unless both non-strict).
    friend constexpr Bound operator+(Bound a, Bound b) {
        if (a.is_infinity() || b.is_infinity()) return infinity();
        return Bound(a.rank_ + b.rank_ - ((a.rank_ | b.rank_) & 1));
    }

    /// Comparison operator text, e.g. "<=" for a non-strict upper bound.
    std::string relation_text() const { return is_strict() ? "<" : "<="; }

private:
    explicit constexpr Bound(std::int64_t rank) : rank_(rank) {}

    static constexpr std::int64_t kInfinityRank = INT64_MAX;
    std::int64_t rank_;
};

/// Clock zone as a difference bound matrix. Entry (i, j) bounds x_i - x_j;
/// clock 0 is the constant-zero reference clock. Value-semantic: every
/// operation returns a new zone.
class Zone {
public:
    /// Universal zone over `dim` clocks (reference clock included):
    /// all clocks >= 0, otherwise unconstrained. Canonical.
    explicit Zone(std::size_t dim);

    /// Trivial zone over the reference clock alone.
    Zone() : Zone(1) {}

    /// Zone where every clock equals 0. Canonical.
    static Zone zero(std::size_t dim);

    std::size_t dim() const { return dim_; }

    Bound at(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }
    /// Raw entry write; clears the canonical flag.
    void set(std::size_t i, std::size_t j, Bound b);

    bool is_canonical() const { return canonical_; }
    /// Emptiness; the zone must be canonical.
    bool empty() const;

    /// Shortest-path closure (tightest equivalent matrix). Idempotent.
    /// An inconsistent matrix yields an empty zone, flagged not thrown.
    Zone canonicalized() const;

    /// Delay future: drop upper bounds of individual clocks, keep differences.
    /// Requires canonical non-empty input; result is canonical.
    Zone up() const;

    /// Intersection with x_i - x_j (<= | <) bound. Result canonical, may be empty.
    Zone constrain(std::size_t i, std::size_t j, Bound b) const;

    /// Reset the given clocks to 0 (reference clock not allowed).
    /// Requires canonical non-empty input; result is canonical.
    Zone reset(std::span<const std::size_t> clocks) const;

    /// Forget everything about one clock except x >= 0.
    /// Requires canonical non-empty input; result is canonical.
    Zone free(std::size_t clock) const;

    /// True iff every valuation of `other` lies in this zone. Both canonical.
    bool includes(const Zone& other) const;

    /// k-normalization with one maximum constant per clock (index 0 entry is
    /// ignored). Bounds above (k_i, <=) are lifted to infinity, bounds below
    /// (-k_j, <) are clamped to (-k_j, <). Result canonical.
    Zone extrapolate(std::span<const std::int64_t> max_consts) const;

    bool operator==(const Zone& other) const;

    /// Conjunction of difference constraints, e.g. "x <= 5 && y - x < 2".
    /// `names` gives display names per clock index; index 0 unused.
    std::string to_string(std::span<const std::string> names) const;

private:
    Zone(std::size_t dim, bool fill_infinity);
    void close();

    std::size_t dim_;
    std::vector<Bound> m_;
    bool canonical_ = false;
    bool empty_ = false;
};

} // namespace timechain::zone
