#include "timechain/zone.hpp"

#include <cassert>
#include <sstream>

#include "timechain/errors.hpp"

namespace timechain::zone {

Zone::Zone(std::size_t dim, bool) : dim_(dim), m_(dim * dim, Bound::infinity()) {}

Zone::Zone(std::size_t dim) : Zone(dim, true) {
    assert(dim >= 1);
    for (std::size_t i = 0; i < dim_; ++i) {
        m_[i * dim_ + i] = Bound::le_zero();
        m_[0 * dim_ + i] = Bound::le_zero(); // 0 - x_i <= 0, i.e. x_i >= 0
    }
    canonical_ = true;
    empty_ = false;
}

Zone Zone::zero(std::size_t dim) {
    Zone z(dim, true);
    for (auto& b : z.m_) b = Bound::le_zero();
    z.canonical_ = true;
    z.empty_ = false;
    return z;
}

void Zone::set(std::size_t i, std::size_t j, Bound b) {
    m_[i * dim_ + j] = b;
    canonical_ = false;
    empty_ = false;
}

bool Zone::empty() const {
    assert(canonical_);
    return empty_;
}

void Zone::close() {
    // Floyd-Warshall over the bound semiring.
    for (std::size_t k = 0; k < dim_; ++k) {
        for (std::size_t i = 0; i < dim_; ++i) {
            const Bound ik = m_[i * dim_ + k];
            if (ik.is_infinity()) continue;
            for (std::size_t j = 0; j < dim_; ++j) {
                const Bound through = ik + m_[k * dim_ + j];
                if (through < m_[i * dim_ + j]) m_[i * dim_ + j] = through;
            }
        }
    }
    empty_ = false;
    for (std::size_t i = 0; i < dim_; ++i) {
        if (m_[i * dim_ + i] < Bound::le_zero()) {
            empty_ = true;
            break;
        }
    }
    canonical_ = true;
}

Zone Zone::canonicalized() const {
    if (canonical_) return *this;
    Zone z = *this;
    z.close();
    return z;
}

Zone Zone::up() const {
    assert(canonical_);
    if (empty_) throw EmptyZone("up() on empty zone");
    Zone z = *this;
    for (std::size_t i = 1; i < dim_; ++i) z.m_[i * dim_ + 0] = Bound::infinity();
    // Closure is preserved: rows through the freed column stay tight.
    z.canonical_ = true;
    return z;
}

Zone Zone::constrain(std::size_t i, std::size_t j, Bound b) const {
    Zone z = canonicalized();
    if (z.empty_) return z;
    if (b < z.m_[i * dim_ + j]) {
        z.m_[i * dim_ + j] = b;
        z.close();
    }
    return z;
}

Zone Zone::reset(std::span<const std::size_t> clocks) const {
    assert(canonical_);
    if (empty_) throw EmptyZone("reset() on empty zone");
    Zone z = *this;
    for (std::size_t r : clocks) {
        assert(r != 0 && r < dim_);
        for (std::size_t j = 0; j < dim_; ++j) {
            z.m_[r * dim_ + j] = z.m_[0 * dim_ + j];
            z.m_[j * dim_ + r] = z.m_[j * dim_ + 0];
        }
        z.m_[r * dim_ + r] = Bound::le_zero();
    }
    z.canonical_ = true;
    return z;
}

Zone Zone::free(std::size_t clock) const {
    assert(canonical_);
    if (empty_) throw EmptyZone("free() on empty zone");
    assert(clock != 0 && clock < dim_);
    Zone z = *this;
    for (std::size_t j = 0; j < dim_; ++j) {
        if (j == clock) continue;
        z.m_[clock * dim_ + j] = Bound::infinity();
        z.m_[j * dim_ + clock] = z.m_[j * dim_ + 0];
    }
    z.m_[0 * dim_ + clock] = Bound::le_zero();
    z.canonical_ = true;
    return z;
}

bool Zone::includes(const Zone& other) const {
    assert(canonical_ && other.canonical_);
    assert(dim_ == other.dim_);
    if (other.empty_) return true;
    if (empty_) return false;
    for (std::size_t i = 0; i < dim_ * dim_; ++i) {
        if (other.m_[i] > m_[i]) return false;
    }
    return true;
}

Zone Zone::extrapolate(std::span<const std::int64_t> max_consts) const {
    assert(canonical_);
    assert(max_consts.size() == dim_);
    if (empty_) return *this;
    Zone z = *this;
    bool changed = false;
    for (std::size_t i = 0; i < dim_; ++i) {
        const Bound lift_above = Bound::nonstrict(i == 0 ? 0 : max_consts[i]);
        for (std::size_t j = 0; j < dim_; ++j) {
            if (i == j) continue;
            Bound& b = z.m_[i * dim_ + j];
            if (b.is_infinity()) continue;
            if (b > lift_above) {
                b = Bound::infinity();
                changed = true;
            } else if (j != 0 && b < Bound::strict(-max_consts[j])) {
                b = Bound::strict(-max_consts[j]);
                changed = true;
            }
        }
    }
    if (changed) z.close();
    return z;
}

bool Zone::operator==(const Zone& other) const {
    if (dim_ != other.dim_) return false;
    if (canonical_ && other.canonical_ && empty_ != other.empty_) return false;
    if (canonical_ && other.canonical_ && empty_) return true;
    return m_ == other.m_;
}

std::string Zone::to_string(std::span<const std::string> names) const {
    if (canonical_ && empty_) return "false";
    auto name = [&](std::size_t i) -> std::string {
        if (i < names.size()) return names[i];
        return "x" + std::to_string(i);
    };
    std::ostringstream oss;
    bool first = true;
    auto emit = [&](const std::string& text) {
        if (!first) oss << " && ";
        oss << text;
        first = false;
    };
    for (std::size_t i = 1; i < dim_; ++i) {
        const Bound upper = m_[i * dim_ + 0];
        const Bound lower = m_[0 * dim_ + i];
        if (!lower.is_infinity() && lower < Bound::le_zero()) {
            std::ostringstream c;
            c << name(i) << " >" << (lower.is_strict() ? " " : "= ") << -lower.value();
            emit(c.str());
        }
        if (!upper.is_infinity()) {
            std::ostringstream c;
            c << name(i) << " " << upper.relation_text() << " " << upper.value();
            emit(c.str());
        }
    }
    for (std::size_t i = 1; i < dim_; ++i) {
        for (std::size_t j = 1; j < dim_; ++j) {
            if (i == j) continue;
            const Bound b = m_[i * dim_ + j];
            if (b.is_infinity()) continue;
            // Skip differences already implied by the individual bounds.
            const Bound implied = m_[i * dim_ + 0] + m_[0 * dim_ + j];
            if (implied <= b) continue;
            std::ostringstream c;
            c << name(i) << " - " << name(j) << " " << b.relation_text() << " " << b.value();
            emit(c.str());
        }
    }
    if (first) return "true";
    return oss.str();
}

} // namespace timechain::zone
