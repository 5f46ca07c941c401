#include "gridres/correction.hpp"

#include <bit>
#include <cassert>
#include <cmath>

namespace gridres {

std::size_t CorrectionKeyHash::operator()(const CorrectionKey& k) const noexcept {
    std::uint64_t h = k.alpha_bits;
    h ^= (std::uint64_t(std::uint32_t(k.dx)) << 32 | std::uint32_t(k.dy)) + 0x9e3779b97f4a7c15ULL +
         (h << 6) + (h >> 2);
    return std::hash<std::uint64_t>{}(h);
}

CorrectionKey correction_key(Displacement d, const Anisotropy& alpha) {
    const double a = alpha.alpha == 0.0 ? 0.0 : alpha.alpha;  // normalize -0.0
    return {std::abs(d.dx), std::abs(d.dy), std::bit_cast<std::uint64_t>(a)};
}

CorrectionCache::CorrectionCache(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw std::invalid_argument("cache capacity must be >= 1");
}

double CorrectionCache::get_or_compute(const CorrectionKey& key,
                                       const std::function<double()>& compute) {
    {
        std::lock_guard lock(mutex_);
        auto it = index_.find(key);
        if (it != index_.end()) {
            ++hits_;
            lru_.splice(lru_.begin(), lru_, it->second);
            return it->second->second;
        }
        ++misses_;
    }

    const double value = compute();

    std::lock_guard lock(mutex_);
    auto it = index_.find(key);
    if (it != index_.end()) {
        // Another caller inserted the same key meanwhile; values are identical.
        lru_.splice(lru_.begin(), lru_, it->second);
        return it->second->second;
    }
    lru_.emplace_front(key, value);
    index_[key] = lru_.begin();
    if (lru_.size() > capacity_) {
        index_.erase(lru_.back().first);
        lru_.pop_back();
    }
    return value;
}

CacheStats CorrectionCache::stats() const {
    std::lock_guard lock(mutex_);
    CacheStats s;
    s.hits = hits_;
    s.misses = misses_;
    s.size = lru_.size();
    const std::uint64_t total = hits_ + misses_;
    s.hit_rate = total == 0 ? 0.0 : double(hits_) / double(total);
    return s;
}

std::size_t CorrectionCache::size() const {
    std::lock_guard lock(mutex_);
    return lru_.size();
}

void CorrectionCache::clear() {
    std::lock_guard lock(mutex_);
    lru_.clear();
    index_.clear();
    hits_ = 0;
    misses_ = 0;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::Theta: return "theta";
        case Method::Hybrid: return "hybrid";
        case Method::Oracle: return "oracle";
        case Method::AnalyticInfinite: return "analytic-infinite";
        case Method::ExactInfinite: return "exact-infinite";
    }
    return "unknown";
}

double near_field_limit(const Anisotropy& alpha, const HybridConfig& cfg) {
    if (!(cfg.limit_scale > 0.0))
        throw std::invalid_argument("limit_scale must be positive");
    return cfg.limit_scale * std::max(alpha.alpha, 1.0 / alpha.alpha);
}

bool within_near_field(Displacement d, const Anisotropy& alpha, double limit) {
    return alpha.alpha * double(d.dx) * d.dx + double(d.dy) * d.dy <= limit;
}

double delta_omega(Displacement d, const Anisotropy& alpha, CorrectionCache& cache,
                   const HybridConfig& cfg) {
    assert(within_near_field(d, alpha, near_field_limit(alpha, cfg)) &&
           "delta_omega called outside the near-field ellipse");
    const Displacement canon{std::abs(d.dx), std::abs(d.dy)};
    return cache.get_or_compute(correction_key(canon, alpha), [&] {
        return omega_exact(canon, alpha, cfg.quadrature) -
               omega_analytic_infinite(canon, alpha);
    });
}

double omega_hybrid(Displacement d, const Anisotropy& alpha, CorrectionCache& cache,
                    const HybridConfig& cfg) {
    const double analytic = omega_analytic_infinite(d, alpha);
    if (within_near_field(d, alpha, near_field_limit(alpha, cfg)))
        return analytic + delta_omega(d, alpha, cache, cfg);
    return analytic;
}

ResistanceResult r_finite_hybrid(NodeCoord s, NodeCoord d, const GridSpec& grid,
                                 CorrectionCache& cache, const HybridConfig& cfg) {
    require_in_bounds(s, grid);
    require_in_bounds(d, grid);
    if (s == d) return {0.0, Method::Hybrid, 0, cache.stats()};

    const Anisotropy alpha = grid.anisotropy();
    const double limit = near_field_limit(alpha, cfg);
    const double base = r_theta_closed(s, d, grid);

    const std::array<std::tuple<NodeCoord, NodeCoord, int>, 4> groups{{
        {s, d, +1}, {d, s, +1}, {s, s, -1}, {d, d, -1}}};

    double correction = 0.0;
    long applied = 0;
    for (const auto& [a, b, sign] : groups) {
        for (const SignedDisplacement& img :
             image_displacements_in_ellipse(a, b, grid, limit, sign)) {
            if (img.d.dx == 0 && img.d.dy == 0) continue;  // self term, zero by definition
            correction += img.sign * delta_omega(img.d, alpha, cache, cfg);
            ++applied;
        }
    }

    ResistanceResult result;
    result.ohms = base + 0.5 * grid.r0() * correction;
    result.method = Method::Hybrid;
    result.corrections_applied = applied;
    result.cache = cache.stats();
    return result;
}

CacheStats cache_stats(const CorrectionCache& cache) { return cache.stats(); }

}  // namespace gridres
