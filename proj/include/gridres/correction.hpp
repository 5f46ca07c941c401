#pragma once

#include "gridres/finite_grid.hpp"

#include <cstdint>
#include <functional>
#include <list>
#include <mutex>
#include <string>
#include <unordered_map>

namespace gridres {

/// Cache key for a near-field correction value: symmetry-canonicalized
/// displacement plus the exact bit pattern of alpha.
struct CorrectionKey {
    int dx = 0;
    int dy = 0;
    std::uint64_t alpha_bits = 0;

    friend bool operator==(const CorrectionKey&, const CorrectionKey&) = default;
};

struct CorrectionKeyHash {
    std::size_t operator()(const CorrectionKey& k) const noexcept;
};

[[nodiscard]] CorrectionKey correction_key(Displacement d, const Anisotropy& alpha);

struct CacheStats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::size_t size = 0;
    double hit_rate = 0.0;
};

/// Bounded least-recently-used map CorrectionKey -> value with hit/miss
/// counters. get_or_compute is atomic per key for concurrent callers; a miss
/// computes outside the lock, so duplicate concurrent computation of the same
/// key can happen (results are deterministic and identical).
class CorrectionCache {
public:
    explicit CorrectionCache(std::size_t capacity);

    double get_or_compute(const CorrectionKey& key, const std::function<double()>& compute);

    [[nodiscard]] CacheStats stats() const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    void clear();

private:
    using Entry = std::pair<CorrectionKey, double>;

    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::list<Entry> lru_;  // front = most recently used
    std::unordered_map<CorrectionKey, std::list<Entry>::iterator, CorrectionKeyHash> index_;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
};

struct HybridConfig {
    double limit_scale = 25.0;
    std::size_t cache_capacity = 10000;
    QuadratureConfig quadrature{};
};

enum class Method { Theta, Hybrid, Oracle, AnalyticInfinite, ExactInfinite };

[[nodiscard]] std::string method_name(Method m);

/// Resistance value plus provenance metadata.
struct ResistanceResult {
    double ohms = 0.0;
    Method method = Method::Hybrid;
    long corrections_applied = 0;
    CacheStats cache{};
};

/// Near-field radius-squared threshold: limit_scale * max(alpha, 1/alpha).
[[nodiscard]] double near_field_limit(const Anisotropy& alpha, const HybridConfig& cfg);

/// Inclusive elliptical membership test: alpha*dx^2 + dy^2 <= limit.
[[nodiscard]] bool within_near_field(Displacement d, const Anisotropy& alpha, double limit);

/// Cached correction omega_exact - omega_analytic_infinite for a near-field
/// displacement. Repeated calls return bit-identical values.
double delta_omega(Displacement d, const Anisotropy& alpha, CorrectionCache& cache,
                   const HybridConfig& cfg);

/// Infinite-grid resistance: analytic baseline plus the cached correction
/// inside the near-field ellipse, the baseline alone outside it.
double omega_hybrid(Displacement d, const Anisotropy& alpha, CorrectionCache& cache,
                    const HybridConfig& cfg);

/// Finite-grid hybrid: theta closed form plus per-mirror-image near-field
/// corrections (cross images +, self images -).
ResistanceResult r_finite_hybrid(NodeCoord s, NodeCoord d, const GridSpec& grid,
                                 CorrectionCache& cache, const HybridConfig& cfg);

[[nodiscard]] CacheStats cache_stats(const CorrectionCache& cache);

}  // namespace gridres
