#pragma once

#include <cstdint>

namespace ffac {

/// Operation counters used by the complexity probes.
///
/// Every kernel bumps the matching field; tests and the benchmark reset the
/// counters, run a workload, and read the totals. Counters are thread-local,
/// so concurrent workloads on different threads do not interfere.
struct OpCounters {
    std::uint64_t evaluations = 0;       // De Casteljau point evaluations
    std::uint64_t interpolations = 0;    // (d+1)x(d+1) matrix times point-vector products
    std::uint64_t force_samples = 0;     // displacement_at queries
    std::uint64_t box_tests = 0;         // box_inter calls
    std::uint64_t segment_tests = 0;     // segment/segment predicate evaluations
    std::uint64_t sort_comparisons = 0;  // comparisons in global sorts and insertion repairs
    std::uint64_t flips = 0;
    std::uint64_t splits = 0;

    std::uint64_t total() const {
        return evaluations + interpolations + force_samples + box_tests + segment_tests +
               sort_comparisons;
    }
};

inline thread_local OpCounters g_counters;

inline OpCounters& counters() { return g_counters; }
inline void reset_counters() { g_counters = OpCounters{}; }

}  // namespace ffac
