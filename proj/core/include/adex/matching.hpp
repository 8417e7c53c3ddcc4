#pragma once

#include <vector>

#include "adex/model.hpp"
#include "adex/types.hpp"

namespace adex::matching {

using model::Allocation;

// Bipartite instance: weights(i, j) is the residual expected revenue of
// seating advertiser i (row) in slot j+1 (column). Rows are advertiser ids.
struct WeightedBipartite {
  Matrix weights;

  int advertisers() const { return static_cast<int>(weights.rows()); }
  int slots() const { return static_cast<int>(weights.cols()); }
};

struct TopKEntry {
  AdvertiserId advertiser = 0;
  double weight = 0.0;
};

// At most `capacity` (advertiser, weight) entries, unique by advertiser,
// sorted by weight descending with ties broken by ascending advertiser id.
class TopKList {
 public:
  TopKList() = default;
  explicit TopKList(int capacity) : capacity_(capacity) {}

  int capacity() const { return capacity_; }
  const std::vector<TopKEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Inserts an entry, keeping only the best `capacity` and deduplicating by
  // advertiser (the higher weight wins).
  void push(AdvertiserId advertiser, double weight);

 private:
  int capacity_ = 0;
  std::vector<TopKEntry> entries_;
};

// Top-k of the multiset union. Associative and commutative with the empty
// list as identity, so any reduction tree over per-chunk lists gives the same
// result; this is the combine step of the tree-aggregation scheme.
TopKList merge_topk(const TopKList& a, const TopKList& b, int k);

struct MatchResult {
  Allocation allocation;
  double total = 0.0;  // sum of seated residual weights, slots in ascending order
};

// Exhaustive search over all injective partial assignments; slots stay empty
// when every remaining residual is negative. Used as the testing oracle.
// Guard: n*(n-1)*...*(n-k+1) must not exceed 10^7.
MatchResult brute_force_match(const WeightedBipartite& g);

// Optimal assignment via shortest-augmenting-path Hungarian phases on the
// full graph, followed by the shared canonical tie-break (lexicographically
// smallest optimal allocation, empty slots last). Same contract as the
// brute-force oracle.
MatchResult hungarian(const WeightedBipartite& g);

// Union over slots of the k advertisers with the highest residual for that
// slot (ties by ascending id); at most k^2 ids, returned sorted ascending.
// Uses a size-k priority queue per slot, O(n k log k).
std::vector<AdvertiserId> top_k_candidates(const WeightedBipartite& g);

// Data-parallel variant: partitions advertisers into chunks, builds per-chunk
// per-slot TopKLists and folds them with merge_topk. Identical output to the
// sequential scan for any chunking.
std::vector<AdvertiserId> top_k_candidates_parallel(const WeightedBipartite& g, unsigned threads);

// Hungarian restricted to top_k_candidates; equal to the full solve in both
// total and (canonical) allocation.
MatchResult solve_reduced(const WeightedBipartite& g);
MatchResult solve_reduced(const WeightedBipartite& g, unsigned topk_threads);

namespace detail {

// Max-weight assignment of slots over the given candidate columns.
// allow_empty pads with zero-weight sinks so slots may stay unmatched; with
// it unset every listed slot must be filled. Deterministic for identical
// inputs. Returned value sums matched weights in ascending slot order.
//
// slot_dual and cand_dual are optimal potentials in max form: for every
// (slot r, candidate c), slot_dual[r] + cand_dual[c] >= weight with equality
// on edges usable by an optimal assignment; dummy_dual plays cand_dual's
// role for the leave-empty option.
struct KernelResult {
  std::vector<AdvertiserId> slot_to_adv;  // per listed slot, -1 = empty
  double value = 0.0;
  std::vector<double> slot_dual;
  std::vector<double> cand_dual;
  double dummy_dual = 0.0;
};
KernelResult assign_max(const Matrix& weights, const std::vector<AdvertiserId>& candidates,
                        bool allow_empty);
KernelResult assign_max_on(const Matrix& weights, const std::vector<AdvertiserId>& candidates,
                           const std::vector<int>& slot_ids, bool allow_empty);

// Lexicographically smallest allocation among those whose total is within
// eps of opt_value, restricted to the candidate pool (and to the listed
// slots in the _on variant; other slots stay empty). Slots whose dual
// certificate admits a single candidate commit without re-solving; only
// genuine ties cost extra kernel runs. `precomputed` may pass the kernel
// result for (pool, slot_ids) to avoid recomputing it.
Allocation canonical_extract(const Matrix& weights, std::vector<AdvertiserId> pool,
                             double opt_value, bool allow_empty, double eps = 1e-9,
                             const KernelResult* precomputed = nullptr);
Allocation canonical_extract_on(const Matrix& weights, std::vector<AdvertiserId> pool,
                                const std::vector<int>& slot_ids, double opt_value,
                                bool allow_empty, double eps = 1e-9,
                                const KernelResult* precomputed = nullptr);

double allocation_total(const Matrix& weights, const Allocation& a);

}  // namespace detail

}  // namespace adex::matching
