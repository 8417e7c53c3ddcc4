#include "adex/matching.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

namespace adex::matching {

void TopKList::push(AdvertiserId advertiser, double weight) {
  for (auto& e : entries_) {
    if (e.advertiser == advertiser) {
      if (weight > e.weight) {
        e.weight = weight;
        std::sort(entries_.begin(), entries_.end(), [](const TopKEntry& a, const TopKEntry& b) {
          if (a.weight != b.weight) return a.weight > b.weight;
          return a.advertiser < b.advertiser;
        });
      }
      return;
    }
  }
  TopKEntry entry{advertiser, weight};
  auto pos = std::find_if(entries_.begin(), entries_.end(), [&](const TopKEntry& e) {
    if (e.weight != entry.weight) return e.weight < entry.weight;
    return e.advertiser > entry.advertiser;
  });
  entries_.insert(pos, entry);
  if (static_cast<int>(entries_.size()) > capacity_) entries_.pop_back();
}

TopKList merge_topk(const TopKList& a, const TopKList& b, int k) {
  TopKList out(k);
  for (const auto& e : a.entries()) out.push(e.advertiser, e.weight);
  for (const auto& e : b.entries()) out.push(e.advertiser, e.weight);
  return out;
}

namespace detail {

double allocation_total(const Matrix& weights, const Allocation& a) {
  double total = 0.0;
  for (int slot = 1; slot <= a.slot_count(); ++slot)
    if (auto adv = a.advertiser_at(slot))
      total += weights(static_cast<std::size_t>(*adv), static_cast<std::size_t>(slot - 1));
  return total;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path assignment over an explicit slot subset.
// Minimization on cost = -weight; dummy columns of cost 0 let slots stay
// empty. One phase per slot, O(slots * columns) each.
KernelResult assign_max_slots(const Matrix& weights, const std::vector<AdvertiserId>& candidates,
                              const std::vector<int>& slot_ids, bool allow_empty) {
  const int rows = static_cast<int>(slot_ids.size());
  const int real = static_cast<int>(candidates.size());
  const int cols = real + (allow_empty ? rows : 0);
  if (rows == 0) return {{}, 0.0};
  if (cols < rows) throw std::invalid_argument("not enough candidates for a forced assignment");

  auto cost = [&](int r, int c) -> double {
    if (c >= real) return 0.0;
    return -weights(static_cast<std::size_t>(candidates[static_cast<std::size_t>(c)]),
                    static_cast<std::size_t>(slot_ids[static_cast<std::size_t>(r)] - 1));
  };

  std::vector<double> u(static_cast<std::size_t>(rows) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(cols) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(cols) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(cols) + 1, 0);
  std::vector<double> minv(static_cast<std::size_t>(cols) + 1, kInf);
  std::vector<char> used(static_cast<std::size_t>(cols) + 1, 0);

  for (int i = 1; i <= rows; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= cols; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  KernelResult res;
  res.slot_to_adv.assign(static_cast<std::size_t>(rows), -1);
  for (int j = 1; j <= cols; ++j) {
    const int r = p[static_cast<std::size_t>(j)];
    if (r != 0 && j - 1 < real)
      res.slot_to_adv[static_cast<std::size_t>(r - 1)] = candidates[static_cast<std::size_t>(j - 1)];
  }
  // matched weights summed in ascending slot order so every method that
  // reaches the same allocation reports bit-identical totals
  for (int r = 0; r < rows; ++r) {
    const AdvertiserId a = res.slot_to_adv[static_cast<std::size_t>(r)];
    if (a >= 0)
      res.value += weights(static_cast<std::size_t>(a),
                           static_cast<std::size_t>(slot_ids[static_cast<std::size_t>(r)] - 1));
  }
  // max-form potentials: the minimization duals flip sign
  res.slot_dual.resize(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) res.slot_dual[static_cast<std::size_t>(r)] = -u[static_cast<std::size_t>(r + 1)];
  res.cand_dual.resize(static_cast<std::size_t>(real));
  for (int c = 0; c < real; ++c) res.cand_dual[static_cast<std::size_t>(c)] = -v[static_cast<std::size_t>(c + 1)];
  res.dummy_dual = kInf;
  for (int c = real; c < cols; ++c)
    res.dummy_dual = std::min(res.dummy_dual, -v[static_cast<std::size_t>(c + 1)]);
  return res;
}

std::vector<int> all_slots(int k) {
  std::vector<int> s(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) s[static_cast<std::size_t>(j)] = j + 1;
  return s;
}

}  // namespace

KernelResult assign_max(const Matrix& weights, const std::vector<AdvertiserId>& candidates,
                        bool allow_empty) {
  return assign_max_slots(weights, candidates, all_slots(static_cast<int>(weights.cols())),
                          allow_empty);
}

KernelResult assign_max_on(const Matrix& weights, const std::vector<AdvertiserId>& candidates,
                           const std::vector<int>& slot_ids, bool allow_empty) {
  return assign_max_slots(weights, candidates, slot_ids, allow_empty);
}

Allocation canonical_extract_on(const Matrix& weights, std::vector<AdvertiserId> pool,
                                const std::vector<int>& slot_ids, double opt_value,
                                bool allow_empty, double eps,
                                const KernelResult* precomputed) {
  const int k = static_cast<int>(weights.cols());
  std::sort(pool.begin(), pool.end());
  Allocation alloc(k);
  if (slot_ids.empty()) return alloc;

  KernelResult local;
  if (!precomputed) {
    local = assign_max_slots(weights, pool, slot_ids, allow_empty);
    precomputed = &local;
  }
  const KernelResult& kernel = *precomputed;

  // An edge can appear in a near-optimal assignment only if its dual slack is
  // near zero, so most slots have a unique certified candidate and commit for
  // free; re-solves happen only on genuine ties.
  const double slack_tol = eps + 1e-7;

  std::vector<char> used(pool.size(), 0);
  std::vector<std::size_t> passers;
  double suffix_opt = opt_value;  // optimal total over the remaining listed slots

  for (std::size_t t = 0; t < slot_ids.size(); ++t) {
    const int j = slot_ids[t];
    const double u_j = kernel.slot_dual[t];

    passers.clear();
    for (std::size_t idx = 0; idx < pool.size(); ++idx) {
      if (used[idx]) continue;
      const double w_aj =
          weights(static_cast<std::size_t>(pool[idx]), static_cast<std::size_t>(j - 1));
      if (u_j + kernel.cand_dual[idx] - w_aj <= slack_tol) passers.push_back(idx);
    }
    const bool empty_passes = allow_empty && u_j + kernel.dummy_dual - 0.0 <= slack_tol;

    if (passers.size() == 1 && !empty_passes) {
      const std::size_t idx = passers.front();
      alloc.assign(j, pool[idx]);
      used[idx] = 1;
      suffix_opt -= weights(static_cast<std::size_t>(pool[idx]), static_cast<std::size_t>(j - 1));
      continue;
    }
    if (passers.empty() && empty_passes) continue;  // slot stays empty

    // tie (or an anomalously empty certificate): fall back to exact re-solves
    // in lexicographic order
    const std::vector<int> rest(slot_ids.begin() + static_cast<std::ptrdiff_t>(t) + 1,
                                slot_ids.end());
    std::vector<AdvertiserId> avail;
    for (std::size_t idx = 0; idx < pool.size(); ++idx)
      if (!used[idx]) avail.push_back(pool[idx]);

    std::vector<std::size_t> try_set = passers;
    if (try_set.empty()) {
      for (std::size_t idx = 0; idx < pool.size(); ++idx)
        if (!used[idx]) try_set.push_back(idx);
    }

    const double rest_any = assign_max_slots(weights, avail, rest, allow_empty).value;
    bool committed = false;
    for (std::size_t idx : try_set) {
      const AdvertiserId a = pool[idx];
      const double w_aj = weights(static_cast<std::size_t>(a), static_cast<std::size_t>(j - 1));
      if (w_aj + rest_any < suffix_opt - eps) continue;
      std::vector<AdvertiserId> remaining;
      for (AdvertiserId b : avail)
        if (b != a) remaining.push_back(b);
      double sub = 0.0;
      bool feasible = true;
      if (!rest.empty()) {
        if (!allow_empty && remaining.size() < rest.size()) {
          feasible = false;
        } else {
          sub = assign_max_slots(weights, remaining, rest, allow_empty).value;
        }
      }
      if (feasible && w_aj + sub >= suffix_opt - eps) {
        alloc.assign(j, a);
        used[idx] = 1;
        suffix_opt = sub;
        committed = true;
        break;
      }
    }
    if (!committed) {
      if (!allow_empty)
        throw std::logic_error("forced assignment found no extendable candidate");
      suffix_opt = rest_any;  // slot stays empty
    }
  }
  return alloc;
}

Allocation canonical_extract(const Matrix& weights, std::vector<AdvertiserId> pool,
                             double opt_value, bool allow_empty, double eps,
                             const KernelResult* precomputed) {
  return canonical_extract_on(weights, std::move(pool), all_slots(static_cast<int>(weights.cols())),
                              opt_value, allow_empty, eps, precomputed);
}

}  // namespace detail

namespace {

std::vector<AdvertiserId> all_advertisers(int n) {
  std::vector<AdvertiserId> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  return ids;
}

void check_brute_force_guard(int n, int k) {
  double count = 1.0;
  for (int i = 0; i < std::min(n, k); ++i) count *= static_cast<double>(n - i);
  if (count > 1e7)
    throw std::length_error("instance too large for brute force (n falling-factorial k > 1e7)");
}

}  // namespace

MatchResult brute_force_match(const WeightedBipartite& g) {
  const int n = g.advertisers();
  const int k = g.slots();
  check_brute_force_guard(n, k);

  std::vector<char> used(static_cast<std::size_t>(std::max(n, 1)), 0);
  double best = 0.0;

  // pass 1: exact optimum over all injective partial assignments
  auto max_rec = [&](auto&& self, int slot, double sum) -> void {
    if (slot > k) {
      if (sum > best) best = sum;
      return;
    }
    self(self, slot + 1, sum);  // leave empty
    for (int a = 0; a < n; ++a) {
      if (used[static_cast<std::size_t>(a)]) continue;
      used[static_cast<std::size_t>(a)] = 1;
      self(self, slot + 1,
           sum + g.weights(static_cast<std::size_t>(a), static_cast<std::size_t>(slot - 1)));
      used[static_cast<std::size_t>(a)] = 0;
    }
  };
  max_rec(max_rec, 1, 0.0);

  // pass 2: first allocation in lexicographic order (ids ascending, empty
  // last) whose total reaches the optimum within eps — the canonical one
  const double eps = 1e-9;
  Allocation alloc(k);
  bool found = false;
  auto lex_rec = [&](auto&& self, int slot, double sum) -> void {
    if (found) return;
    if (slot > k) {
      if (sum >= best - eps) found = true;
      return;
    }
    for (int a = 0; a < n && !found; ++a) {
      if (used[static_cast<std::size_t>(a)]) continue;
      used[static_cast<std::size_t>(a)] = 1;
      alloc.assign(slot, a);
      self(self, slot + 1,
           sum + g.weights(static_cast<std::size_t>(a), static_cast<std::size_t>(slot - 1)));
      if (!found) {
        alloc.clear_slot(slot);
        used[static_cast<std::size_t>(a)] = 0;
      }
    }
    if (!found) self(self, slot + 1, sum);  // empty sorts after every advertiser
  };
  lex_rec(lex_rec, 1, 0.0);

  return {alloc, detail::allocation_total(g.weights, alloc)};
}

MatchResult hungarian(const WeightedBipartite& g) {
  const int n = g.advertisers();
  const int k = g.slots();
  if (n < 1 || k < 1) throw std::invalid_argument("hungarian needs n >= 1 and k >= 1");

  const auto full = detail::assign_max(g.weights, all_advertisers(n), true);
  // the canonical optimum always lies inside the reduced candidate pool
  auto pool = top_k_candidates(g);
  Allocation alloc = detail::canonical_extract(g.weights, std::move(pool), full.value, true);
  return {alloc, detail::allocation_total(g.weights, alloc)};
}

std::vector<AdvertiserId> top_k_candidates(const WeightedBipartite& g) {
  const int n = g.advertisers();
  const int k = g.slots();

  // One sequential sweep of the row-major matrix, each slot keeping its k
  // best (weight desc, id asc). Ids arrive in ascending order, so an entry
  // displaces the current worst only on a strictly larger weight, and the
  // common case is a single compare.
  std::vector<std::vector<TopKEntry>> best(static_cast<std::size_t>(k));
  for (auto& b : best) b.reserve(static_cast<std::size_t>(k));
  std::vector<double> worst_w(static_cast<std::size_t>(k),
                              std::numeric_limits<double>::infinity());
  std::vector<int> worst_at(static_cast<std::size_t>(k), -1);

  auto refresh_worst = [&](int j) {
    const auto& b = best[static_cast<std::size_t>(j)];
    int at = 0;
    for (int t = 1; t < static_cast<int>(b.size()); ++t) {
      const auto& cur = b[static_cast<std::size_t>(t)];
      const auto& w = b[static_cast<std::size_t>(at)];
      if (cur.weight < w.weight ||
          (cur.weight == w.weight && cur.advertiser > w.advertiser))
        at = t;
    }
    worst_at[static_cast<std::size_t>(j)] = at;
    worst_w[static_cast<std::size_t>(j)] = b[static_cast<std::size_t>(at)].weight;
  };

  const std::vector<double>& data = g.weights.data();
  const int warmup = std::min(n, k);
  for (int i = 0; i < warmup; ++i) {
    const double* row = &data[static_cast<std::size_t>(i) * static_cast<std::size_t>(k)];
    for (int j = 0; j < k; ++j) {
      best[static_cast<std::size_t>(j)].push_back({i, row[j]});
      if (static_cast<int>(best[static_cast<std::size_t>(j)].size()) == k) refresh_worst(j);
    }
  }
  const double* thresholds = worst_w.data();
  for (int i = warmup; i < n; ++i) {
    const double* row = &data[static_cast<std::size_t>(i) * static_cast<std::size_t>(k)];
    // branchless pre-check over the whole row vectorizes; rows that beat no
    // threshold (almost all of them) cost one sweep
    bool any = false;
    for (int j = 0; j < k; ++j) any |= row[j] > thresholds[j];
    if (!any) continue;
    for (int j = 0; j < k; ++j) {
      if (row[j] > worst_w[static_cast<std::size_t>(j)]) {
        best[static_cast<std::size_t>(j)][static_cast<std::size_t>(
            worst_at[static_cast<std::size_t>(j)])] = {i, row[j]};
        refresh_worst(j);
      }
    }
  }

  std::set<AdvertiserId> pool;
  for (const auto& b : best)
    for (const auto& e : b) pool.insert(e.advertiser);
  return {pool.begin(), pool.end()};
}

std::vector<AdvertiserId> top_k_candidates_parallel(const WeightedBipartite& g, unsigned threads) {
  const int n = g.advertisers();
  const int k = g.slots();
  if (threads <= 1 || n < 2 * static_cast<int>(threads)) return top_k_candidates(g);

  const int chunks = static_cast<int>(threads);
  auto chunk_lists = [&](int chunk) {
    std::vector<TopKList> lists(static_cast<std::size_t>(k), TopKList(k));
    const int lo = static_cast<int>(static_cast<long long>(n) * chunk / chunks);
    const int hi = static_cast<int>(static_cast<long long>(n) * (chunk + 1) / chunks);
    for (int i = lo; i < hi; ++i)
      for (int j = 0; j < k; ++j)
        lists[static_cast<std::size_t>(j)].push(
            i, g.weights(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
    return lists;
  };

  std::vector<std::future<std::vector<TopKList>>> futures;
  futures.reserve(static_cast<std::size_t>(chunks));
  for (int c = 0; c < chunks; ++c)
    futures.push_back(std::async(std::launch::async, chunk_lists, c));

  std::vector<std::vector<TopKList>> partials;
  partials.reserve(static_cast<std::size_t>(chunks));
  for (auto& f : futures) partials.push_back(f.get());

  // pairwise fold; the combine step is associative so the tree shape is free
  while (partials.size() > 1) {
    std::vector<std::vector<TopKList>> next;
    for (std::size_t i = 0; i + 1 < partials.size(); i += 2) {
      std::vector<TopKList> merged(static_cast<std::size_t>(k), TopKList(k));
      for (int j = 0; j < k; ++j)
        merged[static_cast<std::size_t>(j)] = merge_topk(
            partials[i][static_cast<std::size_t>(j)], partials[i + 1][static_cast<std::size_t>(j)], k);
      next.push_back(std::move(merged));
    }
    if (partials.size() % 2 == 1) next.push_back(std::move(partials.back()));
    partials.swap(next);
  }

  std::set<AdvertiserId> pool;
  for (const auto& list : partials.front())
    for (const auto& e : list.entries()) pool.insert(e.advertiser);
  return {pool.begin(), pool.end()};
}

MatchResult solve_reduced(const WeightedBipartite& g) { return solve_reduced(g, 1); }

MatchResult solve_reduced(const WeightedBipartite& g, unsigned topk_threads) {
  auto pool = topk_threads > 1 ? top_k_candidates_parallel(g, topk_threads) : top_k_candidates(g);
  const auto reduced = detail::assign_max(g.weights, pool, true);
  Allocation alloc =
      detail::canonical_extract(g.weights, std::move(pool), reduced.value, true, 1e-9, &reduced);
  return {alloc, detail::allocation_total(g.weights, alloc)};
}

}  // namespace adex::matching
