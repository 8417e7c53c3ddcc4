#include "adex/engine.hpp"

#include <chrono>
#include <stdexcept>

namespace adex::auction {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t us_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t AuctionEngine::round_seed(std::uint64_t workload_seed, std::size_t auction_index) {
  return splitmix64(workload_seed ^ splitmix64(static_cast<std::uint64_t>(auction_index) + 1));
}

AuctionEngine::AuctionEngine(const bench::Workload& workload, const AuctionConfig& cfg)
    : workload_(&workload), cfg_(cfg) {
  cfg_.slot_count = workload.slots;
  if (cfg_.method == Method::RHTALU) {
    std::vector<strategy::ProgramState> states;
    states.reserve(workload.advertisers.size());
    for (const auto& adv : workload.advertisers) states.push_back(adv.program);
    fast_ = std::make_unique<fastpath::FastPathRuntime>(std::move(states), workload.click_model,
                                                        workload.keywords);
  } else {
    for (const auto& adv : workload.advertisers)
      registry_.register_program(adv.id, std::make_unique<strategy::RoiProgram>(adv.program));
  }
}

AuctionEngine::~AuctionEngine() = default;

RoundResult AuctionEngine::run_round(std::size_t auction_index) {
  if (auction_index != next_round_) throw std::logic_error("rounds must run in order from 0");
  if (auction_index >= workload_->queries.size()) throw std::out_of_range("no such auction");
  ++next_round_;

  const bench::QueryEvent& event = workload_->queries[auction_index];
  strategy::Query q;
  q.time = event.time;
  q.relevance[event.keyword] = 1.0;

  return cfg_.method == Method::RHTALU ? run_fastpath(auction_index, q)
                                       : run_eager(auction_index, q);
}

RoundResult AuctionEngine::run_eager(std::size_t auction_index, const strategy::Query& q) {
  const auto pipeline_start = Clock::now();
  const int n = advertisers();

  std::vector<model::BidsTable> bids = registry_.trigger(q);
  bids.resize(static_cast<std::size_t>(n));

  const prob::RevenueMatrix rm = prob::revenue_matrix(bids, workload_->click_model);
  matching::WeightedBipartite g{rm.residual};

  const auto det_start = Clock::now();
  matching::MatchResult match;
  switch (cfg_.method) {
    case Method::BF:
      match = matching::brute_force_match(g);
      break;
    case Method::H:
      match = matching::hungarian(g);
      break;
    case Method::RH:
    case Method::RHTALU:
      match = matching::solve_reduced(g, cfg_.topk_threads);
      break;
  }
  const std::int64_t det_us = us_since(det_start);

  double expected_total = 0.0;
  for (double r0 : rm.r0) expected_total += r0;
  expected_total += match.total;

  const PriceRule rule = price(match.allocation, bids, workload_->click_model, rm, cfg_);
  const auto outcomes = simulate_user(match.allocation, workload_->click_model,
                                      round_seed(workload_->seed, auction_index), n);
  auto records = settle(
      match.allocation, rule, outcomes,
      [&](AdvertiserId i) -> const model::BidsTable& { return bids[static_cast<std::size_t>(i)]; },
      [&](AdvertiserId i) {
        if (auto slot = match.allocation.slot_of(i))
          return rm.r(static_cast<std::size_t>(i), static_cast<std::size_t>(*slot - 1));
        return rm.r0[static_cast<std::size_t>(i)];
      });
  registry_.notify(records, q.primary_keyword());

  RoundResult out;
  out.allocation = std::move(match.allocation);
  out.expected_total = expected_total;
  out.settlements = std::move(records);
  out.timing.determination_us = det_us;
  out.timing.pipeline_us = us_since(pipeline_start);
  return out;
}

RoundResult AuctionEngine::run_fastpath(std::size_t auction_index, const strategy::Query& q) {
  const auto pipeline_start = Clock::now();
  const int n = advertisers();
  const int k = workload_->slots;

  fast_->begin_auction(q);

  const auto det_start = Clock::now();
  // VCG re-solves drop one winner, so the pool needs one spare rank per slot
  const int per_slot = cfg_.pricing == Pricing::VCG ? k + 1 : k;
  const std::vector<AdvertiserId> pool = fast_->reduced_pool(per_slot);

  // residual sub-matrix over the pool, bit-identical to the eager scan's rows
  Matrix sub(pool.size(), static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < pool.size(); ++r)
    for (int j = 1; j <= k; ++j)
      sub(r, static_cast<std::size_t>(j - 1)) = fast_->residual(pool[r], j);

  std::vector<AdvertiserId> local_ids(pool.size());
  for (std::size_t r = 0; r < pool.size(); ++r) local_ids[r] = static_cast<AdvertiserId>(r);

  // restrict to the per-slot top-k before solving so the kernel input matches
  // the eager reduced solve exactly
  matching::WeightedBipartite sub_g{sub};
  std::vector<AdvertiserId> reduced_local =
      per_slot == k ? local_ids : matching::top_k_candidates(sub_g);
  const auto kernel = matching::detail::assign_max(sub, reduced_local, true);
  model::Allocation local_alloc =
      matching::detail::canonical_extract(sub, reduced_local, kernel.value, true, 1e-9, &kernel);

  model::Allocation allocation(k);
  for (int j = 1; j <= k; ++j)
    if (auto a = local_alloc.advertiser_at(j)) allocation.assign(j, pool[static_cast<std::size_t>(*a)]);
  const std::int64_t det_us = us_since(det_start);

  const double expected_total = matching::detail::allocation_total(sub, local_alloc);

  // pricing over the pool sub-matrix (residuals vanish for everyone outside)
  prob::RevenueMatrix sub_rm;
  sub_rm.r = sub;
  sub_rm.residual = sub;
  sub_rm.r0.assign(pool.size(), 0.0);
  AuctionConfig sub_cfg = cfg_;
  sub_cfg.slot_count = k;
  std::vector<model::BidsTable> sub_bids;
  sub_bids.reserve(pool.size());
  for (AdvertiserId id : pool) sub_bids.push_back(fast_->bids_for(id));

  Matrix sub_w(pool.size(), static_cast<std::size_t>(k));
  Matrix sub_c(pool.size(), static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < pool.size(); ++r)
    for (int j = 0; j < k; ++j) {
      sub_w(r, static_cast<std::size_t>(j)) = workload_->click_model.w(
          static_cast<std::size_t>(pool[r]), static_cast<std::size_t>(j));
      sub_c(r, static_cast<std::size_t>(j)) = workload_->click_model.c(
          static_cast<std::size_t>(pool[r]), static_cast<std::size_t>(j));
    }
  const prob::ClickModel sub_model(std::move(sub_w), std::move(sub_c));
  const PriceRule local_rule = price(local_alloc, sub_bids, sub_model, sub_rm, sub_cfg);

  PriceRule rule;
  rule.scheme = local_rule.scheme;
  rule.value.assign(static_cast<std::size_t>(n), 0.0);
  if (!local_rule.vcg_payment.empty()) rule.vcg_payment.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t r = 0; r < pool.size(); ++r) {
    rule.value[static_cast<std::size_t>(pool[r])] = local_rule.value[r];
    if (!local_rule.vcg_payment.empty())
      rule.vcg_payment[static_cast<std::size_t>(pool[r])] = local_rule.vcg_payment[r];
  }

  const auto outcomes = simulate_user(allocation, workload_->click_model,
                                      round_seed(workload_->seed, auction_index), n);

  // per-advertiser bid tables materialized lazily: only settled advertisers need one
  std::vector<model::BidsTable> bid_cache(static_cast<std::size_t>(n));
  std::vector<char> bid_ready(static_cast<std::size_t>(n), 0);
  auto bids_of = [&](AdvertiserId i) -> const model::BidsTable& {
    if (!bid_ready[static_cast<std::size_t>(i)]) {
      bid_cache[static_cast<std::size_t>(i)] = fast_->bids_for(i);
      bid_ready[static_cast<std::size_t>(i)] = 1;
    }
    return bid_cache[static_cast<std::size_t>(i)];
  };
  auto records = settle(allocation, rule, outcomes, bids_of, [&](AdvertiserId i) {
    if (auto slot = allocation.slot_of(i)) return fast_->residual(i, *slot);
    return 0.0;  // click-only bids earn nothing unseated
  });

  fast_->after_settlement(records);

  RoundResult out;
  out.allocation = std::move(allocation);
  out.expected_total = expected_total;
  out.settlements = std::move(records);
  out.timing.determination_us = det_us;
  out.timing.pipeline_us = us_since(pipeline_start);
  return out;
}

std::vector<strategy::ProgramState> AuctionEngine::program_states() const {
  if (fast_) return fast_->materialize_states();
  std::vector<strategy::ProgramState> out;
  out.reserve(workload_->advertisers.size());
  for (const auto& adv : workload_->advertisers) {
    const auto* roi = dynamic_cast<const strategy::RoiProgram*>(registry_.program(adv.id));
    if (!roi) throw std::logic_error("missing program");
    out.push_back(roi->state());
  }
  return out;
}

}  // namespace adex::auction
