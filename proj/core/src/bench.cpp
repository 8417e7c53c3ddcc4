#include "adex/bench.hpp"

#include <map>
#include <ostream>
#include <stdexcept>

namespace adex::bench {

std::vector<BenchRecord> run_bench(const Workload& w, const BenchOptions& opts) {
  if (opts.methods.empty()) throw std::invalid_argument("at least one method required");

  const std::size_t rounds = opts.max_auctions
                                 ? std::min(*opts.max_auctions, w.queries.size())
                                 : w.queries.size();

  std::vector<BenchRecord> records;
  records.reserve(opts.methods.size() * rounds);

  for (auction::Method method : opts.methods) {
    auction::AuctionConfig cfg;
    cfg.slot_count = w.slots;
    cfg.method = method;
    cfg.pricing = opts.pricing;
    cfg.topk_threads = opts.topk_threads;

    auction::AuctionEngine engine(w, cfg);
    for (std::size_t a = 0; a < rounds; ++a) {
      const auction::RoundResult round = engine.run_round(a);
      BenchRecord rec;
      rec.auction = a;
      rec.method = method;
      rec.determination_us = round.timing.determination_us;
      rec.expected_total = round.expected_total;
      rec.advertisers = static_cast<int>(w.advertisers.size());
      rec.slots = w.slots;
      rec.seed = w.seed;
      rec.pipeline_us = round.timing.pipeline_us;
      rec.threads = opts.topk_threads;
      records.push_back(rec);
    }
  }
  return records;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "auction,method,micros,total,n,k,seed,pipeline_micros,threads\n";
  out.precision(17);
  for (const BenchRecord& r : records) {
    out << r.auction << ',' << auction::to_string(r.method) << ',' << r.determination_us << ','
        << r.expected_total << ',' << r.advertisers << ',' << r.slots << ',' << r.seed << ','
        << r.pipeline_us << ',' << r.threads << '\n';
  }
}

std::vector<MethodSummary> summarize(const std::vector<BenchRecord>& records) {
  std::map<auction::Method, MethodSummary> by_method;
  for (const BenchRecord& r : records) {
    MethodSummary& s = by_method[r.method];
    s.method = r.method;
    s.avg_determination_us += static_cast<double>(r.determination_us);
    s.avg_pipeline_us += static_cast<double>(r.pipeline_us);
    ++s.auctions;
  }
  std::vector<MethodSummary> out;
  for (auto& [method, s] : by_method) {
    if (s.auctions > 0) {
      s.avg_determination_us /= static_cast<double>(s.auctions);
      s.avg_pipeline_us /= static_cast<double>(s.auctions);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace adex::bench
