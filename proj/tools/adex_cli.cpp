// adex - sponsored-search auction engine CLI
//
// Subcommands:
//   gen      generate a workload JSON file
//   bench    compare winner-determination methods over a workload, emit CSV
//   run      run one simulation, emitting settlement records as JSON lines
//   validate check a bids-table JSON file against the formula grammar
//
// Exit codes: 0 success, 1 validation failure, 2 usage or malformed input.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adex/bench.hpp"
#include "adex/bids.hpp"
#include "adex/engine.hpp"
#include "adex/workload.hpp"

namespace {

std::vector<adex::auction::Method> parse_methods(const std::string& csv) {
  std::vector<adex::auction::Method> methods;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) methods.push_back(adex::auction::method_from_string(item));
  }
  if (methods.empty()) throw std::invalid_argument("no methods given");
  return methods;
}

int cmd_gen(const adex::bench::WorkloadSpec& spec, const std::string& out_path) {
  adex::bench::Workload w = adex::bench::gen_workload(spec);
  adex::bench::save_workload(out_path, w);
  std::cout << "wrote " << out_path << " (n=" << w.advertisers.size() << ", k=" << w.slots
            << ", auctions=" << w.queries.size() << ", seed=" << w.seed << ")\n";
  return 0;
}

int cmd_bench(const std::string& workload_path, const std::string& methods_csv,
              const std::string& out_path, const std::string& pricing, unsigned threads,
              std::size_t max_auctions) {
  adex::bench::Workload w = adex::bench::load_workload(workload_path);
  adex::bench::BenchOptions opts;
  opts.methods = parse_methods(methods_csv);
  opts.pricing = adex::auction::pricing_from_string(pricing);
  opts.topk_threads = threads;
  if (max_auctions > 0) opts.max_auctions = max_auctions;

  const auto records = adex::bench::run_bench(w, opts);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open " << out_path << " for writing\n";
    return 2;
  }
  adex::bench::write_bench_csv(out, records);

  nlohmann::json meta{{"workload", workload_path},
                      {"pricing", adex::auction::to_string(opts.pricing)},
                      {"threads", opts.topk_threads},
                      {"methods", nlohmann::json::array()}};
  for (const auto& s : adex::bench::summarize(records)) {
    meta["methods"].push_back({{"method", adex::auction::to_string(s.method)},
                               {"auctions", s.auctions},
                               {"avg_micros", s.avg_determination_us},
                               {"avg_pipeline_micros", s.avg_pipeline_us}});
  }
  std::cout << meta.dump() << "\n";
  return 0;
}

int cmd_run(const std::string& workload_path, const std::string& method,
            const std::string& pricing, const std::string& trace_path, unsigned threads) {
  adex::bench::Workload w = adex::bench::load_workload(workload_path);
  adex::auction::AuctionConfig cfg;
  cfg.slot_count = w.slots;
  cfg.method = adex::auction::method_from_string(method);
  cfg.pricing = adex::auction::pricing_from_string(pricing);
  cfg.topk_threads = threads;

  std::ofstream trace(trace_path);
  if (!trace) {
    std::cerr << "cannot open " << trace_path << " for writing\n";
    return 2;
  }
  nlohmann::json meta{{"workload", workload_path},
                      {"method", adex::auction::to_string(cfg.method)},
                      {"pricing", adex::auction::to_string(cfg.pricing)},
                      {"seed", w.seed}};
  trace << meta.dump() << "\n";

  adex::auction::AuctionEngine engine(w, cfg);
  double revenue = 0.0;
  for (std::size_t a = 0; a < engine.auctions(); ++a) {
    const auto round = engine.run_round(a);
    trace << adex::auction::settlements_to_json(round.settlements).dump() << "\n";
    for (const auto& rec : round.settlements) revenue += static_cast<double>(rec.charge);
  }
  std::cout << "ran " << engine.auctions() << " auctions, provider revenue " << revenue
            << " cents\n";
  return 0;
}

int cmd_validate(const std::string& bids_path, int k) {
  std::ifstream in(bids_path);
  if (!in) {
    std::cerr << "cannot open " << bids_path << "\n";
    return 2;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "malformed JSON: " << e.what() << "\n";
    return 2;
  }
  const auto v = adex::model::validate_bids_json(j, k);
  if (v.ok) {
    std::cout << "ok: " << j.size() << " rows valid for k=" << k << "\n";
    return 0;
  }
  for (const auto& issue : v.issues)
    std::cerr << "row " << issue.row << ": " << issue.reason << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expressive sponsored-search auction engine"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a workload JSON file");
  adex::bench::WorkloadSpec spec;
  std::string gen_out = "workload.json";
  bool gen_conversions = false;
  gen->add_option("--n", spec.advertisers, "number of advertisers");
  gen->add_option("--k", spec.slots, "number of slots");
  gen->add_option("--keywords", spec.num_keywords, "number of keywords");
  gen->add_option("--auctions", spec.auctions, "number of auctions");
  gen->add_option("--seed", spec.seed, "random seed");
  gen->add_option("--value-max", spec.value_max, "maximum per-keyword click value (cents)");
  gen->add_flag("--conversions", gen_conversions, "sample conversion probabilities in [0,0.2]");
  gen->add_option("--out", gen_out, "output path")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "compare winner-determination methods");
  std::string bench_workload, bench_methods = "H,RH", bench_out = "bench.csv";
  std::string bench_pricing = "gsp";
  unsigned bench_threads = 1;
  std::size_t bench_max_auctions = 0;
  bench->add_option("--workload", bench_workload, "workload JSON path")->required();
  bench->add_option("--methods", bench_methods, "comma-separated subset of BF,H,RH,RHTALU");
  bench->add_option("--out", bench_out, "CSV output path")->required();
  bench->add_option("--pricing", bench_pricing, "pay_as_bid, gsp, or vcg");
  bench->add_option("--threads", bench_threads, "threads for the parallel top-k fold");
  bench->add_option("--auctions", bench_max_auctions, "limit the number of auctions (0 = all)");

  // run
  auto* run = app.add_subcommand("run", "run one simulation with a settlement trace");
  std::string run_workload, run_method = "RH", run_pricing = "gsp", run_trace = "trace.jsonl";
  unsigned run_threads = 1;
  run->add_option("--workload", run_workload, "workload JSON path")->required();
  run->add_option("--method", run_method, "BF, H, RH, or RHTALU");
  run->add_option("--pricing", run_pricing, "pay_as_bid, gsp, or vcg");
  run->add_option("--trace", run_trace, "JSONL output path")->required();
  run->add_option("--threads", run_threads, "threads for the parallel top-k fold");

  // validate
  auto* validate = app.add_subcommand("validate", "validate a bids-table JSON file");
  std::string validate_bids;
  int validate_k = 1;
  validate->add_option("--bids", validate_bids, "bids JSON path")->required();
  validate->add_option("--k", validate_k, "slot count")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      spec.sample_conversions = gen_conversions;
      return cmd_gen(spec, gen_out);
    }
    if (bench->parsed())
      return cmd_bench(bench_workload, bench_methods, bench_out, bench_pricing, bench_threads,
                       bench_max_auctions);
    if (run->parsed()) return cmd_run(run_workload, run_method, run_pricing, run_trace, run_threads);
    if (validate->parsed()) return cmd_validate(validate_bids, validate_k);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
