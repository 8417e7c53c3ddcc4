#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "adex/probability.hpp"
#include "adex/strategy.hpp"

namespace adex::bench {

struct WorkloadSpec {
  int advertisers = 100;
  int slots = 15;
  int num_keywords = 10;
  int auctions = 100;
  std::uint64_t seed = 1;
  Money value_max = 50;
  double click_low = 0.1;
  double click_high = 0.9;
  bool sample_conversions = false;  // default workloads have zero conversion probability
};

struct QueryEvent {
  double time = 0.0;
  std::string keyword;
};

struct WorkloadAdvertiser {
  AdvertiserId id = 0;
  strategy::ProgramState program;
};

struct Workload {
  int slots = 0;
  std::vector<std::string> keywords;
  std::vector<WorkloadAdvertiser> advertisers;
  prob::ClickModel click_model;
  std::vector<QueryEvent> queries;
  std::uint64_t seed = 0;
};

// Synthetic benchmark instance. Queries arrive at a constant rate, one
// uniformly chosen keyword each with relevance 1. Per-advertiser per-keyword
// click values are uniform integers in [0, value_max] with at least one
// nonzero per advertiser; target spending rates are uniform in [1, the
// advertiser's maximum keyword value]. Click probabilities partition
// [click_low, click_high] into one sub-interval per slot, higher slots
// drawing from higher sub-intervals. Fully deterministic in the seed.
Workload gen_workload(const WorkloadSpec& spec);

nlohmann::json workload_to_json(const Workload& w);
Workload workload_from_json(const nlohmann::json& j);

void save_workload(const std::filesystem::path& path, const Workload& w);
Workload load_workload(const std::filesystem::path& path);

}  // namespace adex::bench
