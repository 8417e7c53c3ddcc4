#include "adex/workload.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

namespace adex::bench {

using strategy::KeywordRow;
using strategy::ProgramState;

Workload gen_workload(const WorkloadSpec& spec) {
  if (spec.advertisers < 1 || spec.slots < 1 || spec.auctions < 1 || spec.num_keywords < 1)
    throw std::invalid_argument("workload spec requires n, k, keywords, auctions >= 1");
  if (!(spec.click_low >= 0.0 && spec.click_high <= 1.0 && spec.click_low < spec.click_high))
    throw std::invalid_argument("click interval must satisfy 0 <= low < high <= 1");

  Workload w;
  w.slots = spec.slots;
  w.seed = spec.seed;
  std::mt19937_64 rng(spec.seed);

  w.keywords.reserve(static_cast<std::size_t>(spec.num_keywords));
  for (int i = 0; i < spec.num_keywords; ++i) w.keywords.push_back("kw" + std::to_string(i + 1));

  std::uniform_int_distribution<Money> value_dist(0, spec.value_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int i = 0; i < spec.advertisers; ++i) {
    WorkloadAdvertiser adv;
    adv.id = i;
    ProgramState& s = adv.program;

    std::vector<Money> values(static_cast<std::size_t>(spec.num_keywords));
    Money max_value = 0;
    for (auto& v : values) {
      v = value_dist(rng);
      max_value = std::max(max_value, v);
    }
    if (max_value == 0) {
      // every advertiser has at least one nonzero click value
      std::uniform_int_distribution<int> pick(0, spec.num_keywords - 1);
      std::uniform_int_distribution<Money> nonzero(1, std::max<Money>(spec.value_max, 1));
      const int idx = pick(rng);
      values[static_cast<std::size_t>(idx)] = nonzero(rng);
      max_value = values[static_cast<std::size_t>(idx)];
    }

    for (int kw = 0; kw < spec.num_keywords; ++kw) {
      KeywordRow row;
      row.text = w.keywords[static_cast<std::size_t>(kw)];
      row.formula = model::Formula::click();
      row.maxbid = values[static_cast<std::size_t>(kw)];
      std::uniform_int_distribution<Money> bid_dist(0, row.maxbid);
      row.bid = bid_dist(rng);
      row.roi = 2.0 * unit(rng);  // seeded starting ROI
      row.relevance = 0.0;
      s.keywords.push_back(std::move(row));
    }

    std::uniform_int_distribution<Money> rate_dist(1, max_value);
    s.target_spend_rate = static_cast<double>(rate_dist(rng));
    w.advertisers.push_back(std::move(adv));
  }

  // one click-probability sub-interval per slot, higher slots higher
  const double span = (spec.click_high - spec.click_low) / spec.slots;
  Matrix click(static_cast<std::size_t>(spec.advertisers), static_cast<std::size_t>(spec.slots));
  Matrix conv(static_cast<std::size_t>(spec.advertisers), static_cast<std::size_t>(spec.slots));
  for (int i = 0; i < spec.advertisers; ++i)
    for (int j = 0; j < spec.slots; ++j) {
      const double lo = spec.click_high - span * (j + 1);
      click(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = lo + span * unit(rng);
      conv(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          spec.sample_conversions ? 0.2 * unit(rng) : 0.0;
    }
  w.click_model = prob::ClickModel(std::move(click), std::move(conv));

  std::uniform_int_distribution<int> kw_pick(0, spec.num_keywords - 1);
  for (int q = 0; q < spec.auctions; ++q) {
    QueryEvent event;
    event.time = static_cast<double>(q + 1);  // constant query rate
    event.keyword = w.keywords[static_cast<std::size_t>(kw_pick(rng))];
    w.queries.push_back(std::move(event));
  }
  return w;
}

nlohmann::json workload_to_json(const Workload& w) {
  nlohmann::json advertisers = nlohmann::json::array();
  for (const auto& adv : w.advertisers) {
    nlohmann::json rows = nlohmann::json::array();
    for (const KeywordRow& row : adv.program.keywords)
      rows.push_back({{"text", row.text},
                      {"formula", row.formula.to_string()},
                      {"maxbid", row.maxbid},
                      {"roi", row.roi},
                      {"bid", row.bid},
                      {"relevance", row.relevance}});
    advertisers.push_back({{"id", adv.id},
                           {"keywords", rows},
                           {"targetSpendRate", adv.program.target_spend_rate}});
  }
  nlohmann::json queries = nlohmann::json::array();
  for (const auto& q : w.queries) queries.push_back({{"time", q.time}, {"keyword", q.keyword}});
  return {{"k", w.slots},
          {"keywords", w.keywords},
          {"advertisers", advertisers},
          {"click_model", prob::click_model_to_json(w.click_model)},
          {"queries", queries},
          {"seed", w.seed}};
}

Workload workload_from_json(const nlohmann::json& j) {
  Workload w;
  w.slots = j.at("k").get<int>();
  if (w.slots < 1) throw std::invalid_argument("workload needs k >= 1");
  for (const auto& kw : j.at("keywords")) w.keywords.push_back(kw.get<std::string>());
  for (const auto& adv : j.at("advertisers")) {
    WorkloadAdvertiser a;
    a.id = adv.at("id").get<AdvertiserId>();
    for (const auto& row : adv.at("keywords")) {
      KeywordRow r;
      r.text = row.at("text").get<std::string>();
      r.formula = model::parse_formula(row.at("formula").get<std::string>(), w.slots);
      r.maxbid = row.at("maxbid").get<Money>();
      r.roi = row.at("roi").get<double>();
      r.bid = row.at("bid").get<Money>();
      r.relevance = row.value("relevance", 0.0);
      a.program.keywords.push_back(std::move(r));
    }
    a.program.target_spend_rate = adv.at("targetSpendRate").get<double>();
    w.advertisers.push_back(std::move(a));
  }
  w.click_model = prob::click_model_from_json(j.at("click_model"));
  for (const auto& q : j.at("queries"))
    w.queries.push_back({q.at("time").get<double>(), q.at("keyword").get<std::string>()});
  w.seed = j.value("seed", std::uint64_t{0});

  if (w.click_model.advertisers() != static_cast<int>(w.advertisers.size()) ||
      w.click_model.slots() != w.slots)
    throw std::invalid_argument("click model shape does not match workload");
  return w;
}

void save_workload(const std::filesystem::path& path, const Workload& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << workload_to_json(w).dump(2) << "\n";
}

Workload load_workload(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  return workload_from_json(j);
}

}  // namespace adex::bench
