#include "skillforge/gateway/ledger.hpp"

#include <fmt/format.h>

namespace skillforge::gateway {

void CostLedger::set_price(const std::string& backend_id, PriceEntry price) {
  std::lock_guard lk(mu_);
  prices_[backend_id] = price;
}

std::optional<PriceEntry> CostLedger::price(const std::string& backend_id) const {
  std::lock_guard lk(mu_);
  auto it = prices_.find(backend_id);
  if (it == prices_.end()) return std::nullopt;
  return it->second;
}

void CostLedger::record(StageTag stage, const std::string& backend_id,
                        Usage usage) {
  std::lock_guard lk(mu_);
  PriceEntry p;
  if (auto it = prices_.find(backend_id); it != prices_.end()) p = it->second;
  LedgerRow& row = rows_[stage];
  row.stage = stage;
  row.calls += 1;
  row.prompt_tokens += usage.prompt_tokens;
  row.completion_tokens += usage.completion_tokens;
  row.cost_pico += usage.prompt_tokens * p.prompt_micro_per_mtok +
                   usage.completion_tokens * p.completion_micro_per_mtok;
}

std::vector<LedgerRow> CostLedger::rows() const {
  std::lock_guard lk(mu_);
  std::vector<LedgerRow> out;
  out.reserve(rows_.size());
  for (const auto& [_, row] : rows_) out.push_back(row);
  return out;
}

util::Picodollars CostLedger::total_pico() const {
  std::lock_guard lk(mu_);
  util::Picodollars total = 0;
  for (const auto& [_, row] : rows_) total += row.cost_pico;
  return total;
}

long long CostLedger::total_calls() const {
  std::lock_guard lk(mu_);
  long long total = 0;
  for (const auto& [_, row] : rows_) total += row.calls;
  return total;
}

nlohmann::json CostLedger::to_json() const {
  std::lock_guard lk(mu_);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [_, row] : rows_) {
    rows.push_back({{"stage", to_string(row.stage)},
                    {"calls", row.calls},
                    {"prompt_tokens", row.prompt_tokens},
                    {"completion_tokens", row.completion_tokens},
                    {"cost_pico", row.cost_pico}});
  }
  nlohmann::json prices = nlohmann::json::object();
  for (const auto& [id, p] : prices_) {
    prices[id] = {{"prompt_micro_per_mtok", p.prompt_micro_per_mtok},
                  {"completion_micro_per_mtok", p.completion_micro_per_mtok}};
  }
  return {{"rows", rows}, {"prices", prices}};
}

void CostLedger::load_json(const nlohmann::json& j) {
  std::lock_guard lk(mu_);
  rows_.clear();
  for (const auto& row : j.value("rows", nlohmann::json::array())) {
    LedgerRow r;
    r.stage = stage_tag_from_string(row.at("stage").get<std::string>());
    r.calls = row.at("calls").get<long long>();
    r.prompt_tokens = row.at("prompt_tokens").get<long long>();
    r.completion_tokens = row.at("completion_tokens").get<long long>();
    r.cost_pico = row.at("cost_pico").get<long long>();
    rows_[r.stage] = r;
  }
  nlohmann::json prices = j.value("prices", nlohmann::json::object());
  for (auto it = prices.begin(); it != prices.end(); ++it) {
    prices_[it.key()] = {
        it.value().at("prompt_micro_per_mtok").get<long long>(),
        it.value().at("completion_micro_per_mtok").get<long long>()};
  }
}

CostReport cost_report(const CostLedger& ledger,
                       const std::map<StageTag, long long>& unit_counts,
                       std::optional<long long> total_units) {
  CostReport report;
  util::Picodollars total = 0;
  for (const auto& row : ledger.rows()) {
    CostReportLine line;
    line.stage = to_string(row.stage);
    line.calls = row.calls;
    line.prompt_tokens = row.prompt_tokens;
    line.completion_tokens = row.completion_tokens;
    line.dollars = util::format_dollars(row.cost_pico, 2);
    if (auto it = unit_counts.find(row.stage);
        it != unit_counts.end() && it->second > 0) {
      line.units = it->second;
      line.avg_dollars_per_unit =
          util::format_ratio(row.cost_pico, it->second * util::kPicoPerDollar, 2);
    }
    total += row.cost_pico;
    report.lines.push_back(std::move(line));
  }
  report.total_dollars = util::format_dollars(total, 2);
  if (total_units && *total_units > 0)
    report.avg_dollars_per_unit =
        util::format_ratio(total, *total_units * util::kPicoPerDollar, 2);
  return report;
}

std::string CostReport::table() const {
  std::string out = fmt::format("{:<12} {:>8} {:>14} {:>14} {:>12} {:>10} {:>10}\n",
                                "stage", "calls", "prompt_tok", "completion_tok",
                                "dollars", "units", "avg_cost");
  for (const auto& line : lines) {
    out += fmt::format("{:<12} {:>8} {:>14} {:>14} {:>12} {:>10} {:>10}\n",
                       line.stage, line.calls, line.prompt_tokens,
                       line.completion_tokens, line.dollars,
                       line.units ? fmt::format("{}", *line.units) : "-",
                       line.avg_dollars_per_unit ? *line.avg_dollars_per_unit
                                                 : "-");
  }
  out += fmt::format("{:<12} {:>62} {:>10}\n", "total", total_dollars,
                     avg_dollars_per_unit ? *avg_dollars_per_unit : "-");
  return out;
}

nlohmann::json CostReport::to_json() const {
  nlohmann::json lines_json = nlohmann::json::array();
  for (const auto& line : lines) {
    nlohmann::json j = {{"stage", line.stage},
                        {"calls", line.calls},
                        {"prompt_tokens", line.prompt_tokens},
                        {"completion_tokens", line.completion_tokens},
                        {"dollars", line.dollars}};
    if (line.units) j["units"] = *line.units;
    if (line.avg_dollars_per_unit) j["avg_cost"] = *line.avg_dollars_per_unit;
    lines_json.push_back(std::move(j));
  }
  nlohmann::json out = {{"lines", lines_json}, {"total_dollars", total_dollars}};
  if (avg_dollars_per_unit) out["avg_cost"] = *avg_dollars_per_unit;
  return out;
}

}  // namespace skillforge::gateway
