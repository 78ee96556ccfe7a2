#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skillforge/gateway/types.hpp"
#include "skillforge/util/money.hpp"

namespace skillforge::gateway {

// Prices are integer micro-dollars per million tokens, so row costs
// (tokens x price) are exact integers in pico-dollars. All arithmetic is
// integral; rounding happens only when formatting display strings.
struct PriceEntry {
  long long prompt_micro_per_mtok = 0;
  long long completion_micro_per_mtok = 0;
};

struct LedgerRow {
  StageTag stage = StageTag::other;
  long long calls = 0;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  util::Picodollars cost_pico = 0;
};

class CostLedger {
 public:
  void set_price(const std::string& backend_id, PriceEntry price);
  std::optional<PriceEntry> price(const std::string& backend_id) const;

  // Records one completed call. Unknown backends are priced at zero.
  void record(StageTag stage, const std::string& backend_id, Usage usage);

  std::vector<LedgerRow> rows() const;  // sorted by stage enum order
  util::Picodollars total_pico() const;
  long long total_calls() const;

  nlohmann::json to_json() const;
  // Replaces the ledger contents with a persisted snapshot.
  void load_json(const nlohmann::json& j);

 private:
  mutable std::mutex mu_;
  std::map<StageTag, LedgerRow> rows_;
  std::map<std::string, PriceEntry> prices_;
};

// Per-stage report lines plus a total; when a stage has a produced-unit
// count, the line carries the average cost per unit.
struct CostReportLine {
  std::string stage;
  long long calls = 0;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  std::string dollars;               // 2 decimals
  std::optional<long long> units;
  std::optional<std::string> avg_dollars_per_unit;  // 2 decimals
};

struct CostReport {
  std::vector<CostReportLine> lines;
  std::string total_dollars;                        // 2 decimals
  std::optional<std::string> avg_dollars_per_unit;  // 2 decimals
  std::string table() const;  // aligned text rendering
  nlohmann::json to_json() const;
};

// `unit_counts` maps a stage to how many artifacts it produced; `total_units`
// divides the grand total (e.g. trajectories collected).
CostReport cost_report(const CostLedger& ledger,
                       const std::map<StageTag, long long>& unit_counts = {},
                       std::optional<long long> total_units = std::nullopt);

}  // namespace skillforge::gateway
