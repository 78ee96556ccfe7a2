#pragma once

#include <functional>

#include "skillforge/envb/artifacts.hpp"
#include "skillforge/util/log.hpp"

namespace skillforge::envb {

// The generate-verify-repair loop shared by all three artifact stages:
//
//   x <- generate()
//   for t = 0..T:
//     if verify(x) passes  -> accepted, attempts_used = t+1
//     else if t == T       -> discarded, attempts_used = T+1
//     else                 -> x <- repair(x, findings)
//
// Call-count law: verify runs attempts_used times; repair runs
// attempts_used-1 times when accepted and T times when discarded. The budget
// T is per artifact, not global. Exceptions from the callables propagate.
template <class Artifact>
GvrOutcome gvr_run(ArtifactKind kind, int budget,
                   const std::function<Artifact()>& generate,
                   const std::function<VerifyReport(Artifact&)>& verify,
                   const std::function<Artifact(Artifact,
                                                const std::vector<VerifyFinding>&)>& repair,
                   Artifact& out) {
  GvrOutcome outcome;
  outcome.kind = kind;

  Artifact x = generate();
  for (int t = 0;; ++t) {
    VerifyReport report = verify(x);
    outcome.findings_history.push_back(report.findings);
    if (!report.pass)
      for (const auto& f : report.findings)
        log::debug("gvr {} verify #{} finding: {}", to_string(kind), t + 1,
                   f.reason);
    if (report.pass) {
      outcome.status = GvrStatus::accepted;
      outcome.attempts_used = t + 1;
      break;
    }
    if (t == budget) {
      outcome.status = GvrStatus::discarded;
      outcome.attempts_used = budget + 1;
      break;
    }
    x = repair(std::move(x), report.findings);
  }
  out = std::move(x);
  return outcome;
}

}  // namespace skillforge::envb
