// Acceptance criteria, one PASS/FAIL line each. Exit status is nonzero when
// any criterion fails.
//
// Usage: acceptance <path to unit_tests>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "jetcheck/verify.hpp"

using namespace jetcheck;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kPropertySeconds = 60;
constexpr double kZeroCurvatureSeconds = 120;
constexpr double kSuiteSeconds = 15 * 60;
constexpr std::size_t kMutationsPerCheck = 10;

int failures = 0;

void line(int n, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what << " -- " << detail << "\n";
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::map<std::string, CheckResult> by_id(const std::vector<CheckResult>& rs) {
  std::map<std::string, CheckResult> out;
  for (const auto& r : rs) out[r.id] = r;
  return out;
}

const SubCheck* sub(const CheckResult& r, const std::string& name) {
  for (const auto& s : r.subchecks) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

/// Every named sub-check exists and has status `want`; lists violations.
std::string subs_status(const CheckResult& r, const std::vector<std::string>& names, Status want) {
  std::string bad;
  for (const auto& n : names) {
    const SubCheck* s = sub(r, n);
    if (!s) {
      bad += " [" + r.id + ": missing " + n + "]";
    } else if (s->status != want) {
      bad += " [" + r.id + ": " + n + " is " + to_string(s->status) + "]";
    }
  }
  return bad;
}

std::string exact_pass(const CheckResult& r) {
  if (r.status == Status::Pass && r.residual_summary.empty() && r.errata.empty()) return "";
  return " [" + r.id + " is " + to_string(r.status) + "]";
}

std::string all_gating_pass(const CheckResult& r) {
  std::string bad;
  for (const auto& s : r.subchecks) {
    if (!s.informational && s.status != Status::Pass) bad += " [" + r.id + ": " + s.name + " is " + to_string(s.status) + "]";
  }
  return bad;
}

std::string verdict(const std::string& bad, const std::string& ok_text) { return bad.empty() ? ok_text : bad; }

}  // namespace

int main(int argc, char** argv) {
  const Catalog& cat = Catalog::builtin();
  RunOptions timed;
  timed.timing = true;

  // 1. Kernel property suite.
  {
    bool ok = false;
    std::string detail = "unit test binary not given";
    if (argc > 1) {
      std::string cmd = std::string("\"") + argv[1] + "\" --source-file=*test_properties* --minimal > /dev/null 2>&1";
      auto t = Clock::now();
      int rc = std::system(cmd.c_str());
      double s = seconds_since(t);
      ok = rc == 0 && s < kPropertySeconds;
      detail = "200 cases per property, exit " + std::to_string(rc) + ", " + std::to_string(s) + " s (limit " +
               std::to_string(kPropertySeconds) + " s)";
    }
    line(1, ok, "kernel properties", detail);
  }

  auto t_suite = Clock::now();
  auto results = by_id(run_suite({}, cat, timed));
  double suite_s = seconds_since(t_suite);

  // 2. Main zero-curvature check.
  {
    const CheckResult& r = results.at("zc_main");
    std::string bad = exact_pass(r);
    if (r.decided_by != Rung::NormalForm) bad += " [not decided at normal form]";
    double s = r.time_ms / 1000.0;
    if (s >= kZeroCurvatureSeconds) bad += " [too slow]";
    line(2, bad.empty(), "zero curvature of the main Lax pair",
         verdict(bad, "exact zero at every power of lambda, " + std::to_string(r.time_ms) + " ms"));
  }

  // 3. Conservation laws.
  {
    std::string bad = exact_pass(results.at("conservation_main")) +
                      subs_status(results.at("appendixB"), {"closed 1-form", "density against the substitution"},
                                  Status::Pass);
    line(3, bad.empty(), "conservation (main text and second appendix)", verdict(bad, "exact zero residuals"));
  }

  // 4. Factorizations.
  {
    const CheckResult& r = results.at("factorizations");
    std::string bad = exact_pass(r) + all_gating_pass(r);
    line(4, bad.empty(), "factorizations", verdict(bad, std::to_string(r.subchecks.size()) + " sub-checks exact"));
  }

  // 5. Scalar reduction and reciprocal maps.
  {
    std::string bad = exact_pass(results.at("scalar_reduction")) + exact_pass(results.at("reciprocal_main")) +
                      subs_status(results.at("reciprocal_main"), {"constraint equivalence"}, Status::Pass) +
                      subs_status(results.at("appendixB"), {"transformed flow", "i, j definitions"}, Status::Pass);
    line(5, bad.empty(), "scalar reduction and reciprocal system maps",
         verdict(bad, "exact, including the composition reading of the constraints"));
  }

  // 6. Propositions.
  {
    std::string bad;
    for (const char* id : {"prop1", "prop2"}) {
      const CheckResult& r = results.at(id);
      bad += exact_pass(r);
      if (r.decided_by != Rung::NormalForm) bad += std::string(" [") + id + " not at normal form]";
    }
    line(6, bad.empty(), "propositions at the normal-form rung", verdict(bad, "no erratum entries"));
  }

  // 7. Theorem: (1) T1, (3) factored forms, (4) J2t exact; (2) T2 and (5) J1t may use errata.
  {
    const CheckResult& r = results.at("theorem1");
    std::string bad = subs_status(r, {"T1 recomputed", "factored forms", "-T1 J1 T2 = J2t"}, Status::Pass);
    for (const char* n : {"T2 recomputed", "-T1 J2 T2 = J1t"}) {
      const SubCheck* s = sub(r, n);
      if (!s || (s->status != Status::Pass && s->status != Status::Erratum)) bad += std::string(" [") + n + "]";
    }
    if (r.status != Status::Pass && r.status != Status::Erratum) bad += " [theorem1 is " + to_string(r.status) + "]";
    std::string errata;
    for (const auto& e : r.errata) errata += " " + e;
    line(7, bad.empty(), "theorem sub-checks", verdict(bad + " errata applied:" + errata, "errata applied:" + errata));
  }

  // 8. Connecting identity and the negative flow.
  {
    std::string bad = exact_pass(results.at("connecting_identity")) + all_gating_pass(results.at("connecting_identity")) +
                      all_gating_pass(results.at("appendixA")) + exact_pass(results.at("appendixA"));
    const SubCheck* e = sub(results.at("appendixA"), "exploratory: P^k and the modified operators");
    if (!e || !e->informational) bad += " [exploratory report missing]";
    line(8, bad.empty(), "connecting identity and negative flow sub-checks (1)-(4)",
         verdict(bad, "exact; exploratory report produced"));
  }

  // 9. Mutation sensitivity, delta +1 at sampled coefficients.
  {
    std::mt19937_64 rng(0);
    std::string bad;
    std::size_t total = 0;
    for (const CheckInfo& info : checks()) {
      Catalog base = cat;
      if (auto errata = ErrataLedger::builtin().for_check(info.id); !errata.empty()) {
        base = ErrataLedger::apply(cat, errata);
      }
      RunOptions raw;
      if (run_raw(info, base, raw).status != Status::Pass) {
        bad += " [" + info.id + ": corrected catalog does not pass]";
        continue;
      }
      std::vector<MutationSite> sites = mutation_sites(info, base);
      std::shuffle(sites.begin(), sites.end(), rng);
      if (sites.size() < kMutationsPerCheck) {
        bad += " [" + info.id + ": only " + std::to_string(sites.size()) + " sites]";
      }
      sites.resize(std::min(sites.size(), kMutationsPerCheck));
      for (const auto& s : sites) {
        ++total;
        Status st = run_raw(info, base.mutated(s.id, s.site, 1), raw).status;
        if (st != Status::Fail) {
          bad += " [" + info.id + ": " + s.id + "#" + std::to_string(s.site) + " gave " + to_string(st) + "]";
        }
      }
    }
    line(9, bad.empty(), "mutation sensitivity",
         verdict(bad, std::to_string(total) + " mutations, " + std::to_string(kMutationsPerCheck) +
                          " per check, all fail"));
  }

  // 10. Determinism and suite time.
  {
    RunOptions plain;
    std::string a = report_json(run_suite({}, cat, plain));
    std::string b = report_json(run_suite({}, cat, plain));
    bool same = a == b;
    bool fast = suite_s < kSuiteSeconds;
    line(10, same && fast, "determinism",
         std::string(same ? "byte-identical JSON" : "reports differ") + ", suite " + std::to_string(suite_s) +
             " s (limit " + std::to_string(kSuiteSeconds) + " s)");
  }

  return failures == 0 ? 0 : 1;
}
