#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jetcheck/catalog.hpp"
#include "jetcheck/nonlocal.hpp"

namespace jetcheck {

enum class Status { Pass, Fail, Erratum, Undecidable };

std::string to_string(Status s);

struct SubCheck {
  std::string name;
  Status status = Status::Pass;
  Rung decided_by = Rung::NormalForm;
  std::vector<std::string> residual;
  std::vector<std::string> notes;
  /// Reported, never gating.
  bool informational = false;
};

struct CheckResult {
  std::string id;
  std::string citation;
  Status status = Status::Pass;
  Rung decided_by = Rung::NormalForm;
  /// Nonzero residual entries, "sub-check: label: value".
  std::vector<std::string> residual_summary;
  std::int64_t time_ms = 0;
  std::vector<SubCheck> subchecks;
  /// Ledger entries applied to reach the status.
  std::vector<std::string> errata;
  std::vector<std::string> notes;
};

/// One justified correction of a transcribed value.
struct ErratumEntry {
  std::string id;
  std::vector<std::string> check_ids;
  std::string target;  // catalog entry id
  std::string citation;
  std::string original;   // serialized value, as transcribed
  std::string corrected;  // serialized value after correction
  std::string justification;
};

class ErrataLedger {
 public:
  ErrataLedger() = default;
  explicit ErrataLedger(std::vector<ErratumEntry> entries) : entries_(std::move(entries)) {}

  /// The ledger shipped with the library.
  static const ErrataLedger& builtin();
  static ErrataLedger parse(std::string_view text);
  static ErrataLedger load(const std::string& path);
  std::string to_text() const;

  const std::vector<ErratumEntry>& entries() const { return entries_; }
  /// Entries that concern the check.
  std::vector<const ErratumEntry*> for_check(std::string_view check_id) const;
  /// Catalog with the given corrections applied. Throws when an entry's
  /// original does not match the catalog value.
  static Catalog apply(const Catalog& cat, const std::vector<const ErratumEntry*>& entries);

 private:
  std::vector<ErratumEntry> entries_;
};

struct RunOptions {
  std::uint64_t seed = 0;
  /// Cap on derivative orders admitted during reduction.
  int max_order = 64;
  bool timing = false;
  /// Ledger consulted for erratum statuses; none means raw statuses.
  const ErrataLedger* errata = &ErrataLedger::builtin();
};

/// Per-run state handed to a check body.
struct CheckEnv {
  const Catalog& cat;
  std::uint64_t seed;
  int max_order;
};

using CheckBody = std::function<std::vector<SubCheck>(CheckEnv&)>;

struct CheckInfo {
  std::string id;
  std::string citation;
  std::string claim;
  std::string strategy;
  /// Catalog entries the check reads; mutation tests corrupt these. A
  /// system listed as "id:evolution" is read without its constraints and
  /// one listed as "id:constraints" only through them; an entry listed as
  /// "id:scale" is read only up to a constant factor, so its coefficients
  /// are not mutation sites.
  std::vector<std::string> inputs;
  /// Checks that must have run (and registered their results) first.
  std::vector<std::string> after;
  CheckBody body;
};

/// Published checks in suite order.
const std::vector<CheckInfo>& checks();
const CheckInfo& check_info(std::string_view id);
bool is_check(std::string_view id);

/// Catalog entry named by an input, without its suffix.
std::string input_entry(std::string_view input);

struct MutationSite {
  std::string id;
  std::size_t site;
};
/// Every coefficient the check reads, in input order.
std::vector<MutationSite> mutation_sites(const CheckInfo& info, const Catalog& cat);

/// Runs one check against a catalog without consulting errata.
CheckResult run_raw(const CheckInfo& info, const Catalog& cat, const RunOptions& opts);
/// Runs one check, applying ledger entries that target it.
CheckResult run_check(std::string_view id, const Catalog& cat, const RunOptions& opts);
/// Dependency-ordered run of the selection (all checks when empty); results
/// are ordered by check id.
std::vector<CheckResult> run_suite(const std::vector<std::string>& selection, const Catalog& cat,
                                   const RunOptions& opts);

std::string report_json(const std::vector<CheckResult>& results);
std::string report_text(const std::vector<CheckResult>& results);

/// True when every result passed, or passed through an applied erratum.
bool suite_ok(const std::vector<CheckResult>& results);

}  // namespace jetcheck
