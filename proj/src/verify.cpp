#include "jetcheck/verify.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "check_util.hpp"
#include "errata_data.hpp"

namespace jetcheck {

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Erratum: return "erratum";
    case Status::Undecidable: return "undecidable";
  }
  return "?";
}

// ---- errata ledger ------------------------------------------------------------

namespace {

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

const ErrataLedger& ErrataLedger::builtin() {
  static const ErrataLedger l = parse(detail::kBuiltinLedger);
  return l;
}

// Records are "[id]" followed by "key = value" lines; '#' starts a comment.
ErrataLedger ErrataLedger::parse(std::string_view text) {
  std::vector<ErratumEntry> out;
  std::stringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      out.emplace_back();
      out.back().id = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos || out.empty()) {
      throw ParseError("errata ledger line " + std::to_string(n) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    ErratumEntry& e = out.back();
    if (key == "checks") {
      e.check_ids = split_list(value);
    } else if (key == "target") {
      e.target = value;
    } else if (key == "citation") {
      e.citation = value;
    } else if (key == "original") {
      e.original = value;
    } else if (key == "corrected") {
      e.corrected = value;
    } else if (key == "justification") {
      e.justification = value;
    } else {
      throw ParseError("errata ledger line " + std::to_string(n) + ": unknown key " + key);
    }
  }
  for (const auto& e : out) {
    if (e.check_ids.empty() || e.target.empty() || e.original.empty() || e.corrected.empty() ||
        e.justification.empty()) {
      throw ParseError("errata ledger entry " + e.id + " is incomplete");
    }
  }
  return ErrataLedger(std::move(out));
}

ErrataLedger ErrataLedger::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read errata ledger " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ErrataLedger::to_text() const {
  std::string s;
  for (const auto& e : entries_) {
    if (!s.empty()) s += "\n";
    s += "[" + e.id + "]\nchecks = ";
    for (std::size_t k = 0; k < e.check_ids.size(); ++k) s += (k ? ", " : "") + e.check_ids[k];
    s += "\ntarget = " + e.target + "\ncitation = " + e.citation + "\noriginal = " + e.original +
         "\ncorrected = " + e.corrected + "\njustification = " + e.justification + "\n";
  }
  return s;
}

std::vector<const ErratumEntry*> ErrataLedger::for_check(std::string_view check_id) const {
  std::vector<const ErratumEntry*> out;
  for (const auto& e : entries_) {
    if (std::find(e.check_ids.begin(), e.check_ids.end(), check_id) != e.check_ids.end()) {
      out.push_back(&e);
    }
  }
  return out;
}

Catalog ErrataLedger::apply(const Catalog& cat, const std::vector<const ErratumEntry*>& entries) {
  Catalog out = cat;
  for (const ErratumEntry* e : entries) {
    const Entry& cur = out.get(e->target);
    if (serialize(cur) != e->original) {
      throw Error("erratum " + e->id + ": catalog value of " + e->target + " is " + serialize(cur) +
                  ", ledger expects " + e->original);
    }
    out = out.with_entry(parse_value(cur, e->corrected, out.ring(cur.ring)));
  }
  return out;
}

// ---- registry -------------------------------------------------------------------

const std::vector<CheckInfo>& checks() {
  static const std::vector<CheckInfo> all = [] {
    std::vector<CheckInfo> v;
    detail::add_coupled_checks(v);
    detail::add_spectral_checks(v);
    detail::add_hamiltonian_checks(v);
    detail::add_appendix_checks(v);
    return v;
  }();
  return all;
}

bool is_check(std::string_view id) {
  for (const auto& c : checks()) {
    if (c.id == id) return true;
  }
  return false;
}

const CheckInfo& check_info(std::string_view id) {
  for (const auto& c : checks()) {
    if (c.id == id) return c;
  }
  throw UnknownName("unknown check: " + std::string(id));
}

std::string input_entry(std::string_view input) {
  return std::string(input.substr(0, input.find(':')));
}

std::vector<MutationSite> mutation_sites(const CheckInfo& info, const Catalog& cat) {
  std::vector<MutationSite> out;
  for (const auto& in : info.inputs) {
    std::string id = input_entry(in);
    if (in.ends_with(":scale")) continue;
    std::size_t first = in.ends_with(":constraints") ? cat.evolution_sites(id) : 0;
    std::size_t n = in.ends_with(":evolution") ? cat.evolution_sites(id) : cat.coefficient_sites(id);
    for (std::size_t k = first; k < n; ++k) out.push_back({id, k});
  }
  return out;
}

// ---- running ---------------------------------------------------------------------

namespace {

int rung_rank(Rung r) { return static_cast<int>(r); }

void summarize(CheckResult& r) {
  bool fail = false, undecided = false, erratum = false;
  r.residual_summary.clear();
  r.decided_by = Rung::NormalForm;
  for (const auto& s : r.subchecks) {
    if (s.informational) continue;
    if (rung_rank(s.decided_by) > rung_rank(r.decided_by)) r.decided_by = s.decided_by;
    fail = fail || s.status == Status::Fail;
    undecided = undecided || s.status == Status::Undecidable;
    erratum = erratum || s.status == Status::Erratum;
    for (const auto& x : s.residual) r.residual_summary.push_back(s.name + ": " + x);
  }
  r.status = fail ? Status::Fail
             : undecided ? Status::Undecidable
             : erratum ? Status::Erratum
                       : Status::Pass;
}

}  // namespace

CheckResult run_raw(const CheckInfo& info, const Catalog& cat, const RunOptions& opts) {
  CheckResult r;
  r.id = info.id;
  r.citation = info.citation;
  auto start = std::chrono::steady_clock::now();
  CheckEnv env{cat, opts.seed, opts.max_order};
  try {
    r.subchecks = info.body(env);
  } catch (const MalformedInput& e) {
    r.subchecks.push_back(detail::failing("harness", {std::string("malformed input: ") + e.what()}));
  } catch (const std::exception& e) {
    r.subchecks.push_back(detail::undecidable("harness", std::string("error: ") + e.what()));
  }
  auto stop = std::chrono::steady_clock::now();
  if (opts.timing) {
    r.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
  }
  summarize(r);
  return r;
}

CheckResult run_check(std::string_view id, const Catalog& cat, const RunOptions& opts) {
  const CheckInfo& info = check_info(id);
  std::vector<const ErratumEntry*> entries;
  if (opts.errata) {
    for (const ErratumEntry* e : opts.errata->for_check(id)) {
      if (std::none_of(info.inputs.begin(), info.inputs.end(),
                       [&](const std::string& in) { return input_entry(in) == e->target; })) {
        throw Error("erratum " + e->id + " targets " + e->target + ", which " + info.id +
                    " does not read");
      }
      entries.push_back(e);
    }
  }
  CheckResult raw = run_raw(info, cat, opts);
  if (entries.empty()) return raw;

  CheckResult fixed = run_raw(info, ErrataLedger::apply(cat, entries), opts);
  fixed.time_ms += raw.time_ms;
  bool any = false;
  for (auto& s : fixed.subchecks) {
    if (s.informational || s.status != Status::Pass) continue;
    auto orig = std::find_if(raw.subchecks.begin(), raw.subchecks.end(),
                             [&](const SubCheck& x) { return x.name == s.name; });
    if (orig == raw.subchecks.end() || orig->status == Status::Pass) continue;
    s.status = Status::Erratum;
    for (const auto& x : orig->residual) s.residual.push_back("as transcribed: " + x);
    any = true;
  }
  for (const ErratumEntry* e : entries) {
    if (any) {
      fixed.errata.push_back(e->id);
    } else {
      fixed.notes.push_back("erratum " + e->id + " applied without changing any sub-check");
    }
  }
  summarize(fixed);
  return fixed;
}

std::vector<CheckResult> run_suite(const std::vector<std::string>& selection, const Catalog& cat,
                                   const RunOptions& opts) {
  std::set<std::string> wanted;
  for (const auto& id : selection) {
    check_info(id);
    wanted.insert(id);
  }
  if (wanted.empty()) {
    for (const auto& c : checks()) wanted.insert(c.id);
  }
  // Prerequisites run in table order (the table lists them first).
  std::set<std::string> needed = wanted;
  for (const auto& c : checks()) {
    if (needed.count(c.id)) needed.insert(c.after.begin(), c.after.end());
  }
  std::map<std::string, CheckResult> done;
  for (const auto& c : checks()) {
    if (!needed.count(c.id)) continue;
    std::vector<std::string> blocked;
    for (const auto& dep : c.after) {
      Status s = done.at(dep).status;
      if (s != Status::Pass && s != Status::Erratum) blocked.push_back(dep);
    }
    if (!blocked.empty()) {
      CheckResult r;
      r.id = c.id;
      r.citation = c.citation;
      std::string why = "prerequisite not verified:";
      for (const auto& b : blocked) why += " " + b;
      r.subchecks.push_back(detail::undecidable("prerequisites", why));
      summarize(r);
      done.emplace(c.id, std::move(r));
      continue;
    }
    done.emplace(c.id, run_check(c.id, cat, opts));
  }
  std::vector<CheckResult> out;
  for (auto& [id, r] : done) {
    if (wanted.count(id)) out.push_back(std::move(r));
  }
  return out;
}

bool suite_ok(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) {
    return r.status == Status::Pass || r.status == Status::Erratum;
  });
}

// ---- reports --------------------------------------------------------------------

std::string report_json(const std::vector<CheckResult>& results) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["status"] = to_string(r.status);
    j["decided_by"] = to_string(r.decided_by);
    j["residual_summary"] = r.residual_summary;
    j["time_ms"] = r.time_ms;
    j["citation"] = r.citation;
    j["errata"] = r.errata;
    nlohmann::ordered_json subs = nlohmann::ordered_json::array();
    for (const auto& s : r.subchecks) {
      nlohmann::ordered_json x;
      x["name"] = s.name;
      x["status"] = s.informational ? "info" : to_string(s.status);
      x["decided_by"] = to_string(s.decided_by);
      x["residual"] = s.residual;
      x["notes"] = s.notes;
      subs.push_back(std::move(x));
    }
    j["subchecks"] = std::move(subs);
    j["notes"] = r.notes;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string report_text(const std::vector<CheckResult>& results) {
  std::string s;
  for (const auto& r : results) {
    s += r.id + ": " + to_string(r.status) + " (" + to_string(r.decided_by) + ", " +
         std::to_string(r.time_ms) + " ms)\n";
    s += "  citation: " + r.citation + "\n";
    for (const auto& e : r.errata) s += "  erratum: " + e + "\n";
    for (const auto& sub : r.subchecks) {
      s += "  - " + sub.name + ": " + (sub.informational ? std::string("info") : to_string(sub.status)) +
           "\n";
      for (const auto& x : sub.residual) s += "      residual " + x + "\n";
      for (const auto& x : sub.notes) s += "      note " + x + "\n";
    }
    for (const auto& n : r.notes) s += "  note: " + n + "\n";
  }
  return s;
}

}  // namespace jetcheck
