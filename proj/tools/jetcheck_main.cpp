// Command-line front end: list, verify and explain the published checks.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jetcheck/errors.hpp"
#include "jetcheck/verify.hpp"

namespace {

constexpr int kUsage = 2;

int list_command() {
  const jetcheck::Catalog& cat = jetcheck::Catalog::builtin();
  std::cout << "catalog:\n";
  for (const auto& [id, citation] : cat.index()) std::cout << "  " << id << "  " << citation << "\n";
  std::cout << "checks:\n";
  for (const auto& c : jetcheck::checks()) std::cout << "  " << c.id << "  " << c.citation << "\n";
  return 0;
}

int explain_command(const std::string& id) {
  if (!jetcheck::is_check(id)) {
    std::cerr << "unknown check: " << id << "\n";
    return kUsage;
  }
  const jetcheck::CheckInfo& c = jetcheck::check_info(id);
  std::cout << c.id << "\n  claim: " << c.claim << "\n  citation: " << c.citation << "\n  strategy: " << c.strategy
            << "\n  inputs:";
  for (const auto& in : c.inputs) std::cout << " " << in;
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification of the catalogued identities"};
  app.require_subcommand(1);

  app.add_subcommand("list", "Print the catalog index and the check ids with citations");

  CLI::App* verify = app.add_subcommand("verify", "Run checks and print a report");
  std::vector<std::string> ids;
  bool all = false, timing = false, no_errata = false;
  std::uint64_t seed = 0;
  int max_order = 64;
  std::string errata_path;
  const char* env_format = std::getenv("JETCHECK_REPORT");
  std::string format = env_format && *env_format ? env_format : "text";
  verify->add_option("ids", ids, "Check ids");
  verify->add_flag("--all", all, "Run every check");
  verify->add_option("--seed", seed, "Seed of the numeric oracle")->capture_default_str();
  verify->add_option("--report", format, "Report format (default from JETCHECK_REPORT, else text)")
      ->check(CLI::IsMember({"json", "text"}));
  verify->add_flag("--timing", timing, "Record wall time per check");
  verify->add_option("--max-order", max_order, "Cap on derivative orders during reduction")
      ->check(CLI::Range(8, 1 << 20))
      ->capture_default_str();
  auto* errata_opt = verify->add_option("--errata", errata_path, "Errata ledger file replacing the built-in one");
  verify->add_flag("--no-errata", no_errata, "Report raw statuses")->excludes(errata_opt);

  CLI::App* explain = app.add_subcommand("explain", "Print a check's claim, citation and strategy");
  std::string explain_id;
  explain->add_option("id", explain_id, "Check id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (app.got_subcommand("list")) return list_command();
  if (app.got_subcommand("explain")) return explain_command(explain_id);

  if (format != "json" && format != "text") {
    std::cerr << "unknown report format: " << format << "\n";
    return kUsage;
  }
  if (all == !ids.empty()) {
    std::cerr << "verify needs check ids or --all, not both\n";
    return kUsage;
  }
  for (const auto& id : ids) {
    if (!jetcheck::is_check(id)) {
      std::cerr << "unknown check: " << id << "\n";
      return kUsage;
    }
  }

  jetcheck::ErrataLedger ledger;
  jetcheck::RunOptions opts;
  opts.seed = seed;
  opts.max_order = max_order;
  opts.timing = timing;
  try {
    if (no_errata) {
      opts.errata = nullptr;
    } else if (!errata_path.empty()) {
      ledger = jetcheck::ErrataLedger::load(errata_path);
      opts.errata = &ledger;
    }
  } catch (const jetcheck::Error& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }

  std::vector<jetcheck::CheckResult> results;
  try {
    results = jetcheck::run_suite(ids, jetcheck::Catalog::builtin(), opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << (format == "json" ? jetcheck::report_json(results) : jetcheck::report_text(results));
  if (format == "json") std::cout << "\n";
  return jetcheck::suite_ok(results) ? 0 : 1;
}
