#include "wkbgo/commands.hpp"
#include "wkbgo/report.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"WKB mode-closure, profile and split-step experiments"};
  app.set_version_flag("--version", std::string(wkbgo::kToolName) + " " + wkbgo::kToolVersion);
  app.require_subcommand(1);

  wkbgo::CommandOptions opt;
  double assert_order = 0.0;
  int jobs = 1;
  std::string oracle;

  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--scenario", opt.scenario, "Scenario JSON document")->required();
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--jobs", jobs, "Concurrent sweep jobs")->check(CLI::PositiveNumber);
    sub->add_flag("--seedless", opt.seedless, "Accepted for compatibility; runs are deterministic");
    return sub;
  };
  add("closure", "Close the initial wave vectors under resonant creation");
  CLI::App* profiles = add("profiles", "Integrate the profile equations");
  profiles->add_option("--oracle", oracle, "Closed-form comparison")
      ->check(CLI::IsMember({"none", "explicit_torus_1d", "explicit_two_mode", "explicit_euclid_1d"}));
  CLI::App* converge = add("converge", "Compare the spectral solution with the WKB approximation over an eps sweep");
  converge->add_option("--assert-order", assert_order, "Fail unless the fitted order reaches this value");
  add("instability", "Evaluate the two-mode instability construction");
  add("smalldiv", "Survey resonance defects and Gram relations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : wkbgo::kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--jobs")) opt.jobs = jobs;
  if (sub->get_name() == "profiles" && sub->count("--oracle")) opt.oracle = oracle;
  if (sub->get_name() == "converge" && sub->count("--assert-order")) opt.assert_order = assert_order;
  return wkbgo::run_command(sub->get_name(), opt, std::cout, std::cerr);
}
