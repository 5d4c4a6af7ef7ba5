// hardy-forge: runs a verification battery from a TOML config and writes a JSON report.

#include "hardy/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
  using namespace hardy::cli;
  CLI::App app{"Optimal Hardy weight construction and verification"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);

  Options opt;
  std::string config, out;
  std::uint64_t seed = 0;
  const std::map<std::string, std::string> help{
    {"radial", "solve a radial operator and check its optimal weight"},
    {"verify", "principal eigenvalue, essential spectrum and null-criticality checks"},
    {"catalog", "closed-form constants of the named examples"},
    {"multipolar", "multipolar weights against their generic pair sum"},
    {"spectrum", "Mellin and generalized Fourier transforms"},
    {"rellich", "Rellich-type inequalities, Agmon lengths and decay bounds"},
    {"report", "aggregate reports found in a directory"}};
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config, "TOML config file")->required();
    sub->add_option("--out", out, "output directory (default: config key 'out')");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_flag("--no-timestamp", "omit the timestamp so reruns are byte-identical");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage_error;
  }

  const auto* sub = app.get_subcommands().front();
  opt.subcommand = sub->get_name();
  opt.config = config;
  if (sub->count("--out"))
    opt.out = out;
  if (sub->count("--seed"))
    opt.seed = seed;
  opt.timestamp = sub->count("--no-timestamp") == 0;
  return execute(opt, std::cerr);
}
