#include <iostream>
#include <map>

#include "app.hpp"
#include "proofsmith/errors.hpp"

int main(int argc, char** argv) {
  using namespace proofsmith::cli;
  CLI::App app{"proofsmith: whole-proof generation, self-correction and training-data tooling"};
  app.set_version_flag("--version", "proofsmith 0.1.0");
  app.require_subcommand(1);

  std::map<std::string, Runner> runners = {
      {"prove", add_prove(app)},         {"stats", add_stats(app)},       {"negate", add_negate(app)},
      {"average", add_average(app)},     {"rl-prep", add_rl_prep(app)},   {"synthesize", add_synthesize(app)},
      {"scaffold", add_scaffold(app)},   {"repair", add_repair(app)},     {"serve-verifier", add_serve_verifier(app)},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  for (const auto* sub : app.get_subcommands()) {
    try {
      return runners.at(sub->get_name())();
    } catch (const proofsmith::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kConfigError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kConfigError;
    }
  }
  return kConfigError;
}
