#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace increx::app {

enum ExitCode { Success = 0, ConfigFailure = 1, NumericalFailure = 2 };

struct Options {
  std::optional<std::string> command;  // overrides the config's "command"
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<std::string> density_class;  // overrides class.type for minimax and saddle-check
  bool quiet = false;
};

// Runs one command and writes result.json, CSV artifacts and manifest.json into options.out.
int run(const Options& options, std::ostream& out, std::ostream& err);

// Parses argv and calls run.
int main_entry(int argc, char** argv);

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace increx::app
