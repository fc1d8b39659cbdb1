#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

namespace topomatch::cli_test {

namespace fs = std::filesystem;

inline fs::path scratch_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("topomatch_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs the CLI with `args` (already shell-quoted), stdout to `out` when given.
inline int run_cli(const std::string& args, const fs::path& out = {}) {
  std::string cmd = std::string("'") + TOPOMATCH_CLI + "' " + args;
  cmd += out.empty() ? " > /dev/null" : " > '" + out.string() + "'";
  cmd += " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace topomatch::cli_test
