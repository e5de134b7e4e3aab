// Shared paths, file helpers, and a runner for the built CLI binary.
#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "delib/parse.hpp"

namespace testsupport {

inline std::string source_path(const std::string& relative) {
  return std::string(DELIB_SOURCE_DIR) + "/" + relative;
}

inline std::string cli_path() { return DELIB_CLI_PATH; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::string write_temp_file(const std::string& stem, const std::string& content) {
  static int counter = 0;
  const std::string path = "/tmp/delib_test_" + std::to_string(getpid()) + "_" +
                           std::to_string(counter++) + "_" + stem;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  return path;
}

inline delib::ProblemInstance load_instance(const std::string& relative) {
  return delib::parse_instance(read_file(source_path(relative)));
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

inline CliResult run_cli(const std::string& args) {
  const std::string command = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed for: " + command);
  CliResult result;
  char buffer[4096];
  size_t got = 0;
  while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0)
    result.output.append(buffer, got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace testsupport
