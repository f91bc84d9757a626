#include "commands.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("proto-tqtl");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("PROTO_TQTL_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);

  std::vector<std::string> args(argv, argv + argc);
  return proto_tqtl::cli::run(args, std::cout, std::cerr);
}
