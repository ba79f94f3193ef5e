#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "whilesos/parser.hpp"
#include "whilesos/syntax.hpp"

// set by CMake
#ifndef WHILESOS_SOURCE_DIR
#define WHILESOS_SOURCE_DIR "."
#endif

namespace testing {

inline std::filesystem::path source_dir() { return WHILESOS_SOURCE_DIR; }
inline std::filesystem::path rules_dir() { return source_dir() / "rules"; }
inline std::filesystem::path programs_dir() { return source_dir() / "programs"; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline whilesos::Cmd program(const std::string& name) {
  return whilesos::parse_cmd(slurp(programs_dir() / name));
}

inline whilesos::Store store(const std::string& text) { return whilesos::parse_store(text); }
inline whilesos::InputStream stream(const std::string& text) {
  return whilesos::parse_stream(text);
}

}  // namespace testing
