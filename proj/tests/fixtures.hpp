#pragma once

#include <fstream>
#include <sstream>
#include <string>

#ifndef QRW_FIXTURES
#error "QRW_FIXTURES must name the fixtures directory"
#endif

inline std::string fixture(const std::string& name) {
  std::ifstream in(std::string(QRW_FIXTURES) + "/" + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string fixturePath(const std::string& name) {
  return std::string(QRW_FIXTURES) + "/" + name;
}
