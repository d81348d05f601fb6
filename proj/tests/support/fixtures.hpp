#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vrpweave/vrpweave.hpp"

namespace vrp::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(VRP_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ProcessModel jaxa() { return load_model(read_fixture("jaxa.vrp")); }

inline std::vector<ProcessAspect> jaxa_aspects(const ProcessModel& m) {
  return parse_aspect_file(read_fixture("jaxa.pasp"), m);
}

/// Code of the vrp::Error `fn` throws, or nullopt if it returns.
template <class Fn>
std::optional<ErrorCode> error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace vrp::testing

#define EXPECT_VRP_ERROR(code, stmt) \
  EXPECT_EQ(::vrp::testing::error_of([&] { (void)(stmt); }), std::optional<::vrp::ErrorCode>(code))
