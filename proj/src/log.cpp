#include "fsm/log.hpp"

#include <cstdlib>
#include <iostream>

namespace fsm {

void log::warn(std::string_view message) {
  static const bool quiet = [] {
    const char* env = std::getenv("FSM_LOG");
    return env && std::string_view(env) == "quiet";
  }();
  if (!quiet) std::clog << "fsm: warning: " << message << '\n';
}

}  // namespace fsm
