#pragma once

#include <string_view>

namespace fsm::log {

// Warnings go to stderr unless FSM_LOG=quiet.
void warn(std::string_view message);

}  // namespace fsm::log
