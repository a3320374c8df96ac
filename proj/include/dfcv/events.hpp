#pragma once

#include <string>
#include <vector>

namespace dfcv {

enum class EventKind { split, merge, destroy, warn };

std::string to_string(EventKind kind);

struct Event {
  double time_s = 0.0;
  EventKind kind = EventKind::warn;
  std::string detail;  // no commas; semicolons separate id lists
};

using EventLog = std::vector<Event>;

}  // namespace dfcv
