#include "dfcv/events.hpp"

namespace dfcv {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::split:
      return "SPLIT";
    case EventKind::merge:
      return "MERGE";
    case EventKind::destroy:
      return "DESTROY";
    case EventKind::warn:
      return "WARN";
  }
  return "UNKNOWN";
}

}  // namespace dfcv
