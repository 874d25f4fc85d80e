#include "ppc/errors.hpp"

#include <sstream>

namespace ppc {

namespace {

std::string funnel_message(double value, double bound, double t, const std::string& what_signal) {
  std::ostringstream os;
  os.precision(17);
  os << "funnel violation: |" << what_signal << "| = " << (value < 0 ? -value : value)
     << " >= bound " << bound << " at t = " << t;
  return os.str();
}

std::string parse_message(const std::string& message, std::size_t line, const std::string& key) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  if (!key.empty()) os << "key '" << key << "': ";
  os << message;
  return os.str();
}

}  // namespace

FunnelViolation::FunnelViolation(double value, double bound, double t, const std::string& what_signal)
    : Error(funnel_message(value, bound, t, what_signal)), value_(value), bound_(bound), time_(t) {}

ParseError::ParseError(const std::string& message, std::size_t line, const std::string& key)
    : Error(parse_message(message, line, key)), line_(line), key_(key) {}

}  // namespace ppc
