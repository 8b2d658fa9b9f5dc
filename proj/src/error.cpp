#include "adiatrack/error.hpp"

#include <sstream>

namespace adiatrack {

namespace {

std::string describe(const std::string& bound, unsigned long long step, double measured,
                     double declared) {
  std::ostringstream os;
  os.precision(17);
  os << "certificate violation: " << bound << " at t=" << step << " (measured " << measured
     << ", declared " << declared << ")";
  return os.str();
}

}  // namespace

CertificateViolation::CertificateViolation(std::string bound, unsigned long long step,
                                           double measured, double declared)
    : std::runtime_error(describe(bound, step, measured, declared)),
      bound_(std::move(bound)),
      step_(step),
      measured_(measured),
      declared_(declared) {}

}  // namespace adiatrack
