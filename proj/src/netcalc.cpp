#include "detnet/netcalc.hpp"

#include <cmath>
#include <sstream>

#include "detnet/errors.hpp"

namespace detnet::netcalc {
namespace {

void require_valid(const ArrivalCurve& a) {
  if (!(a.rate_bps >= 0.0) || !(a.burst_bits >= 0.0)) {
    throw InvalidParameter("arrival curve needs rate >= 0 and burst >= 0");
  }
}

void require_valid(const ServiceCurve& s) {
  if (!(s.rate_bps > 0.0) || !(s.latency_s >= 0.0)) {
    throw InvalidParameter("service curve needs rate > 0 and latency >= 0");
  }
}

void require_stable(const ArrivalCurve& a, const ServiceCurve& s) {
  require_valid(a);
  require_valid(s);
  if (a.rate_bps > s.rate_bps) {
    std::ostringstream msg;
    msg << "arrival rate " << a.rate_bps << " bps exceeds service rate " << s.rate_bps
        << " bps";
    throw ServiceOverload(msg.str());
  }
}

}  // namespace

double ArrivalCurve::operator()(double t) const {
  return t > 0.0 ? burst_bits + rate_bps * t : 0.0;
}

double ServiceCurve::operator()(double t) const {
  return t > latency_s ? rate_bps * (t - latency_s) : 0.0;
}

ArrivalCurve operator+(const ArrivalCurve& a, const ArrivalCurve& b) {
  return {a.rate_bps + b.rate_bps, a.burst_bits + b.burst_bits};
}

ArrivalCurve aggregate(std::span<const ArrivalCurve> curves) {
  ArrivalCurve sum;
  for (const auto& c : curves) {
    require_valid(c);
    sum = sum + c;
  }
  return sum;
}

double delay_bound(const ArrivalCurve& a, const ServiceCurve& s) {
  require_stable(a, s);
  return s.latency_s + a.burst_bits / s.rate_bps;
}

double backlog_bound(const ArrivalCurve& a, const ServiceCurve& s) {
  require_stable(a, s);
  return a.burst_bits + a.rate_bps * s.latency_s;
}

BoundSet bounds(const ArrivalCurve& a, const ServiceCurve& s) {
  return {delay_bound(a, s), backlog_bound(a, s)};
}

ArrivalCurve output_curve(const ArrivalCurve& a, const ServiceCurve& s) {
  require_stable(a, s);
  return {a.rate_bps, a.burst_bits + a.rate_bps * s.latency_s};
}

ServiceCurve port_service(double link_rate_bps, double t_proc_s, double t_spq_s) {
  if (!(link_rate_bps > 0.0) || !std::isfinite(link_rate_bps)) {
    throw InvalidParameter("link rate must be positive");
  }
  if (!(t_proc_s >= 0.0) || !(t_spq_s >= 0.0)) {
    throw InvalidParameter("switch delays must be non-negative");
  }
  return {link_rate_bps, t_proc_s + t_spq_s};
}

ServiceCurve residual_spq(const ServiceCurve& port, const ArrivalCurve& higher,
                          double blocking_bits) {
  require_valid(port);
  require_valid(higher);
  if (!(blocking_bits >= 0.0)) {
    throw InvalidParameter("blocking term must be non-negative");
  }
  const double capacity = port.rate_bps;
  if (higher.rate_bps >= capacity) {
    std::ostringstream msg;
    msg << "higher-priority rate " << higher.rate_bps << " bps saturates port rate "
        << capacity << " bps";
    throw ServiceOverload(msg.str());
  }
  if (higher.rate_bps == 0.0 && higher.burst_bits == 0.0 && blocking_bits == 0.0) {
    return port;
  }
  const double rate = capacity - higher.rate_bps;
  const double latency =
      (capacity * port.latency_s + higher.burst_bits + blocking_bits) / rate;
  return {rate, latency};
}

}  // namespace detnet::netcalc
