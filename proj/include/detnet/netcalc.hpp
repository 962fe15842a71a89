#pragma once

// Deterministic network calculus over token-bucket arrival curves and
// rate-latency service curves. Data is measured in bits, time in seconds.

#include <span>

namespace detnet::netcalc {

/// Token-bucket envelope: alpha(t) = burst + rate * t for t > 0, alpha(0) = 0.
struct ArrivalCurve {
  double rate_bps = 0.0;
  double burst_bits = 0.0;

  double operator()(double t) const;
  friend bool operator==(const ArrivalCurve&, const ArrivalCurve&) = default;
};

/// Rate-latency envelope: beta(t) = rate * max(0, t - latency).
struct ServiceCurve {
  double rate_bps = 0.0;
  double latency_s = 0.0;

  double operator()(double t) const;
  friend bool operator==(const ServiceCurve&, const ServiceCurve&) = default;
};

struct BoundSet {
  double delay_s = 0.0;
  double backlog_bits = 0.0;
};

ArrivalCurve operator+(const ArrivalCurve& a, const ArrivalCurve& b);

/// Componentwise sum; the empty aggregate is (0, 0).
ArrivalCurve aggregate(std::span<const ArrivalCurve> curves);

/// Horizontal deviation T + b/R. Throws ServiceOverload when r > R.
double delay_bound(const ArrivalCurve& a, const ServiceCurve& s);

/// Vertical deviation b + r*T. Throws ServiceOverload when r > R.
double backlog_bound(const ArrivalCurve& a, const ServiceCurve& s);

BoundSet bounds(const ArrivalCurve& a, const ServiceCurve& s);

/// Output envelope of a flow leaving the server: (r, b + r*T).
ArrivalCurve output_curve(const ArrivalCurve& a, const ServiceCurve& s);

/// Service offered by one egress port: link rate after processing and
/// scheduler latency.
ServiceCurve port_service(double link_rate_bps, double t_proc_s, double t_spq_s);

/// Strict-priority leftover service for one class. `higher` aggregates every
/// higher-priority class at the port and `blocking_bits` is the largest frame
/// a lower class can have in transmission (non-preemptive).
///
/// The result is the non-decreasing closure of
/// [port(t) - higher(t) - blocking_bits]^+, which is again rate-latency:
///   rate    = C - r_H
///   latency = (C*T + b_H + blocking) / (C - r_H)
ServiceCurve residual_spq(const ServiceCurve& port, const ArrivalCurve& higher,
                          double blocking_bits);

}  // namespace detnet::netcalc
