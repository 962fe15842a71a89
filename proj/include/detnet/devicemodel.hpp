#pragma once

// Switch and end-host device parameters.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace detnet::devicemodel {

struct SwitchProfile {
  std::string name;
  double link_rate_bps = 0.0;
  double t_proc_s = 0.0;
  int num_queues = 0;
  double t_spq_s = 0.0;
  double total_buffer_bits = 0.0;
  int max_frame_bytes = 0;
  int max_bridge_priorities = 0;
  int port_count = 0;

  /// Measured parameters of the 8-port FS S2805S gigabit switch.
  static SwitchProfile fs_s2805s();

  /// Throws InvalidParameter when any field is out of range.
  void validate() const;

  friend bool operator==(const SwitchProfile&, const SwitchProfile&) = default;
};

/// Queue buffer budget in bytes when the switch has `active_ports` connected
/// ports. The shared packet buffer is split evenly between active ports.
std::int64_t per_queue_buffer(const SwitchProfile& profile, int active_ports);

/// Measured excess rate of a Linux TBF shaper as a function of its burst.
class TbfDeviationTable {
 public:
  struct Point {
    std::int64_t burst_bytes;
    double deviation_percent;
    friend bool operator==(const Point&, const Point&) = default;
  };

  TbfDeviationTable() = default;
  explicit TbfDeviationTable(std::vector<Point> points);

  /// Nine measurements at 3 Mbit/s between 84 B and 1542 B bursts.
  static TbfDeviationTable measured();

  const std::vector<Point>& points() const { return points_; }

  friend bool operator==(const TbfDeviationTable&, const TbfDeviationTable&) = default;

 private:
  std::vector<Point> points_;
};

/// Deviation in percent: exact at measured points, linear in between and
/// clamped to the end values outside the measured range.
double tbf_deviation(const TbfDeviationTable& table, std::int64_t burst_bytes);

/// Rate the network actually sees from a shaper configured at `rate_bps`.
double compensate_rate(const TbfDeviationTable& table, double rate_bps,
                       std::int64_t burst_bytes);

/// Profiles by name. Always contains the built-in default.
class ProfileRegistry {
 public:
  ProfileRegistry();

  void add(SwitchProfile profile);
  const SwitchProfile& get(const std::string& name) const;
  bool contains(const std::string& name) const { return profiles_.count(name) != 0; }
  const std::map<std::string, SwitchProfile>& all() const { return profiles_; }

  static const std::string& default_name();

  friend bool operator==(const ProfileRegistry&, const ProfileRegistry&) = default;

 private:
  std::map<std::string, SwitchProfile> profiles_;
};

void to_json(nlohmann::json& j, const SwitchProfile& p);
void from_json(const nlohmann::json& j, SwitchProfile& p);
void to_json(nlohmann::json& j, const TbfDeviationTable& t);
void from_json(const nlohmann::json& j, TbfDeviationTable& t);

/// Loads a profile document: {"profiles": [SwitchProfile, ...]} or a single
/// profile object. Throws IoError / SchemaMismatch.
ProfileRegistry load_profiles(const std::string& path);
ProfileRegistry profiles_from_json(const nlohmann::json& doc);

}  // namespace detnet::devicemodel
