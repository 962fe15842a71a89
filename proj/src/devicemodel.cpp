#include "detnet/devicemodel.hpp"

#include <algorithm>
#include <fstream>

#include "detnet/errors.hpp"

namespace detnet::devicemodel {

SwitchProfile SwitchProfile::fs_s2805s() {
  SwitchProfile p;
  p.name = "FS-S2805S";
  p.link_rate_bps = 1e9;
  p.t_proc_s = 4.15e-6;
  p.num_queues = 8;
  p.t_spq_s = 3.5e-6;
  p.total_buffer_bits = 4e6;
  p.max_frame_bytes = 1516;
  p.max_bridge_priorities = 16;
  p.port_count = 8;
  return p;
}

void SwitchProfile::validate() const {
  if (name.empty()) throw InvalidParameter("switch profile needs a name");
  if (!(link_rate_bps > 0.0)) throw InvalidParameter(name + ": link_rate_bps must be > 0");
  if (!(t_proc_s >= 0.0) || !(t_spq_s >= 0.0)) {
    throw InvalidParameter(name + ": delays must be >= 0");
  }
  if (num_queues < 1 || num_queues > 8) {
    throw InvalidParameter(name + ": num_queues must be in [1, 8]");
  }
  if (!(total_buffer_bits > 0.0)) {
    throw InvalidParameter(name + ": total_buffer_bits must be > 0");
  }
  if (max_frame_bytes < 64) throw InvalidParameter(name + ": max_frame_bytes too small");
  if (max_bridge_priorities != 16) {
    throw InvalidParameter(name + ": max_bridge_priorities must be 16");
  }
  if (port_count < 1) throw InvalidParameter(name + ": port_count must be >= 1");
}

std::int64_t per_queue_buffer(const SwitchProfile& profile, int active_ports) {
  if (active_ports < 1 || active_ports > profile.port_count) {
    throw InvalidParameter("active_ports " + std::to_string(active_ports) +
                           " outside [1, " + std::to_string(profile.port_count) + "]");
  }
  const auto total_bytes = static_cast<std::int64_t>(profile.total_buffer_bits / 8.0);
  return total_bytes / active_ports;
}

TbfDeviationTable::TbfDeviationTable(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidParameter("TBF deviation table is empty");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].deviation_percent < 0.0) {
      throw InvalidParameter("TBF deviation must be non-negative");
    }
    if (i > 0 && points_[i].burst_bytes <= points_[i - 1].burst_bytes) {
      throw InvalidParameter("TBF deviation table bursts must be strictly increasing");
    }
  }
}

TbfDeviationTable TbfDeviationTable::measured() {
  return TbfDeviationTable({
      {84, 50.00649981552046},
      {242, 13.08895590624894},
      {442, 6.7677969950345},
      {642, 4.56462923611565},
      {842, 3.44413241871526},
      {1042, 2.76546023423554},
      {1242, 2.31063597897005},
      {1442, 1.984468595702},
      {1542, 1.85364426772192},
  });
}

double tbf_deviation(const TbfDeviationTable& table, std::int64_t burst_bytes) {
  const auto& pts = table.points();
  if (pts.empty()) return 0.0;
  if (burst_bytes <= pts.front().burst_bytes) return pts.front().deviation_percent;
  if (burst_bytes >= pts.back().burst_bytes) return pts.back().deviation_percent;
  auto hi = std::lower_bound(pts.begin(), pts.end(), burst_bytes,
                             [](const auto& p, std::int64_t b) { return p.burst_bytes < b; });
  if (hi->burst_bytes == burst_bytes) return hi->deviation_percent;
  auto lo = std::prev(hi);
  const double frac = static_cast<double>(burst_bytes - lo->burst_bytes) /
                      static_cast<double>(hi->burst_bytes - lo->burst_bytes);
  return lo->deviation_percent + frac * (hi->deviation_percent - lo->deviation_percent);
}

double compensate_rate(const TbfDeviationTable& table, double rate_bps,
                       std::int64_t burst_bytes) {
  if (!(rate_bps > 0.0)) throw InvalidParameter("rate must be positive");
  return rate_bps * (1.0 + tbf_deviation(table, burst_bytes) / 100.0);
}

ProfileRegistry::ProfileRegistry() { add(SwitchProfile::fs_s2805s()); }

void ProfileRegistry::add(SwitchProfile profile) {
  profile.validate();
  profiles_[profile.name] = std::move(profile);
}

const SwitchProfile& ProfileRegistry::get(const std::string& name) const {
  auto it = profiles_.find(name);
  if (it == profiles_.end()) throw InvalidParameter("unknown switch profile '" + name + "'");
  return it->second;
}

const std::string& ProfileRegistry::default_name() {
  static const std::string name = "FS-S2805S";
  return name;
}

void to_json(nlohmann::json& j, const SwitchProfile& p) {
  j = nlohmann::json{{"name", p.name},
                     {"link_rate_bps", p.link_rate_bps},
                     {"t_proc_s", p.t_proc_s},
                     {"num_queues", p.num_queues},
                     {"t_spq_s", p.t_spq_s},
                     {"total_buffer_bits", p.total_buffer_bits},
                     {"max_frame_bytes", p.max_frame_bytes},
                     {"max_bridge_priorities", p.max_bridge_priorities},
                     {"port_count", p.port_count}};
}

void from_json(const nlohmann::json& j, SwitchProfile& p) {
  j.at("name").get_to(p.name);
  j.at("link_rate_bps").get_to(p.link_rate_bps);
  j.at("t_proc_s").get_to(p.t_proc_s);
  j.at("num_queues").get_to(p.num_queues);
  j.at("t_spq_s").get_to(p.t_spq_s);
  j.at("total_buffer_bits").get_to(p.total_buffer_bits);
  j.at("max_frame_bytes").get_to(p.max_frame_bytes);
  p.max_bridge_priorities = j.value("max_bridge_priorities", 16);
  j.at("port_count").get_to(p.port_count);
}

void to_json(nlohmann::json& j, const TbfDeviationTable& t) {
  j = nlohmann::json::array();
  for (const auto& p : t.points()) {
    j.push_back({{"burst_bytes", p.burst_bytes}, {"deviation_percent", p.deviation_percent}});
  }
}

void from_json(const nlohmann::json& j, TbfDeviationTable& t) {
  std::vector<TbfDeviationTable::Point> pts;
  for (const auto& e : j) {
    pts.push_back({e.at("burst_bytes").get<std::int64_t>(),
                   e.at("deviation_percent").get<double>()});
  }
  t = TbfDeviationTable(std::move(pts));
}

ProfileRegistry profiles_from_json(const nlohmann::json& doc) {
  ProfileRegistry registry;
  try {
    if (doc.contains("profiles")) {
      for (const auto& p : doc.at("profiles")) registry.add(p.get<SwitchProfile>());
    } else {
      registry.add(doc.get<SwitchProfile>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("profile document: ") + e.what());
  }
  return registry;
}

ProfileRegistry load_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(path + ": " + e.what());
  }
  return profiles_from_json(doc);
}

}  // namespace detnet::devicemodel
