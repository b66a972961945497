#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "critnet/damage.hpp"
#include "critnet/metrics.hpp"
#include "critnet/rules.hpp"
#include "critnet/tasks.hpp"
#include "critnet/topology.hpp"

namespace critnet {

/// Locale-independent fixed-point formatting (the regression format for
/// every real-valued column).
inline std::string fmt_fixed(double v, int precision = 6) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v,
                           std::chars_format::fixed, precision);
  if (res.ec != std::errc{}) throw std::runtime_error("fmt_fixed: value out of range");
  return std::string(buf, res.ptr);
}

/// Shortest round-trip representation, for config rendering.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("fmt_double: value out of range");
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::uint64_t parse_u64(std::string_view s, const std::string& what) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("expected integer for " + what + ": '" +
                                std::string(s) + "'");
  return v;
}

inline double parse_double(std::string_view s, const std::string& what) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("expected number for " + what + ": '" +
                                std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

// --- network text format ---------------------------------------------------

inline constexpr std::string_view kTopologyHeader = "critnet-topology v1";

inline std::string lut_to_hex(const RuleSet& r, std::uint32_t node) {
  const std::uint64_t bits = r.lut_bits(node);
  const std::uint64_t width = (bits + 3) / 4;
  std::string s(width, '0');
  for (std::uint64_t j = 0; j < width; ++j) {
    unsigned v = 0;
    for (unsigned b = 0; b < 4; ++b) {
      const std::uint64_t row = 4 * j + b;
      if (row < bits && r.lut_entry(node, row)) v |= 1u << b;
    }
    s[width - 1 - j] = "0123456789abcdef"[v];
  }
  return s;
}

inline void lut_from_hex(RuleSet& r, std::uint32_t node, std::string_view hex) {
  const std::uint64_t bits = r.lut_bits(node);
  const std::uint64_t width = (bits + 3) / 4;
  if (hex.size() != width)
    throw std::invalid_argument("rule hex width mismatch");
  for (std::uint64_t j = 0; j < width; ++j) {
    const char c = hex[width - 1 - j];
    unsigned v;
    if (c >= '0' && c <= '9') v = unsigned(c - '0');
    else if (c >= 'a' && c <= 'f') v = unsigned(c - 'a') + 10;
    else if (c >= 'A' && c <= 'F') v = unsigned(c - 'A') + 10;
    else throw std::invalid_argument("rule hex contains a non-hex character");
    for (unsigned b = 0; b < 4; ++b) {
      const std::uint64_t row = 4 * j + b;
      const bool bit = (v >> b) & 1u;
      if (row < bits) r.set_lut_entry(node, row, bit);
      else if (bit) throw std::invalid_argument("rule hex sets bits beyond the LUT");
    }
  }
}

inline void write_topology(const Topology& t, std::ostream& os) {
  os << kTopologyHeader << " N=" << t.n_nodes
     << " class=" << to_string(t.class_tag);
  if (t.geometry == GeometryKind::ring) os << " geom=ring";
  os << '\n';
  for (std::uint32_t i = 0; i < t.n_nodes; ++i)
    for (auto src : t.in_edges(i)) os << i << '\t' << src << '\n';
}

inline void write_network(const Topology& t, const RuleSet& r,
                          std::ostream& os) {
  validate_rules(t, r);
  write_topology(t, os);
  for (std::uint32_t i = 0; i < t.n_nodes; ++i) {
    if (r.kind == RuleKind::boolean_lut) {
      os << "rule\t" << lut_to_hex(r, i) << '\n';
    } else {
      os << "weights\t";
      const auto base = t.in_offsets[i];
      const auto deg = t.in_degree(i);
      for (std::uint32_t j = 0; j < deg; ++j)
        os << (r.weight_sign(base + j) > 0 ? '+' : '-');
      os << '\n';
    }
  }
}

struct LoadedNetwork {
  Topology topology;
  std::optional<RuleSet> rules;
};

inline LoadedNetwork read_network(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("network parse: empty input");
  auto head = detail::split(line, ' ');
  if (head.size() < 4 || head[0] != "critnet-topology" || head[1] != "v1")
    throw std::invalid_argument("network parse: bad header: '" + line + "'");
  std::uint32_t n = 0;
  std::string class_str;
  bool ring = false;
  for (std::size_t i = 2; i < head.size(); ++i) {
    const auto tok = head[i];
    if (tok.starts_with("N="))
      n = static_cast<std::uint32_t>(detail::parse_u64(tok.substr(2), "N"));
    else if (tok.starts_with("class="))
      class_str = std::string(tok.substr(6));
    else if (tok == "geom=ring")
      ring = true;
    else
      throw std::invalid_argument("network parse: unknown header token: '" +
                                  std::string(tok) + "'");
  }
  if (n == 0) throw std::invalid_argument("network parse: missing or zero N");
  if (class_str.empty())
    throw std::invalid_argument("network parse: missing class");
  const ClassTag tag = class_tag_from_string(class_str);

  std::vector<std::vector<std::uint32_t>> lists(n);
  std::uint64_t prev_tgt = 0, prev_src = 0;
  bool have_prev = false;
  std::size_t line_no = 1;
  std::vector<std::pair<std::string, std::string>> rule_lines;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::invalid_argument("network parse: line " +
                                  std::to_string(line_no) + ": expected a tab");
    const std::string_view first(line.data(), tab);
    const std::string_view second(line.data() + tab + 1, line.size() - tab - 1);
    if (first == "rule" || first == "weights") {
      rule_lines.emplace_back(std::string(first), std::string(second));
      continue;
    }
    if (!rule_lines.empty())
      throw std::invalid_argument("network parse: line " +
                                  std::to_string(line_no) +
                                  ": edge after rule lines");
    const auto tgt = detail::parse_u64(first, "target");
    const auto src = detail::parse_u64(second, "source");
    if (tgt >= n || src >= n)
      throw std::invalid_argument("network parse: line " +
                                  std::to_string(line_no) +
                                  ": node index out of range");
    if (have_prev && (tgt < prev_tgt || (tgt == prev_tgt && src <= prev_src)))
      throw std::invalid_argument("network parse: line " +
                                  std::to_string(line_no) +
                                  ": edges not strictly sorted");
    prev_tgt = tgt;
    prev_src = src;
    have_prev = true;
    lists[tgt].push_back(static_cast<std::uint32_t>(src));
  }

  GeometryKind geom = GeometryKind::none;
  std::uint32_t side = 0;
  if (ring) {
    geom = GeometryKind::ring;
  } else if (tag != ClassTag::rbn_random) {
    geom = GeometryKind::torus2d;
    side = side_of(n);
  }
  LoadedNetwork net;
  net.topology = topology_from_lists(n, std::move(lists), tag, geom, side);

  if (!rule_lines.empty()) {
    if (rule_lines.size() != n)
      throw std::invalid_argument("network parse: rule line count != N");
    const bool boolean = rule_lines.front().first == "rule";
    RuleSet r = boolean ? make_boolean_rules(net.topology)
                        : make_threshold_rules(net.topology);
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto& [kind, payload] = rule_lines[i];
      if ((kind == "rule") != boolean)
        throw std::invalid_argument("network parse: mixed rule kinds");
      if (boolean) {
        lut_from_hex(r, i, payload);
      } else {
        const auto deg = net.topology.in_degree(i);
        if (payload.size() != deg)
          throw std::invalid_argument("network parse: weight count != in-degree");
        const auto base = net.topology.in_offsets[i];
        for (std::uint32_t j = 0; j < deg; ++j) {
          if (payload[j] == '+') r.set_weight_sign(base + j, +1);
          else if (payload[j] == '-') r.set_weight_sign(base + j, -1);
          else throw std::invalid_argument("network parse: weight char must be + or -");
        }
      }
    }
    net.rules = std::move(r);
  }
  return net;
}

// --- damage table CSV -------------------------------------------------------

inline constexpr std::string_view kDamageCsvHeader =
    "class,N,K,damage_size,mean_damage,std_error,n_networks,n_ics,t_measure,seed";

inline void write_damage_csv(const DamageTable& table, std::ostream& os) {
  os << kDamageCsvHeader << '\n';
  for (const auto& r : table.rows) {
    os << r.class_name << ',' << r.n << ',' << fmt_fixed(r.k) << ','
       << r.damage_size << ',' << fmt_fixed(r.mean_damage) << ','
       << fmt_fixed(r.std_error) << ',' << r.n_networks << ',' << r.n_ics
       << ',' << r.t_measure << ',' << r.seed << '\n';
  }
}

inline DamageTable read_damage_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kDamageCsvHeader)
    throw std::invalid_argument("damage csv: bad or missing header");
  DamageTable table;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 10)
      throw std::invalid_argument("damage csv: line " + std::to_string(line_no) +
                                  ": expected 10 columns");
    DamageRow r;
    r.class_name = std::string(f[0]);
    r.n = static_cast<std::uint32_t>(detail::parse_u64(f[1], "N"));
    r.k = detail::parse_double(f[2], "K");
    r.damage_size = static_cast<std::uint32_t>(detail::parse_u64(f[3], "damage_size"));
    r.mean_damage = detail::parse_double(f[4], "mean_damage");
    r.std_error = detail::parse_double(f[5], "std_error");
    r.n_networks = static_cast<std::uint32_t>(detail::parse_u64(f[6], "n_networks"));
    r.n_ics = static_cast<std::uint32_t>(detail::parse_u64(f[7], "n_ics"));
    r.t_measure = static_cast<std::uint32_t>(detail::parse_u64(f[8], "t_measure"));
    r.seed = detail::parse_u64(f[9], "seed");
    table.rows.push_back(std::move(r));
  }
  return table;
}

// --- metrics CSV ------------------------------------------------------------

inline constexpr std::string_view kMetricsCsvHeader =
    "N,K,class,p,alpha,avg_path,reachable_frac,clustering,n_components,"
    "largest_frac,total_wire,mean_wire";

struct MetricsRow {
  std::uint32_t n = 0;
  double k = 0.0;
  std::string class_name;
  double p = 0.0;
  double alpha = 0.0;
  MetricsReport report;
};

inline void write_metrics_csv(const std::vector<MetricsRow>& rows,
                              std::ostream& os) {
  os << kMetricsCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.n << ',' << fmt_fixed(r.k) << ',' << r.class_name << ','
       << fmt_fixed(r.p) << ',' << fmt_fixed(r.alpha) << ','
       << fmt_fixed(r.report.avg_path) << ','
       << fmt_fixed(r.report.reachable_frac) << ','
       << fmt_fixed(r.report.clustering) << ',' << r.report.n_components << ','
       << fmt_fixed(r.report.largest_frac) << ','
       << fmt_fixed(r.report.total_wire) << ','
       << fmt_fixed(r.report.mean_wire) << '\n';
  }
}

// --- task CSV ---------------------------------------------------------------

inline constexpr std::string_view kTaskCsvHeader =
    "task,class,N,K,fitness,budget,seed";

struct TaskRow {
  std::string task;
  std::string class_name;
  std::uint32_t n = 0;
  double k = 0.0;
  double fitness = 0.0;
  std::uint32_t budget = 0;
  std::uint64_t seed = 0;
};

inline void write_task_csv(const std::vector<TaskRow>& rows, std::ostream& os) {
  os << kTaskCsvHeader << '\n';
  for (const auto& r : rows)
    os << r.task << ',' << r.class_name << ',' << r.n << ',' << fmt_fixed(r.k)
       << ',' << fmt_fixed(r.fitness) << ',' << r.budget << ',' << r.seed
       << '\n';
}

inline void write_density_breakdown(const FitnessReport& rep, std::ostream& os) {
  os << "ones,n_ics,n_success\n";
  for (const auto& b : rep.buckets)
    os << b.ones << ',' << b.n_ics << ',' << b.n_success << '\n';
}

// --- plot data --------------------------------------------------------------

struct PlotFile {
  std::string class_name;
  std::uint32_t n = 0;
  std::string content;
};

/// One whitespace table per (class, system size): rows
/// "K mean_damage std_error", K ascending, values formatted exactly as in
/// the CSV.  The caller places the contents on disk.
inline std::vector<PlotFile> emit_plotdata(const DamageTable& table) {
  if (table.rows.empty())
    throw std::invalid_argument("emit_plotdata: empty table");
  std::map<std::pair<std::string, std::uint32_t>,
           std::map<double, const DamageRow*>>
      groups;
  for (const auto& r : table.rows) groups[{r.class_name, r.n}][r.k] = &r;
  std::vector<PlotFile> files;
  for (const auto& [key, rows] : groups) {
    std::ostringstream os;
    for (const auto& [k, r] : rows)
      os << fmt_fixed(k) << ' ' << fmt_fixed(r->mean_damage) << ' '
         << fmt_fixed(r->std_error) << '\n';
    files.push_back({key.first, key.second, os.str()});
  }
  return files;
}

}  // namespace critnet
