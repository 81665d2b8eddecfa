#include "tfrhss/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace tfrhss {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct Line {
  int number;
  std::string key;
  std::string value;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& s, int line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) fail(line, "expected a number, got '" + s + "'");
  return v;
}

int to_int(const std::string& s, int line) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) fail(line, "expected an integer, got '" + s + "'");
  return v;
}

std::vector<BoundarySegment> parse_edge(const std::string& value, int line) {
  std::vector<BoundarySegment> segs;
  for (const auto& part : split(value, '|')) {
    const auto w = words(part);
    if (w.size() < 3) fail(line, "boundary segment needs 'kind start end ...'");
    BoundarySegment s;
    if (w[0] == "dirichlet") s.kind = BoundaryKind::dirichlet;
    else if (w[0] == "neumann") s.kind = BoundaryKind::neumann;
    else if (w[0] == "robin") s.kind = BoundaryKind::robin;
    else fail(line, "unknown boundary kind '" + w[0] + "'");
    s.start = to_double(w[1], line);
    s.end = to_double(w[2], line);
    const std::size_t want = s.kind == BoundaryKind::neumann ? 3 : s.kind == BoundaryKind::dirichlet ? 4 : 5;
    if (w.size() != want) fail(line, std::string(to_string(s.kind)) + " segment has wrong field count");
    if (w.size() >= 4) s.temperature = to_double(w[3], line);
    if (w.size() >= 5) s.heat_transfer = to_double(w[4], line);
    segs.push_back(s);
  }
  return segs;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

SystemSpec parse_system_spec(const std::string& text) {
  std::map<std::string, std::vector<Line>> singles;
  std::vector<std::vector<Line>> source_sections;
  std::vector<Line> sensor_lines;
  std::string section;
  std::istringstream in(text);
  int number = 0;
  const std::set<std::string> known_sections{"grid", "physics", "boundary", "source", "sensors"};

  for (std::string raw; std::getline(in, raw);) {
    ++number;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(number, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(section)) fail(number, "unknown section [" + section + "]");
      if (section == "source") source_sections.emplace_back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(number, "expected 'key = value'");
    if (section.empty()) fail(number, "key outside of any section");
    Line l{number, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (section == "source") source_sections.back().push_back(l);
    else if (section == "sensors" && l.key == "cells") sensor_lines.push_back(l);
    else singles[section].push_back(l);
  }

  SystemSpec spec;
  int n_cells = -1;
  double side = -1.0;
  std::set<std::string> seen;
  auto once = [&](const std::string& sec, const Line& l) {
    if (!seen.insert(sec + "." + l.key).second) fail(l.number, "duplicate key '" + l.key + "'");
  };

  for (const auto& l : singles["grid"]) {
    once("grid", l);
    if (l.key == "n_cells") n_cells = to_int(l.value, l.number);
    else if (l.key == "side_length") side = to_double(l.value, l.number);
    else fail(l.number, "unknown key 'grid." + l.key + "'");
  }
  if (n_cells < 0 || side < 0) throw ConfigError("[grid] needs n_cells and side_length");
  try {
    spec.grid = Grid(n_cells, side);
  } catch (const SpecError& e) {
    throw ConfigError(e.what());
  }

  for (const auto& l : singles["physics"]) {
    once("physics", l);
    if (l.key == "conductivity") spec.conductivity = to_double(l.value, l.number);
    else fail(l.number, "unknown key 'physics." + l.key + "'");
  }

  std::set<std::string> edges_seen;
  for (const auto& l : singles["boundary"]) {
    once("boundary", l);
    if (l.key == "sink_length") {
      spec.boundary.sink_length = to_double(l.value, l.number);
    } else if (l.key == "bottom" || l.key == "right" || l.key == "top" || l.key == "left") {
      spec.boundary.edge(edge_from_string(l.key)) = parse_edge(l.value, l.number);
      edges_seen.insert(l.key);
    } else {
      fail(l.number, "unknown key 'boundary." + l.key + "'");
    }
  }
  if (edges_seen.size() != 4) throw ConfigError("[boundary] needs bottom, right, top and left");

  for (const auto& sec : source_sections) {
    HeatSource src;
    std::set<std::string> keys;
    for (const auto& l : sec) {
      if (!keys.insert(l.key).second) fail(l.number, "duplicate key '" + l.key + "'");
      if (l.key == "name") {
        src.name = l.value;
      } else if (l.key == "shape") {
        try {
          src.shape = shape_from_string(l.value);
        } catch (const SpecError& e) {
          fail(l.number, e.what());
        }
      } else if (l.key == "center" || l.key == "extent") {
        const auto w = words(l.value);
        if (w.size() != 2) fail(l.number, l.key + " needs two numbers");
        const double a = to_double(w[0], l.number), b = to_double(w[1], l.number);
        if (l.key == "center") src.center = {a, b};
        else src.length = a, src.width = b;
      } else if (l.key == "intensity") {
        src.intensity = to_double(l.value, l.number);
      } else {
        fail(l.number, "unknown key 'source." + l.key + "'");
      }
    }
    for (const char* req : {"shape", "center", "extent"})
      if (!keys.count(req)) throw ConfigError(std::string("[source] missing '") + req + "'");
    spec.sources.push_back(src);
  }

  for (const auto& l : singles["sensors"]) {
    once("sensors", l);
    if (l.key == "fill_value") spec.sensors.fill_value = to_double(l.value, l.number);
    else fail(l.number, "unknown key 'sensors." + l.key + "'");
  }
  for (const auto& l : sensor_lines) {
    for (const auto& pair : split(l.value, ',')) {
      if (pair.empty()) continue;
      const auto w = words(pair);
      if (w.size() != 2) fail(l.number, "sensor cell needs 'row col'");
      spec.sensors.positions.push_back({to_int(w[0], l.number), to_int(w[1], l.number)});
    }
  }

  try {
    spec.validate();
  } catch (const SpecError& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

SystemSpec load_system_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system_spec(ss.str());
}

std::string format_system_spec(const SystemSpec& spec) {
  std::ostringstream out;
  out << "[grid]\n";
  out << "n_cells = " << spec.grid.n_cells() << "\n";
  out << "side_length = " << format_double(spec.grid.side_length()) << "\n\n";
  out << "[physics]\n";
  out << "conductivity = " << format_double(spec.conductivity) << "\n\n";
  out << "[boundary]\n";
  out << "sink_length = " << format_double(spec.boundary.sink_length) << "\n";
  for (Edge e : {Edge::bottom, Edge::right, Edge::top, Edge::left}) {
    out << to_string(e) << " =";
    bool first = true;
    for (const auto& s : spec.boundary.edge(e)) {
      out << (first ? " " : " | ") << to_string(s.kind) << ' ' << format_double(s.start) << ' '
          << format_double(s.end);
      if (s.kind != BoundaryKind::neumann) out << ' ' << format_double(s.temperature);
      if (s.kind == BoundaryKind::robin) out << ' ' << format_double(s.heat_transfer);
      first = false;
    }
    out << "\n";
  }
  for (const auto& s : spec.sources) {
    out << "\n[source]\n";
    if (!s.name.empty()) out << "name = " << s.name << "\n";
    out << "shape = " << to_string(s.shape) << "\n";
    out << "center = " << format_double(s.center.x) << ' ' << format_double(s.center.y) << "\n";
    out << "extent = " << format_double(s.length) << ' ' << format_double(s.width) << "\n";
    out << "intensity = " << format_double(s.intensity) << "\n";
  }
  out << "\n[sensors]\n";
  out << "fill_value = " << format_double(spec.sensors.fill_value) << "\n";
  const auto& pos = spec.sensors.positions;
  for (std::size_t i = 0; i < pos.size(); i += 8) {
    out << "cells =";
    for (std::size_t k = i; k < std::min(pos.size(), i + 8); ++k)
      out << (k == i ? " " : ", ") << pos[k].row << ' ' << pos[k].col;
    out << "\n";
  }
  return out.str();
}

void save_system_spec(const SystemSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config '" + path + "'");
  out << format_system_spec(spec);
}

std::uint64_t spec_hash(const SystemSpec& spec) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : format_system_spec(spec)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace tfrhss
