#include "trajirl/io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "trajirl/error.hpp"

namespace trajirl::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<long> to_long(const std::string& s) {
  if (s.empty()) return std::nullopt;
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double parse_number(const std::string& s, std::size_t line, const std::string& what) {
  const auto v = to_double(s);
  if (!v || !std::isfinite(*v)) throw ParseError(what + " is not a finite number: '" + s + "'", line);
  return *v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string format_number(double value) { return fmt::format("{}", value); }

std::vector<Trajectory> parse_trajectories(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("missing header", 1);
  const auto header = split_csv(lines[0]);
  if (header.size() < 4 || header[0] != "traj_id" || header[1] != "t" || header[2] != "x" ||
      header[3] != "y") {
    throw ParseError("header must start with traj_id,t,x,y", 1);
  }

  std::vector<Trajectory> out;
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    const auto cols = split_csv(lines[i]);
    if (cols.size() < 4) throw ParseError("expected 4 columns", line_no);
    const std::string& id = cols[0];
    if (id.empty()) throw ParseError("empty traj_id", line_no);
    const auto t = to_long(cols[1]);
    if (!t) throw ParseError("t is not an integer: '" + cols[1] + "'", line_no);

    TrackPoint point{*t, std::nullopt};
    if (!cols[2].empty() || !cols[3].empty()) {
      point.pos = Point2{parse_number(cols[2], line_no, "x"), parse_number(cols[3], line_no, "y")};
    }

    if (out.empty() || out.back().id != id) {
      if (seen.count(id)) throw ParseError("rows of trajectory " + id + " are not contiguous", line_no);
      seen[id] = out.size();
      out.push_back({id, {}});
    }
    auto& pts = out.back().points;
    if (!pts.empty() && point.t < pts.back().t) {
      throw ParseError("t decreases within trajectory " + id, line_no);
    }
    pts.push_back(point);
  }
  return out;
}

std::vector<Trajectory> read_trajectories(const fs::path& path) {
  return parse_trajectories(read_text(path));
}

std::string format_trajectories(std::span<const Trajectory> trajectories) {
  std::string out = "traj_id,t,x,y\n";
  for (const auto& tr : trajectories) {
    for (const auto& p : tr.points) {
      if (p.pos) {
        out += fmt::format("{},{},{},{}\n", tr.id, p.t, format_number(p.pos->x),
                           format_number(p.pos->y));
      } else {
        out += fmt::format("{},{},,\n", tr.id, p.t);
      }
    }
  }
  return out;
}

void write_trajectories(const fs::path& path, std::span<const Trajectory> trajectories) {
  write_text(path, format_trajectories(trajectories));
}

KeyValues KeyValues::parse(const std::string& text) {
  KeyValues kv;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", i + 1);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ParseError("empty key", i + 1);
    kv.values_[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::read(const fs::path& path) { return parse(read_text(path)); }

void KeyValues::merge(const KeyValues& overrides) {
  for (const auto& [k, v] : overrides.values_) values_[k] = v;
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValues::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KeyValues::number(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const auto d = to_double(*v);
  if (!d) throw InvalidConfig("config key " + key + " is not a number: '" + *v + "'");
  return *d;
}

long KeyValues::integer(const std::string& key, long fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const auto d = to_long(*v);
  if (!d) throw InvalidConfig("config key " + key + " is not an integer: '" + *v + "'");
  return *d;
}

bool KeyValues::flag(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "on" || *v == "yes") return true;
  if (*v == "0" || *v == "false" || *v == "off" || *v == "no") return false;
  throw InvalidConfig("config key " + key + " is not a boolean: '" + *v + "'");
}

std::vector<double> KeyValues::numbers(const std::string& key) const {
  std::vector<double> out;
  const auto v = get(key);
  if (!v) return out;
  for (const auto& part : split_csv(*v)) {
    const auto d = to_double(part);
    if (!d) throw InvalidConfig("config key " + key + " has a non-numeric entry '" + part + "'");
    out.push_back(*d);
  }
  return out;
}

std::string KeyValues::format() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

GridSpec grid_from_config(const KeyValues& kv) {
  if (!kv.has("width") || !kv.has("height")) throw InvalidConfig("config needs width and height");
  const double cell = kv.number("cell_size", 1.0);
  std::optional<int> horizon;
  if (kv.has("horizon")) horizon = static_cast<int>(kv.integer("horizon", 1));
  try {
    return GridSpec({kv.number("origin_x", 0.0), kv.number("origin_y", 0.0)},
                    {kv.number("cell_size_x", cell), kv.number("cell_size_y", cell)},
                    static_cast<int>(kv.integer("width", 0)),
                    static_cast<int>(kv.integer("height", 0)), horizon);
  } catch (const InvalidArgument& e) {
    throw InvalidConfig(e.what());
  }
}

void grid_to_config(const GridSpec& spec, KeyValues& kv) {
  kv.set("origin_x", format_number(spec.origin().x));
  kv.set("origin_y", format_number(spec.origin().y));
  if (spec.cell_size().x == spec.cell_size().y) {
    kv.set("cell_size", format_number(spec.cell_size().x));
  } else {
    kv.set("cell_size_x", format_number(spec.cell_size().x));
    kv.set("cell_size_y", format_number(spec.cell_size().y));
  }
  kv.set("width", std::to_string(spec.width()));
  kv.set("height", std::to_string(spec.height()));
  if (spec.horizon()) kv.set("horizon", std::to_string(*spec.horizon()));
}

RasterChannels read_feature_csv(const fs::path& path, const GridSpec& spec) {
  const auto lines = lines_of(read_text(path));
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw ParseError("empty feature file", 1);
  const auto head = split_csv(lines[first]);

  RasterChannels out;
  if (head.size() >= 3 && head[0] == "x" && head[1] == "y") {
    // flat form
    for (std::size_t k = 2; k < head.size(); ++k) out.names.push_back(head[k]);
    const std::size_t nf = out.names.size();
    out.channels.assign(nf, std::vector<double>(spec.cells(), 0.0));
    std::vector<std::uint8_t> filled(spec.cells(), 0);
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
      if (trim(lines[i]).empty()) continue;
      const auto cols = split_csv(lines[i]);
      if (cols.size() != nf + 2) throw ParseError("expected " + std::to_string(nf + 2) + " columns", i + 1);
      const auto x = to_long(cols[0]);
      const auto y = to_long(cols[1]);
      if (!x || !y) throw ParseError("cell coordinates must be integers", i + 1);
      if (!spec.contains_cell(static_cast<int>(*x), static_cast<int>(*y))) {
        throw ParseError("cell outside grid", i + 1);
      }
      const std::size_t c = spec.cell_index(static_cast<int>(*x), static_cast<int>(*y));
      for (std::size_t k = 0; k < nf; ++k) {
        out.channels[k][c] = parse_number(cols[k + 2], i + 1, out.names[k]);
      }
      filled[c] = 1;
    }
    for (std::size_t c = 0; c < filled.size(); ++c) {
      if (!filled[c]) throw ParseError("feature file does not cover every cell", lines.size());
    }
    return out;
  }

  // matrix form: height rows of width values
  std::vector<double> channel(spec.cells(), 0.0);
  int row = 0;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto cols = split_csv(lines[i]);
    if (static_cast<int>(cols.size()) != spec.width()) {
      throw ParseError("expected " + std::to_string(spec.width()) + " values per row", i + 1);
    }
    if (row >= spec.height()) throw ParseError("more rows than the grid height", i + 1);
    for (int x = 0; x < spec.width(); ++x) {
      channel[spec.cell_index(x, row)] = parse_number(cols[static_cast<std::size_t>(x)], i + 1, "value");
    }
    ++row;
  }
  if (row != spec.height()) throw ParseError("expected " + std::to_string(spec.height()) + " rows", lines.size());
  out.names.push_back(path.stem().string());
  out.channels.push_back(std::move(channel));
  return out;
}

void write_feature_csv(const fs::path& path, const GridSpec& spec, const RasterChannels& raster) {
  std::string out = "x,y";
  for (const auto& n : raster.names) out += "," + n;
  out += "\n";
  for (int y = 0; y < spec.height(); ++y) {
    for (int x = 0; x < spec.width(); ++x) {
      out += fmt::format("{},{}", x, y);
      for (const auto& ch : raster.channels) out += "," + format_number(ch[spec.cell_index(x, y)]);
      out += "\n";
    }
  }
  write_text(path, out);
}

FeatureMap features_from_config(const KeyValues& kv, const GridSpec& spec,
                                const fs::path& base_dir) {
  std::vector<std::vector<double>> channels;
  std::vector<std::string> names;
  if (kv.flag("feature_constant", true)) {
    channels.push_back(constant_channel(spec));
    names.emplace_back("constant");
  }
  if (kv.flag("feature_distance", true)) {
    const State anchor{static_cast<int>(kv.integer("feature_anchor_x", spec.width() / 2)),
                       static_cast<int>(kv.integer("feature_anchor_y", spec.height() / 2)), 0};
    if (!spec.contains_cell(anchor.x, anchor.y)) throw InvalidConfig("feature anchor outside grid");
    channels.push_back(distance_channel(spec, anchor));
    names.emplace_back("distance");
  }
  if (const auto file = kv.get("feature_file"); file && !file->empty()) {
    fs::path p(*file);
    if (p.is_relative()) p = base_dir / p;
    auto raster = read_feature_csv(p, spec);
    for (std::size_t k = 0; k < raster.channels.size(); ++k) {
      channels.push_back(std::move(raster.channels[k]));
      names.push_back(raster.names[k]);
    }
  }
  if (channels.empty()) throw InvalidConfig("no feature channels configured");
  return FeatureMap(spec.width(), spec.height(), channels, names);
}

void write_grid_csv(const fs::path& path, const GridSpec& spec, std::span<const double> values) {
  if (values.size() != spec.cells()) throw DimensionMismatch("grid export size mismatch");
  std::string out;
  for (int y = 0; y < spec.height(); ++y) {
    for (int x = 0; x < spec.width(); ++x) {
      if (x > 0) out += ",";
      out += format_number(values[spec.cell_index(x, y)]);
    }
    out += "\n";
  }
  write_text(path, out);
}

}  // namespace trajirl::io
