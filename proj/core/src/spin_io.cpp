#include "gibbslab/spin_io.hpp"

#include <fstream>
#include <sstream>

namespace gibbslab {

namespace {

std::string extent_tag(const std::vector<int>& extent) {
  std::string s;
  for (std::size_t i = 0; i < extent.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(extent[i]);
  }
  return s;
}

std::vector<int> parse_extent(const std::string& tag) {
  std::vector<int> extent;
  std::string cur;
  for (char c : tag + "x") {
    if (c == 'x') {
      extent.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return extent;
}

std::string expect_field(std::istringstream& is, const std::string& key) {
  std::string tok;
  if (!(is >> tok) || tok.rfind(key + "=", 0) != 0)
    throw std::runtime_error("malformed header: missing " + key);
  return tok.substr(key.size() + 1);
}

}  // namespace

void write_spin_window(std::ostream& os, const SpinConfig& cfg) {
  os << "ising-spin v1 d=" << cfg.dim() << " extent=" << extent_tag(cfg.extent())
     << " boundary=" << to_string(cfg.boundary()) << "\n";
  if (cfg.boundary() == BoundaryKind::Explicit) {
    os << "ring=";
    for (auto s : cfg.explicit_ring()) os << (s > 0 ? '+' : '-');
    os << "\n";
  }
  for (int z = 0; z < cfg.depth(); ++z)
    for (int y = 0; y < cfg.height(); ++y) {
      for (int x = 0; x < cfg.width(); ++x)
        os << (cfg.spin(x, y, z) > 0 ? '+' : '-');
      os << "\n";
    }
}

SpinConfig read_spin_window(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("empty spin file");
  std::istringstream hs(header);
  std::string magic, version;
  hs >> magic >> version;
  if (magic != "ising-spin" || version != "v1")
    throw std::runtime_error("not an ising-spin v1 file");
  int d = std::stoi(expect_field(hs, "d"));
  std::vector<int> extent = parse_extent(expect_field(hs, "extent"));
  if (static_cast<int>(extent.size()) != d)
    throw std::runtime_error("extent rank disagrees with d");
  BoundaryKind boundary = boundary_from_string(expect_field(hs, "boundary"));

  std::vector<std::int8_t> ring;
  if (boundary == BoundaryKind::Explicit) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("ring=", 0) != 0)
      throw std::runtime_error("explicit boundary needs a ring line");
    for (char c : line.substr(5)) ring.push_back(c == '+' ? +1 : -1);
  }

  std::vector<std::int8_t> field;
  int rows = 1;
  for (std::size_t i = 1; i < extent.size(); ++i) rows *= extent[i];
  for (int r = 0; r < rows; ++r) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("truncated spin rows");
    if (static_cast<int>(line.size()) != extent[0])
      throw std::runtime_error("row width disagrees with extent");
    for (char c : line) {
      if (c != '+' && c != '-') throw std::runtime_error("bad spin char");
      field.push_back(c == '+' ? +1 : -1);
    }
  }
  return SpinConfig::from_field(extent, field, boundary, std::move(ring));
}

void write_pattern(std::ostream& os, const Pattern& pattern) {
  if (pattern.dim() != 2)
    throw std::invalid_argument("pattern files are d=2");
  const Site o = pattern.origin(), b = pattern.bbox();
  const char* support = pattern.kind() == SupportKind::Cube     ? "cube"
                        : pattern.kind() == SupportKind::Nested ? "nested"
                                                                : "mask";
  os << "ising-pattern v1 d=2 extent=" << b[0] << "x" << b[1]
     << " support=" << support << " origin=" << o[0] << "," << o[1] << "\n";
  std::vector<std::string> rows(b[1], std::string(b[0], '.'));
  for (std::size_t i = 0; i < pattern.support().size(); ++i) {
    const Site& s = pattern.support()[i];
    rows[s[1] - o[1]][s[0] - o[0]] = pattern.values()[i] > 0 ? '+' : '-';
  }
  for (const auto& row : rows) os << row << "\n";
}

Pattern read_pattern(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("empty pattern file");
  std::istringstream hs(header);
  std::string magic, version;
  hs >> magic >> version;
  if (magic != "ising-pattern" || version != "v1")
    throw std::runtime_error("not an ising-pattern v1 file");
  (void)expect_field(hs, "d");
  std::vector<int> extent = parse_extent(expect_field(hs, "extent"));
  std::string support = expect_field(hs, "support");
  std::string origin = expect_field(hs, "origin");
  auto comma = origin.find(',');
  Site o{std::stoi(origin.substr(0, comma)), std::stoi(origin.substr(comma + 1)), 0};

  std::vector<Site> sites;
  std::vector<std::int8_t> values;
  for (int y = 0; y < extent[1]; ++y) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("truncated pattern");
    for (int x = 0; x < extent[0]; ++x) {
      char c = line.at(x);
      if (c == '.') continue;
      sites.push_back(Site{x + o[0], y + o[1], 0});
      values.push_back(c == '+' ? +1 : -1);
    }
  }
  SupportKind kind = support == "cube"     ? SupportKind::Cube
                     : support == "nested" ? SupportKind::Nested
                                           : SupportKind::Mask;
  return Pattern(std::move(sites), std::move(values), kind);
}

void save_spin_window(const std::string& path, const SpinConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_spin_window(os, cfg);
}

SpinConfig load_spin_window(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_spin_window(is);
}

void save_pattern(const std::string& path, const Pattern& pattern) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_pattern(os, pattern);
}

Pattern load_pattern(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_pattern(is);
}

}  // namespace gibbslab
