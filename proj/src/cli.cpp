#include "thinslab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace thinslab::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// config text

std::string ConfigEntry::location() const {
  if (line == 0) return source;
  return source + ":" + std::to_string(line) + ":" + std::to_string(column);
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConfigMap ConfigMap::parse(std::string_view text, const std::string& source) {
  ConfigMap m;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    // strip comments: '#' or ';' at line start or after whitespace
    for (std::size_t i = 0; i < line.size(); ++i) {
      if ((line[i] == '#' || line[i] == ';') &&
          (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        line = line.substr(0, i);
        break;
      }
    }
    std::size_t first = 0;
    while (first < line.size() && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
    if (first == line.size()) {
      if (eol == text.size()) break;
      continue;
    }
    const std::string where_line = source + ":" + std::to_string(line_no) + ":";
    if (line[first] == '[') {
      const std::size_t close = line.find(']', first);
      if (close == std::string_view::npos) {
        throw ConfigError(where_line + std::to_string(first + 1), "unterminated section header");
      }
      const std::string rest = trim(line.substr(close + 1));
      if (!rest.empty()) {
        throw ConfigError(where_line + std::to_string(close + 2), "unexpected text after section header");
      }
      section = lower(trim(line.substr(first + 1, close - first - 1)));
      if (!valid_name(section)) {
        throw ConfigError(where_line + std::to_string(first + 2), "invalid section name");
      }
      if (eol == text.size()) break;
      continue;
    }
    const std::size_t eq = line.find('=', first);
    if (eq == std::string_view::npos) {
      throw ConfigError(where_line + std::to_string(first + 1), "expected 'key = value'");
    }
    const std::string key = lower(trim(line.substr(first, eq - first)));
    if (!valid_name(key)) {
      throw ConfigError(where_line + std::to_string(first + 1), "invalid key name");
    }
    if (section.empty()) {
      throw ConfigError(where_line + std::to_string(first + 1), "key '" + key + "' outside of a [section]");
    }
    std::size_t vcol = eq + 1;
    while (vcol < line.size() && std::isspace(static_cast<unsigned char>(line[vcol]))) ++vcol;
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) {
      throw ConfigError(where_line + std::to_string(eq + 2), "missing value for '" + key + "'");
    }
    const std::string full = section + "." + key;
    if (const ConfigEntry* prev = m.find(full)) {
      throw ConfigError(where_line + std::to_string(first + 1),
                        "duplicate key '" + full + "' (first set at " + prev->location() + ")");
    }
    m.entries_[full] = {value, source, line_no, static_cast<int>(vcol + 1)};
    if (eol == text.size()) break;
  }
  return m;
}

ConfigMap ConfigMap::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void ConfigMap::apply_env(const char* const* envp, std::string_view prefix) {
  if (!envp) return;
  for (const char* const* e = envp; *e; ++e) {
    std::string_view kv(*e);
    if (kv.substr(0, prefix.size()) != prefix) continue;
    const std::size_t eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    const std::string name(kv.substr(0, eq));
    const std::string rest = lower(std::string(kv.substr(prefix.size(), eq - prefix.size())));
    const std::size_t sep = rest.find("__");
    if (sep == std::string::npos || !valid_name(rest.substr(0, sep)) || !valid_name(rest.substr(sep + 2))) {
      throw ConfigError(name, std::string("expected ") + std::string(prefix) + "SECTION__KEY");
    }
    set(rest.substr(0, sep) + "." + rest.substr(sep + 2), std::string(kv.substr(eq + 1)), name);
  }
}

void ConfigMap::apply_assignment(const std::string& text, const std::string& source) {
  const std::size_t eq = text.find('=');
  const std::size_t dot = text.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError(source, "expected section.key=value, got '" + text + "'");
  }
  const std::string sec = lower(trim(text.substr(0, dot)));
  const std::string key = lower(trim(text.substr(dot + 1, eq - dot - 1)));
  if (!valid_name(sec) || !valid_name(key)) throw ConfigError(source, "invalid key in '" + text + "'");
  set(sec + "." + key, trim(text.substr(eq + 1)), source);
}

void ConfigMap::set(const std::string& key, const std::string& value, const std::string& source) {
  entries_[key] = {value, source, 0, 0};
}

const ConfigEntry* ConfigMap::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::minimize: return "minimize";
    case Experiment::sweep: return "sweep";
    case Experiment::renormalized: return "renormalized";
    case Experiment::core: return "core";
    case Experiment::analyze: return "analyze";
  }
  return "?";
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScalingParams RunConfig::params() const { return params_for(eps); }

ScalingParams RunConfig::params_for(double eps_value) const {
  if (eta) return ScalingParams(eps_value, *eta);
  return ScalingParams(eps_value, k * eps_value).with_slope(k);
}

namespace {

class Reader {
 public:
  explicit Reader(const ConfigMap& m) : m_(m) {}

  const ConfigEntry* get(const std::string& key) {
    used_.insert(key);
    return m_.find(key);
  }

  std::string str(const std::string& key, const std::string& def) {
    const ConfigEntry* e = get(key);
    return e ? e->value : def;
  }

  double real(const std::string& key, double def) {
    const ConfigEntry* e = get(key);
    return e ? parse_real(*e, e->value) : def;
  }

  long long integer(const std::string& key, long long def) {
    const ConfigEntry* e = get(key);
    if (!e) return def;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(e->value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != e->value.size()) fail(*e, "expected an integer, got '" + e->value + "'");
    return v;
  }

  bool boolean(const std::string& key, bool def) {
    const ConfigEntry* e = get(key);
    if (!e) return def;
    const std::string v = lower(e->value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail(*e, "expected true or false, got '" + e->value + "'");
    return def;
  }

  std::vector<double> reals(const std::string& key, std::vector<double> def) {
    const ConfigEntry* e = get(key);
    if (!e) return def;
    std::vector<double> out;
    std::string item;
    std::stringstream ss(e->value);
    while (std::getline(ss, item, ',')) out.push_back(parse_real(*e, trim(item)));
    if (out.empty()) fail(*e, "empty list");
    return out;
  }

  [[noreturn]] void fail(const ConfigEntry& e, const std::string& what) const {
    throw ConfigError(e.location(), what);
  }

  void require(const std::string& key, bool ok, const std::string& what) {
    if (ok) return;
    const ConfigEntry* e = m_.find(key);
    throw ConfigError(e ? e->location() : key, what);
  }

  void reject_unknown() const {
    for (const auto& [key, e] : m_.entries()) {
      if (!used_.count(key)) throw ConfigError(e.location(), "unknown key '" + key + "'");
    }
  }

 private:
  double parse_real(const ConfigEntry& e, const std::string& s) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) fail(e, "expected a number, got '" + s + "'");
    return v;
  }

  const ConfigMap& m_;
  std::set<std::string> used_;
};

std::string canonical_string(const RunConfig& c) {
  std::ostringstream s;
  auto list = [](const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
    return out;
  };
  s << "experiment=" << to_string(c.experiment) << "\n"
    << "seed=" << c.seed << "\n"
    << "domain=" << to_string(c.shape.kind) << "," << fmt(c.shape.a) << "," << fmt(c.shape.b) << "\n"
    << "grid=" << c.nx << "," << c.ny << "," << c.layers << "\n"
    << "boundary=" << c.boundary_kind << "," << c.degree << "," << fmt(c.phase) << "\n"
    << "eps=" << fmt(c.eps) << "\nk=" << fmt(c.k) << "\neta=" << (c.eta ? fmt(*c.eta) : "k*eps") << "\n"
    << "eps_list=" << list(c.eps_list) << "\n"
    << "solve=" << c.solve.max_iters << "," << fmt(c.solve.tol_residual) << "," << fmt(c.solve.step_init)
    << "," << fmt(c.solve.step_shrink) << "," << c.solve.precondition << "," << fmt(c.solve.init_noise) << "\n"
    << "defects=" << fmt(c.defects.core_threshold) << "," << c.defects.min_cluster_diameter << "\n"
    << "sweep=" << c.sweep_warm_start << "," << c.sweep_compare << "\n"
    << "pattern=" << c.pattern.n_seeds << "," << fmt(c.pattern.initial_step) << "," << fmt(c.pattern.min_step)
    << "," << c.pattern.max_evaluations << "," << c.landscape_scan << "\n"
    << "core=" << fmt(c.core_eps) << "," << list(c.core_sigma_over_eps) << ","
    << fmt(c.core_resolution.cells_per_eps) << "," << c.core_resolution.n_layers << "\n"
    << "analyze=" << c.analyze_input << "," << (c.c_star ? fmt(*c.c_star) : "none") << "\n";
  return s.str();
}

}  // namespace

RunConfig resolve(const ConfigMap& map, Experiment experiment) {
  Reader r(map);
  RunConfig c;
  c.experiment = experiment;
  if (const ConfigEntry* e = r.get("run.experiment")) {
    if (lower(e->value) != to_string(experiment)) {
      r.fail(*e, "config is for experiment '" + e->value + "' but '" + to_string(experiment) + "' was requested");
    }
  }
  c.out_dir = r.str("run.out", c.out_dir);
  const long long seed = r.integer("run.seed", 1);
  r.require("run.seed", seed >= 0, "seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.threads = static_cast<int>(r.integer("run.threads", 1));
  r.require("run.threads", c.threads >= 1, "threads must be >= 1");

  const std::string kind = lower(r.str("domain.kind", "disk"));
  if (kind == "disk") {
    const double radius = r.real("domain.radius", 1.0);
    r.require("domain.radius", radius > 0.0, "radius must be positive");
    c.shape = DomainShape::disk(radius);
  } else if (kind == "rectangle") {
    const double w = r.real("domain.width", 2.0);
    const double h = r.real("domain.height", 2.0);
    r.require("domain.width", w > 0.0, "width must be positive");
    r.require("domain.height", h > 0.0, "height must be positive");
    c.shape = DomainShape::rectangle(w, h);
  } else if (kind == "annulus") {
    const double ri = r.real("domain.r_in", 0.25);
    const double ro = r.real("domain.r_out", 1.0);
    r.require("domain.r_in", ri > 0.0 && ri < ro, "need 0 < r_in < r_out");
    c.shape = DomainShape::annulus(ri, ro);
  } else {
    r.fail(*r.get("domain.kind"), "unknown domain kind '" + kind + "' (disk, rectangle, annulus)");
  }
  c.nx = static_cast<int>(r.integer("domain.nx", 128));
  r.require("domain.nx", c.nx >= 16, "nx must be >= 16");
  int ny_default = c.nx;
  if (c.shape.kind == DomainKind::rectangle) {
    ny_default = std::max(16, static_cast<int>(std::lround(c.nx * c.shape.b / c.shape.a)));
  }
  c.ny = static_cast<int>(r.integer("domain.ny", ny_default));
  r.require("domain.ny", c.ny >= 16, "ny must be >= 16");
  c.layers = static_cast<int>(r.integer("domain.layers", 8));
  r.require("domain.layers", c.layers >= 2, "layers must be >= 2");

  c.boundary_kind = lower(r.str("boundary.kind", "power"));
  r.require("boundary.kind", c.boundary_kind == "power" || c.boundary_kind == "constant",
            "boundary kind must be 'power' or 'constant'");
  c.degree = static_cast<int>(r.integer("boundary.degree", c.boundary_kind == "power" ? 1 : 0));
  r.require("boundary.degree", c.boundary_kind == "power" || c.degree == 0,
            "a constant datum has degree 0");
  c.phase = r.real("boundary.phase", 0.0);

  c.eps = r.real("params.eps", c.eps);
  r.require("params.eps", c.eps > 0.0, "eps must be positive");
  c.k = r.real("params.k", c.k);
  r.require("params.k", c.k > 0.0, "k must be positive");
  if (r.get("params.eta")) {
    c.eta = r.real("params.eta", 0.0);
    r.require("params.eta", *c.eta > 0.0, "eta must be positive");
    r.require("params.k", !map.find("params.k"), "set either params.k or params.eta, not both");
    c.k = *c.eta / c.eps;
  }
  c.eps_list = r.reals("params.eps_list", c.eps_list);
  for (double e : c.eps_list) r.require("params.eps_list", e > 0.0, "eps values must be positive");

  SolveOptions& s = c.solve;
  s.max_iters = static_cast<int>(r.integer("solve.max_iters", s.max_iters));
  s.tol_residual = r.real("solve.tol", s.tol_residual);
  s.step_init = r.real("solve.step_init", s.step_init);
  s.step_shrink = r.real("solve.step_shrink", s.step_shrink);
  s.precondition = r.boolean("solve.precondition", s.precondition);
  s.init_noise = r.real("solve.init_noise", s.init_noise);
  s.progress_every = static_cast<int>(r.integer("solve.progress_every", 0));
  s.seed = c.seed;
  try {
    s.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError("[solve]", e.what());
  }

  c.defects.core_threshold = r.real("defects.core_threshold", c.defects.core_threshold);
  r.require("defects.core_threshold", c.defects.core_threshold > 0.0 && c.defects.core_threshold < 1.0,
            "core_threshold must lie in (0, 1)");
  c.defects.min_cluster_diameter = static_cast<int>(r.integer("defects.min_cluster", 3));

  c.sweep_warm_start = r.boolean("sweep.warm_start", true);
  c.sweep_compare = r.boolean("sweep.compare", true);

  c.pattern.n_seeds = static_cast<int>(r.integer("renormalized.n_seeds", c.pattern.n_seeds));
  r.require("renormalized.n_seeds", c.pattern.n_seeds >= 1, "n_seeds must be >= 1");
  c.pattern.initial_step = r.real("renormalized.initial_step", c.pattern.initial_step);
  c.pattern.min_step = r.real("renormalized.min_step", 0.0);
  c.pattern.max_evaluations = static_cast<int>(r.integer("renormalized.max_evaluations", 4000));
  c.pattern.seed = c.seed;
  c.pattern.threads = c.threads;
  c.landscape_scan = static_cast<int>(r.integer("renormalized.scan", 0));
  r.require("renormalized.scan", c.landscape_scan >= 0, "scan must be >= 0");

  c.core_eps = r.real("core.eps", c.core_eps);
  r.require("core.eps", c.core_eps > 0.0, "eps must be positive");
  c.core_sigma_over_eps = r.reals("core.sigma_over_eps", c.core_sigma_over_eps);
  c.core_resolution.cells_per_eps = r.real("core.cells_per_eps", 4.0);
  r.require("core.cells_per_eps", c.core_resolution.cells_per_eps >= 4.0, "cells_per_eps must be >= 4");
  c.core_resolution.n_layers = static_cast<int>(r.integer("core.layers", c.layers));

  c.analyze_input = r.str("analyze.input", "");
  if (r.get("analyze.c_star")) {
    c.c_star = r.real("analyze.c_star", 0.0);
    r.require("analyze.c_star", *c.c_star >= 0.0 && *c.c_star < 1.0, "c_star must lie in [0, 1)");
  }

  r.reject_unknown();
  c.canonical = canonical_string(c);
  c.hash = fnv1a_hex(c.canonical);
  return c;
}

// ---------------------------------------------------------------------------
// field dump

namespace {

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char b[8];
  std::memcpy(b, &bits, 8);
  out.append(b, 8);
}

double get_f64(const char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_field_dump(const std::string& path, const DirectorField& U, const ScalingParams& p,
                      const std::string& config_hash, const std::string& datum_note) {
  const Domain2D& d = U.domain();
  std::ostringstream h;
  h << "thinslab-field\n"
    << "schema " << kSchemaVersion << "\n"
    << "domain " << to_string(d.kind()) << " " << fmt(d.shape().a) << " " << fmt(d.shape().b) << "\n"
    << "nx " << d.nx() << "\nny " << d.ny() << "\nlayers " << U.grid.n_layers() << "\n"
    << "hx " << fmt(d.hx()) << "\nhy " << fmt(d.hy()) << "\nhz " << fmt(U.grid.hz()) << "\n"
    << "eps " << fmt(p.eps()) << "\neta " << fmt(p.eta()) << "\n"
    << "config_hash " << config_hash << "\n";
  if (!datum_note.empty()) h << "datum " << datum_note << "\n";
  h << "nodes " << U.values.size() << "\n"
    << "payload_bytes " << U.values.size() * 24 << "\n"
    << "end\n";
  std::string out = h.str();
  out.reserve(out.size() + U.values.size() * 24);
  for (const Vec3& v : U.values) {
    put_f64(out, v.x);
    put_f64(out, v.y);
    put_f64(out, v.z);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

FieldDump read_field_dump(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DumpError("cannot open " + path, 0);
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string data = ss.str();
  const std::string magic = "thinslab-field\n";
  if (data.compare(0, magic.size(), magic) != 0) throw DumpError("not a field dump: bad magic line", 0);
  const std::size_t end = data.find("\nend\n");
  if (end == std::string::npos) throw DumpError("header is not terminated by 'end'", data.size());
  const std::size_t header_len = end + 5;

  std::map<std::string, std::string> header;
  std::map<std::string, std::size_t> offset;
  std::size_t pos = magic.size();
  while (pos < end + 1) {
    const std::size_t eol = data.find('\n', pos);
    const std::string line = data.substr(pos, eol - pos);
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos) throw DumpError("malformed header line '" + line + "'", pos);
    header[line.substr(0, sp)] = line.substr(sp + 1);
    offset[line.substr(0, sp)] = pos;
    pos = eol + 1;
  }
  auto need = [&](const std::string& key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw DumpError("header lacks '" + key + "'", header_len);
    return it->second;
  };
  auto num = [&](const std::string& key) {
    const std::string& v = need(key);
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw DumpError("bad number in header field '" + key + "'", offset[key]);
  };
  if (need("schema") != std::to_string(kSchemaVersion)) {
    throw DumpError("unsupported schema " + need("schema"), offset["schema"]);
  }
  std::istringstream dom(need("domain"));
  std::string kind;
  double a = 0.0, b = 0.0;
  if (!(dom >> kind >> a >> b)) throw DumpError("bad domain line", offset["domain"]);
  DomainShape shape;
  try {
    shape = {domain_kind_from_string(kind), a, b};
  } catch (const Error&) {
    throw DumpError("unknown domain kind '" + kind + "'", offset["domain"]);
  }
  const int nx = static_cast<int>(num("nx")), ny = static_cast<int>(num("ny"));
  const int layers = static_cast<int>(num("layers"));
  const double nodes = num("nodes");
  const double expected_bytes = num("payload_bytes");
  DomainPtr domain;
  try {
    domain = make_domain(shape, nx, ny);
  } catch (const Error& e) {
    throw DumpError(std::string("inconsistent grid: ") + e.what(), offset["nx"]);
  }
  Grid3D grid(domain, layers);
  if (nodes != grid.node_count() || expected_bytes != 24.0 * nodes) {
    throw DumpError("node count does not match the grid dimensions", offset["nodes"]);
  }
  if (std::abs(num("hx") - domain->hx()) > 1e-12 * domain->hx() ||
      std::abs(num("hy") - domain->hy()) > 1e-12 * domain->hy()) {
    throw DumpError("grid spacing does not match the domain", offset["hx"]);
  }
  const std::size_t want = static_cast<std::size_t>(expected_bytes);
  const std::size_t have = data.size() - header_len;
  if (have < want) {
    throw DumpError("truncated payload: expected " + std::to_string(want) + " bytes, found " +
                        std::to_string(have),
                    data.size());
  }
  if (have > want) throw DumpError("trailing bytes after payload", header_len + want);
  const ScalingParams params(num("eps"), num("eta"));
  FieldDump out{DirectorField(grid), params, header};
  const char* p = data.data() + header_len;
  for (std::size_t n = 0; n < out.field.values.size(); ++n) {
    Vec3 v{get_f64(p), get_f64(p + 8), get_f64(p + 16)};
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      throw DumpError("non-finite value at node " + std::to_string(n), header_len + 24 * n);
    }
    out.field.values[n] = v;
    p += 24;
  }
  return out;
}

std::vector<std::string> unit_violations(const DirectorField& U, double tol) {
  std::vector<std::string> out;
  const Domain2D& d = U.domain();
  char buf[160];
  for (int k = 0; k < U.grid.n_layers(); ++k) {
    for (int n : d.domain_nodes()) {
      const int id = U.grid.node(n, k);
      const double len = norm(U.values[id]);
      if (std::abs(len - 1.0) > tol) {
        std::snprintf(buf, sizeof buf, "node %d (i=%d, j=%d, layer=%d): |U| = %.17g", id, d.node_i(n),
                      d.node_j(n), k, len);
        out.emplace_back(buf);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// shared pieces of the subcommands

namespace {

struct Case {
  DomainPtr domain;
  std::optional<Grid3D> grid;
  BoundaryDatum datum;
};

Case build_case(const RunConfig& c) {
  Case out;
  out.domain = make_domain(c.shape, c.nx, c.ny);
  out.grid.emplace(out.domain, c.layers);
  if (c.boundary_kind == "constant") {
    out.datum = constant_datum(out.domain, c.phase);
  } else {
    out.datum = power_law_datum(out.domain, c.degree);
    if (c.phase != 0.0) out.datum = rotated(out.datum, c.phase);
  }
  return out;
}

std::string datum_note(const RunConfig& c) {
  return c.boundary_kind + " " + std::to_string(c.degree) + " " + fmt(c.phase);
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("run.out", "cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

/// CSV file whose first line records schema, config hash and (eps, eta, k).
class Csv {
 public:
  Csv(const fs::path& path, const RunConfig& c, const std::string& eps, const std::string& eta,
      const std::string& columns)
      : f_(path) {
    if (!f_) throw Error("cannot write " + path.string());
    f_ << "# schema=" << kSchemaVersion << " config_hash=" << c.hash << " eps=" << eps << " eta=" << eta
       << " k=" << fmt(c.k) << "\n"
       << columns << "\n";
  }
  Csv(const fs::path& path, const RunConfig& c, const ScalingParams& p, const std::string& columns)
      : Csv(path, c, fmt(p.eps()), fmt(p.eta()), columns) {}

  void row(const std::string& text) {
    f_ << text << "\n";
    f_.flush();
  }

 private:
  std::ofstream f_;
};

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

struct Summary {
  DefectSet defects;
  double u3_min = 0.0;
  double u3_max = 0.0;
  double center_distance = 0.0;  // largest distance of a defect from the centroid
};

Summary summarize(const DirectorField& U, const RunConfig& c) {
  Summary s;
  s.defects = locate_defects(vertical_average(U), c.defects);
  const Domain2D& d = U.domain();
  s.u3_min = std::numeric_limits<double>::infinity();
  s.u3_max = -s.u3_min;
  for (int k = 0; k < U.grid.n_layers(); ++k) {
    for (int n : d.domain_nodes()) {
      const double z = U.at(n, k).z;
      s.u3_min = std::min(s.u3_min, z);
      s.u3_max = std::max(s.u3_max, z);
    }
  }
  for (const Defect& a : s.defects.items) s.center_distance = std::max(s.center_distance, norm(a.position - d.centroid()));
  return s;
}

void write_defects(const fs::path& path, const RunConfig& c, const ScalingParams& p, const DefectSet& ds) {
  Csv csv(path, c, p, "x,y,charge");
  for (const Defect& a : ds.items) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d", a.position.x, a.position.y, a.charge);
    csv.row(buf);
  }
}

double reduced_energy(double total, int degree, double eps) {
  return total - std::abs(degree) * std::numbers::pi * std::abs(std::log(eps));
}

class Report {
 public:
  void add(const std::string& key, const std::string& value) { lines_ += key + " = " + value + "\n"; }
  void add(const std::string& key, double value) { add(key, fmt(value)); }
  void warn(const std::string& w) { lines_ += "warning = " + w + "\n"; }
  void write(const fs::path& path) const {
    std::ofstream f(path);
    f << lines_;
  }

 private:
  std::string lines_;
};

struct SolveOutcome {
  std::optional<DirectorField> field;
  SolveReport report;
  bool no_progress = false;
  std::string message;
};

SolveOutcome solve_case(const DirectorField& init, const BoundaryDatum& g, const ScalingParams& p,
                        const SolveOptions& opts) {
  SolveOutcome out;
  try {
    auto [U, rep] = minimize_full(init, g, p, opts);
    out.field.emplace(std::move(U));
    out.report = std::move(rep);
  } catch (const NoProgress& e) {
    out.no_progress = true;
    out.message = e.what();
    out.report = e.report();
    out.field.emplace(init);
    if (e.last_values().size() == init.values.size()) out.field->values = e.last_values();
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_minimize(const RunConfig& c) {
  const fs::path out = prepare_out(c.out_dir);
  Case cs = build_case(c);
  const ScalingParams p = c.params();
  const DirectorField init = initial_director(*cs.grid, cs.datum, c.solve.seed, c.solve.init_noise);
  SolveOutcome res = solve_case(init, cs.datum, p, c.solve);
  const DirectorField& U = *res.field;
  const EnergyBreakdown e = energy_full(U, p);
  const Summary s = summarize(U, c);

  write_field_dump((out / "field.bin").string(), U, p, c.hash, datum_note(c));
  {
    Csv csv(out / "energy.csv", c, p,
            "eps,eta,k,bulk_horizontal,bulk_vertical,anchoring,total,reduced,iterations,residual,converged");
    csv.row(join({fmt(p.eps()), fmt(p.eta()), fmt(c.k), fmt(e.bulk_horizontal), fmt(e.bulk_vertical),
                  fmt(e.anchoring), fmt(e.total), fmt(reduced_energy(e.total, c.degree, p.eps())),
                  std::to_string(res.report.iterations), fmt(res.report.residual),
                  res.report.converged ? "1" : "0"},
                 ","));
  }
  {
    Csv csv(out / "trace.csv", c, p, "iteration,energy");
    for (std::size_t i = 0; i < res.report.energy_trace.size(); ++i) {
      csv.row(std::to_string(i) + "," + fmt(res.report.energy_trace[i]));
    }
  }
  write_defects(out / "defects.csv", c, p, s.defects);

  Report rep;
  rep.add("experiment", "minimize");
  rep.add("config_hash", c.hash);
  const bool ok = res.report.converged && !res.no_progress;
  rep.add("status", ok ? "converged" : (res.no_progress ? "no_progress" : "not_converged"));
  if (!res.message.empty()) rep.add("message", res.message);
  rep.add("iterations", std::to_string(res.report.iterations));
  rep.add("residual", res.report.residual);
  rep.add("energy", e.total);
  rep.add("reduced_energy", reduced_energy(e.total, c.degree, p.eps()));
  rep.add("defects", std::to_string(s.defects.size()));
  rep.add("u3_min", s.u3_min);
  rep.add("u3_max", s.u3_max);
  for (const auto& w : s.defects.warnings) rep.warn(w);
  rep.write(out / "report.txt");
  std::fprintf(stderr, "minimize: %s after %d iterations, F = %.10g, %zu defect(s)\n",
               ok ? "converged" : "stopped", res.report.iterations, e.total, s.defects.size());
  return ok ? ExitCode::ok : ExitCode::not_converged;
}

namespace {

struct Optimum {
  double value = 0.0;
  std::vector<Vec2> positions;
};

// W_g optimum with |degree| unit defects; conjugates the datum for negative degrees.
Optimum renormalized_optimum(const RunConfig& c, const Case& cs) {
  if (c.degree == 0) return {};
  const bool flip = c.degree < 0;
  const HarmonicSolver solver(cs.domain, flip ? conjugate(cs.datum) : cs.datum);
  const RenormalizedOptimum opt = minimize_renormalized(solver, std::abs(c.degree), c.pattern);
  Optimum out{opt.value, opt.positions};
  if (flip) {
    for (Vec2& p : out.positions) p.y = -p.y;
  }
  return out;
}

}  // namespace

int cmd_sweep(const RunConfig& c) {
  if (c.eps_list.size() < 3) throw ConfigError("params.eps_list", "a sweep needs at least 3 eps values");
  if (c.eta) throw ConfigError("params.eta", "a sweep uses eta = k eps; set params.k instead of params.eta");
  const fs::path out = prepare_out(c.out_dir);
  std::vector<double> eps = c.eps_list;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  std::vector<ScalingParams> schedule;
  try {
    schedule = linear_schedule(c.k, eps);
  } catch (const InvalidParameter& e) {
    throw ConfigError("params.k", e.what());
  }
  Case cs = build_case(c);

  std::optional<HarmonicSolver> harmonic;
  std::string harmonic_note;
  try {
    harmonic.emplace(cs.domain, cs.datum);
  } catch (const Error& e) {
    harmonic_note = e.what();
  }
  auto w_at = [&](const DefectSet& ds) {
    if (!harmonic) return std::numeric_limits<double>::quiet_NaN();
    try {
      return harmonic->closed_form(ds).w_closed;
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  Csv table(out / "sweep.csv", c, "sweep", "k*eps",
            "index,eps,eta,k,energy,reduced,iterations,residual,status,n_defects,charges,center_distance,"
            "u3_min,u3_max,w_detected");
  Report rep;
  rep.add("experiment", "sweep");
  rep.add("config_hash", c.hash);
  bool failed = false;
  std::vector<double> reduced;
  std::optional<DirectorField> prev;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ScalingParams& p = schedule[i];
    const fs::path sub = out / ("eps_" + std::to_string(i));
    prepare_out(sub.string());
    const DirectorField init = (c.sweep_warm_start && prev)
                                   ? *prev
                                   : initial_director(*cs.grid, cs.datum, c.solve.seed, c.solve.init_noise);
    SolveOutcome res = solve_case(init, cs.datum, p, c.solve);
    const DirectorField& U = *res.field;
    const EnergyBreakdown e = energy_full(U, p);
    const Summary s = summarize(U, c);
    write_field_dump((sub / "field.bin").string(), U, p, c.hash, datum_note(c));
    write_defects(sub / "defects.csv", c, p, s.defects);
    const bool ok = res.report.converged && !res.no_progress;
    failed = failed || !ok;
    std::vector<std::string> charges;
    for (const Defect& a : s.defects.items) charges.push_back(std::to_string(a.charge));
    const double E = reduced_energy(e.total, c.degree, p.eps());
    reduced.push_back(E);
    table.row(join({std::to_string(i), fmt(p.eps()), fmt(p.eta()), fmt(c.k), fmt(e.total), fmt(E),
                    std::to_string(res.report.iterations), fmt(res.report.residual),
                    ok ? "converged" : (res.no_progress ? "no_progress" : "not_converged"),
                    std::to_string(s.defects.size()), join(charges, ";"), fmt(s.center_distance),
                    fmt(s.u3_min), fmt(s.u3_max), fmt(w_at(s.defects))},
                   ","));
    for (const auto& w : s.defects.warnings) rep.warn("eps=" + fmt(p.eps()) + ": " + w);
    if (!ok) rep.warn("eps=" + fmt(p.eps()) + ": solve failed: " + (res.message.empty() ? "iteration limit" : res.message));
    std::fprintf(stderr, "sweep: eps=%g %s, F=%.8g, E=%.6g, %zu defect(s)\n", p.eps(), ok ? "ok" : "FAILED",
                 e.total, E, s.defects.size());
    prev.emplace(U);
  }

  const std::size_t n = reduced.size();
  const double spread = std::abs(reduced[n - 1] - reduced[n - 2]) / std::max(std::abs(reduced[n - 1]), 1e-300);
  rep.add("e_final", reduced[n - 1]);
  rep.add("e_last_two_spread", spread);
  if (c.sweep_compare) {
    Csv cmp(out / "comparison.csv", c, "sweep", "k*eps", "quantity,value");
    cmp.row("e_final," + fmt(reduced[n - 1]));
    cmp.row("e_previous," + fmt(reduced[n - 2]));
    cmp.row("e_spread," + fmt(spread));
    if (!harmonic_note.empty()) {
      rep.warn("renormalized energy unavailable: " + harmonic_note);
    } else {
      const Optimum w = renormalized_optimum(c, cs);
      double gamma = 0.0, gamma_spread = 0.0;
      if (c.degree != 0) {
        std::vector<std::pair<double, double>> ladder;
        for (double r : c.core_sigma_over_eps) ladder.emplace_back(r * c.core_eps, c.core_eps);
        const CoreConstant cc = core_constant(c.k, ladder, c.core_resolution, c.solve, c.threads);
        gamma = cc.gamma;
        gamma_spread = cc.spread;
        for (const auto& wn : cc.warnings) rep.warn("core: " + wn);
      }
      const double predicted = w.value + std::abs(c.degree) * gamma;
      const double gap = std::abs(reduced[n - 1] - predicted) / std::max(std::abs(predicted), 1e-300);
      cmp.row("w_optimum," + fmt(w.value));
      cmp.row("gamma," + fmt(gamma));
      cmp.row("gamma_spread," + fmt(gamma_spread));
      cmp.row("predicted," + fmt(predicted));
      cmp.row("relative_gap," + fmt(gap));
      rep.add("w_optimum", w.value);
      for (std::size_t i = 0; i < w.positions.size(); ++i) {
        rep.add("w_optimum_position_" + std::to_string(i), fmt(w.positions[i].x) + "," + fmt(w.positions[i].y));
      }
      rep.add("gamma", gamma);
      rep.add("predicted", predicted);
      rep.add("relative_gap", gap);
    }
  }
  rep.add("status", failed ? "failed" : "ok");
  rep.write(out / "report.txt");
  return failed ? ExitCode::sweep_failure : ExitCode::ok;
}

int cmd_renormalized(const RunConfig& c) {
  const fs::path out = prepare_out(c.out_dir);
  Case cs = build_case(c);
  if (c.degree == 0) throw ConfigError("boundary.degree", "renormalized energy optimization needs a nonzero degree");
  const bool flip = c.degree < 0;
  const HarmonicSolver solver(cs.domain, flip ? conjugate(cs.datum) : cs.datum);
  const int n = std::abs(c.degree);
  const RenormalizedOptimum opt = minimize_renormalized(solver, n, c.pattern);
  DefectSet ds;
  for (Vec2 p : opt.positions) ds.items.push_back({p, 1});
  const RenormalizedReport r = solver.renormalized_energy(ds);
  const ScalingParams p = c.params();
  {
    Csv csv(out / "optimum.csv", c, p, "index,x,y,charge");
    for (std::size_t i = 0; i < opt.positions.size(); ++i) {
      const Vec2 a = opt.positions[i];
      csv.row(join({std::to_string(i), fmt(a.x), fmt(flip ? -a.y : a.y), flip ? "-1" : "1"}, ","));
    }
  }
  {
    Csv csv(out / "renormalized.csv", c, p,
            "w_closed,pair_term,boundary_term,regular_term,w_limit,compatibility_residual,evaluations");
    csv.row(join({fmt(r.w_closed), fmt(r.pair_term), fmt(r.boundary_term), fmt(r.regular_term),
                  fmt(r.w_limit.value_or(std::numeric_limits<double>::quiet_NaN())),
                  fmt(r.compatibility_residual), std::to_string(opt.evaluations)},
                 ","));
  }
  {
    Csv csv(out / "seeds.csv", c, p, "start,value");
    for (std::size_t i = 0; i < opt.seed_values.size(); ++i) csv.row(std::to_string(i) + "," + fmt(opt.seed_values[i]));
  }
  Report rep;
  rep.add("experiment", "renormalized");
  rep.add("config_hash", c.hash);
  rep.add("w_optimum", opt.value);
  if (r.w_limit) rep.add("w_limit", *r.w_limit);
  if (c.landscape_scan > 0) {
    if (n > 2) {
      rep.warn("landscape scans cover one defect or symmetric pairs only");
    } else {
      const int m = c.landscape_scan;
      const Domain2D& d = *cs.domain;
      const Vec2 lo = d.origin();
      const double wx = d.hx() * d.nx(), wy = d.hy() * d.ny();
      std::vector<std::vector<Vec2>> configs;
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
          const Vec2 a = lo + Vec2{wx * (i + 0.5) / m, wy * (j + 0.5) / m};
          if (n == 1) configs.push_back({a});
          else configs.push_back({a, 2.0 * d.centroid() - a});
        }
      }
      const std::vector<double> w = renormalized_landscape(solver, configs);
      Csv csv(out / "landscape.csv", c, p, n == 1 ? "a1x,a1y,w" : "a1x,a1y,a2x,a2y,w");
      for (std::size_t i = 0; i < configs.size(); ++i) {
        if (!std::isfinite(w[i])) continue;
        std::vector<std::string> cols;
        for (Vec2 a : configs[i]) {
          cols.push_back(fmt(a.x));
          cols.push_back(fmt(flip ? -a.y : a.y));
        }
        cols.push_back(fmt(w[i]));
        csv.row(join(cols, ","));
      }
    }
  }
  rep.write(out / "report.txt");
  std::fprintf(stderr, "renormalized: W = %.10g after %d evaluations\n", opt.value, opt.evaluations);
  return ExitCode::ok;
}

int cmd_core(const RunConfig& c) {
  const fs::path out = prepare_out(c.out_dir);
  std::vector<std::pair<double, double>> ladder;
  for (double r : c.core_sigma_over_eps) {
    if (!(r > 0.0)) throw ConfigError("core.sigma_over_eps", "ratios must be positive");
    ladder.emplace_back(r * c.core_eps, c.core_eps);
  }
  const CoreConstant cc = core_constant(c.k, ladder, c.core_resolution, c.solve, c.threads);
  {
    Csv csv(out / "core.csv", c, fmt(c.core_eps), fmt(c.k * c.core_eps),
            "k,sigma,eps,gamma_value,tilde_gamma,iterations,residual");
    std::istringstream rows(core_csv_rows(cc));
    std::string line;
    while (std::getline(rows, line)) csv.row(line);
  }
  Report rep;
  rep.add("experiment", "core");
  rep.add("config_hash", c.hash);
  rep.add("k", c.k);
  rep.add("gamma", cc.gamma);
  rep.add("spread", cc.spread);
  bool all_converged = true;
  for (const CoreSample& s : cc.samples) all_converged = all_converged && s.report.converged;
  for (const auto& w : cc.warnings) {
    rep.warn(w);
    std::fprintf(stderr, "core: warning: %s\n", w.c_str());
  }
  rep.write(out / "report.txt");
  std::fprintf(stderr, "core: gamma = %.8g (k = %g, spread %.3g)\n", cc.gamma, c.k, cc.spread);
  return all_converged ? ExitCode::ok : ExitCode::not_converged;
}

int cmd_analyze(const RunConfig& c) {
  if (c.analyze_input.empty()) throw ConfigError("analyze.input", "no field dump given");
  FieldDump dump = [&] {
    try {
      return read_field_dump(c.analyze_input);
    } catch (const DumpError& e) {
      std::fprintf(stderr, "analyze: %s: %s\n", c.analyze_input.c_str(), e.what());
      throw;
    }
  }();
  const fs::path out = prepare_out(c.out_dir);
  const DirectorField& U = dump.field;
  const ScalingParams& p = dump.params;
  Report rep;
  rep.add("experiment", "analyze");
  rep.add("input", c.analyze_input);
  const auto bad = unit_violations(U);
  rep.add("unit_violations", std::to_string(bad.size()));
  for (const auto& b : bad) rep.add("violation", b);
  const EnergyBreakdown e = energy_full(U, p);
  rep.add("energy", e.total);
  rep.add("bulk_horizontal", e.bulk_horizontal);
  rep.add("bulk_vertical", e.bulk_vertical);
  rep.add("anchoring", e.anchoring);
  rep.add("el_residual", el_residual(U, p));
  const GlBoundReport gl = check_gl_bound(U, p, c.c_star);
  rep.add("gl_bound_lhs", gl.lhs);
  rep.add("gl_bound_rhs", gl.rhs);
  rep.add("gl_bound_holds", gl.holds ? "true" : "false");
  if (gl.strict_lhs) {
    rep.add("gl_strict_lhs", *gl.strict_lhs);
    rep.add("gl_strict_holds", *gl.strict_holds ? "true" : "false");
  } else if (c.c_star) {
    rep.add("gl_strict_check", "skipped: 2 eta^2 > (1 - c*) eps^2");
  }
  const AverageBoundReport av = check_average_bound(U);
  rep.add("average_bound_max_ratio", av.max_ratio);
  rep.add("average_bound_holds", av.holds ? "true" : "false");
  const DefectSet ds = locate_defects(vertical_average(U), c.defects);
  rep.add("defects", std::to_string(ds.size()));
  for (const auto& w : ds.warnings) rep.warn(w);
  rep.write(out / "analysis.txt");
  write_defects(out / "defects.csv", c, p, ds);
  {
    Csv csv(out / "energy.csv", c, p, "bulk_horizontal,bulk_vertical,anchoring,total");
    csv.row(join({fmt(e.bulk_horizontal), fmt(e.bulk_vertical), fmt(e.anchoring), fmt(e.total)}, ","));
  }
  if (!bad.empty()) {
    std::fprintf(stderr, "analyze: %zu node(s) violate |U| = 1, first: %s\n", bad.size(), bad.front().c_str());
    return ExitCode::config_error;
  }
  std::fprintf(stderr, "analyze: F = %.15g, %zu defect(s)\n", e.total, ds.size());
  return ExitCode::ok;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv, const char* const* envp) {
  CLI::App app{"Thin nematic slab experiments: energy minimization, defects, renormalized and core energies"};
  app.require_subcommand(1);
  struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::vector<std::string> sets;
    std::string input;
  } flags;
  const std::pair<const char*, const char*> subs[] = {
      {"minimize", "minimize the slab energy for one parameter set"},
      {"sweep", "minimize along a decreasing eps schedule and compare with W_g + d gamma"},
      {"renormalized", "minimize the renormalized energy over defect positions"},
      {"core", "core constant from the cell problem along a sigma/eps ladder"},
      {"analyze", "recompute energies, bounds and defects of a field dump"},
  };
  for (const auto& [name, help] : subs) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", flags.config, "INI-style config file");
    s->add_option("--out", flags.out, "output directory");
    s->add_option("--seed", flags.seed, "random seed");
    s->add_option("--threads", flags.threads, "worker threads");
    s->add_option("--set", flags.sets, "override a config key: section.key=value")->allow_extra_args(false);
    if (std::string(name) == "analyze") s->add_option("dump", flags.input, "field dump to analyze");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ExitCode::ok : ExitCode::config_error;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  const Experiment ex = name == "minimize"       ? Experiment::minimize
                        : name == "sweep"        ? Experiment::sweep
                        : name == "renormalized" ? Experiment::renormalized
                        : name == "core"         ? Experiment::core
                                                 : Experiment::analyze;
  try {
    ConfigMap m = flags.config.empty() ? ConfigMap{} : ConfigMap::load(flags.config);
    m.apply_env(envp);
    for (const auto& s : flags.sets) m.apply_assignment(s, "--set");
    if (!flags.out.empty()) m.set("run.out", flags.out, "--out");
    if (flags.seed) m.set("run.seed", std::to_string(*flags.seed), "--seed");
    if (flags.threads) m.set("run.threads", std::to_string(*flags.threads), "--threads");
    if (!flags.input.empty()) m.set("analyze.input", flags.input, "command line");
    const RunConfig cfg = resolve(m, ex);
    switch (ex) {
      case Experiment::minimize: return cmd_minimize(cfg);
      case Experiment::sweep: return cmd_sweep(cfg);
      case Experiment::renormalized: return cmd_renormalized(cfg);
      case Experiment::core: return cmd_core(cfg);
      case Experiment::analyze: return cmd_analyze(cfg);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return ExitCode::config_error;
  } catch (const DumpError&) {
    return ExitCode::config_error;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return ExitCode::config_error;
  }
  return ExitCode::config_error;
}

}  // namespace thinslab::cli
