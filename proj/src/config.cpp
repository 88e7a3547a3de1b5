#include "slowfast/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "slowfast/errors.hpp"

namespace slowfast {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as a number");
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
  std::vector<T> out;
  if (trim(raw).empty()) return out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + raw + "'");
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

const std::set<std::string> kFixtureParams = {"Omega", "gamma", "B", "lambda", "omega_scale"};

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside of any section");
    for (const auto& [key, node] : body) {
      const std::string v = node.data();
      const std::string where = section + "." + key;
      if (section == "fixture") {
        if (key == "name") c.fixture = trim(v);
        else if (key == "point") c.point = parse_list<double>(where, v);
        else if (kFixtureParams.count(key)) c.params[key] = parse_number<double>(where, v);
        else throw ConfigError("unknown key '" + where + "'");
      } else if (section == "integrator") {
        if (key == "method") c.method = trim(v);
        else if (key == "dt") c.dt = parse_number<double>(where, v);
        else if (key == "rtol") c.rtol = parse_number<double>(where, v);
        else if (key == "atol") c.atol = parse_number<double>(where, v);
        else if (key == "max_steps") c.max_steps = parse_number<long>(where, v);
        else throw ConfigError("unknown key '" + where + "'");
      } else if (section == "quadrature") {
        if (key == "outer") c.outer = parse_number<int>(where, v);
        else if (key == "inner") c.inner = parse_number<int>(where, v);
        else if (key == "fd_step") c.fd_step = parse_number<double>(where, v);
        else throw ConfigError("unknown key '" + where + "'");
      } else if (section == "experiment") {
        if (key == "eps") c.eps = parse_number<double>(where, v);
        else if (key == "eps_grid") c.eps_grid = parse_list<double>(where, v);
        else if (key == "horizon") c.horizon = parse_number<double>(where, v);
        else if (key == "t_end") c.t_end = parse_number<double>(where, v);
        else if (key == "samples") c.samples = parse_number<int>(where, v);
        else if (key == "orders") c.orders = parse_list<int>(where, v);
        else if (key == "order") c.order = parse_number<int>(where, v);
        else if (key == "variant") c.variant = trim(v);
        else if (key == "strict") c.strict = parse_bool(where, v);
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(where, v);
        else if (key == "variant_points") c.variant_points = parse_number<int>(where, v);
        else throw ConfigError("unknown key '" + where + "'");
      } else if (section == "output") {
        if (key == "dir") c.out_dir = trim(v);
        else if (key == "format") c.format = trim(v);
        else throw ConfigError("unknown key '" + where + "'");
      } else {
        throw ConfigError("unknown section [" + section + "]");
      }
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c, bool with_output_dir) {
  std::ostringstream os;
  os << "[fixture]\n";
  os << "name = " << c.fixture << "\n";
  for (const auto& [k, v] : c.params) os << k << " = " << format_double(v) << "\n";
  if (!c.point.empty()) os << "point = " << join(c.point) << "\n";
  os << "\n[integrator]\n";
  os << "method = " << c.method << "\n";
  os << "dt = " << format_double(c.dt) << "\n";
  os << "rtol = " << format_double(c.rtol) << "\n";
  os << "atol = " << format_double(c.atol) << "\n";
  os << "max_steps = " << c.max_steps << "\n";
  os << "\n[quadrature]\n";
  os << "outer = " << c.outer << "\n";
  os << "inner = " << c.inner << "\n";
  os << "fd_step = " << format_double(c.fd_step) << "\n";
  os << "\n[experiment]\n";
  os << "eps = " << format_double(c.eps) << "\n";
  os << "eps_grid = " << join(c.eps_grid) << "\n";
  os << "horizon = " << format_double(c.horizon) << "\n";
  os << "t_end = " << format_double(c.t_end) << "\n";
  os << "samples = " << c.samples << "\n";
  os << "orders = " << join(c.orders) << "\n";
  os << "order = " << c.order << "\n";
  os << "variant = " << c.variant << "\n";
  os << "strict = " << (c.strict ? "true" : "false") << "\n";
  os << "seed = " << c.seed << "\n";
  os << "variant_points = " << c.variant_points << "\n";
  os << "\n[output]\n";
  if (with_output_dir) os << "dir = " << c.out_dir << "\n";
  os << "format = " << c.format << "\n";
  return os.str();
}

Fixture RunConfig::make_fixture() const {
  try {
    return get_fixture(fixture, params);
  } catch (const NotFound& e) {
    throw ConfigError(e.what());
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

std::vector<double> RunConfig::library_point(const Fixture& f) const {
  if (point.empty()) return f.default_point;
  if (point.size() != f.natural_index.size()) {
    std::ostringstream os;
    os << "fixture.point needs " << f.natural_index.size() << " coordinates, got " << point.size();
    throw ConfigError(os.str());
  }
  return f.from_natural_order(point);
}

IntegratorConfig RunConfig::integrator() const {
  IntegratorConfig ic;
  if (method == "dopri5") ic.method = IntegratorMethod::dopri5;
  else if (method == "rk4") ic.method = IntegratorMethod::rk4_fixed;
  else throw ConfigError("integrator.method must be dopri5 or rk4, got '" + method + "'");
  ic.dt = dt;
  ic.rtol = rtol;
  ic.atol = atol;
  ic.max_steps = max_steps;
  return ic;
}

CorrectionOptions RunConfig::corrections() const {
  CorrectionOptions o;
  o.quad.outer = outer;
  o.quad.inner = inner;
  o.fd_rel_step = fd_step;
  return o;
}

DriftConfig RunConfig::drift_config(const Fixture& f, int workers) const {
  DriftConfig d;
  d.fixture = fixture;
  d.params = params;
  d.m0 = library_point(f);
  d.eps_grid = eps_grid;
  d.horizon = horizon;
  d.samples = samples;
  d.integrator = integrator();
  d.orders = orders;
  d.variant = variant == "auto" ? F2Variant::ai3 : parse_f2_variant(variant);
  d.corrections = corrections();
  d.variant_points = variant_points;
  d.seed = seed;
  d.workers = workers;
  return d;
}

void RunConfig::validate() const {
  make_fixture();
  try {
    integrator().validate();
    require_node_count(outer);
    require_node_count(inner);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(fd_step > 0.0)) throw ConfigError("quadrature.fd_step must be positive");
  if (variant != "ai3" && variant != "ty3" && variant != "auto")
    throw ConfigError("experiment.variant must be ai3, ty3 or auto");
  if (format != "csv" && format != "json" && format != "both")
    throw ConfigError("output.format must be csv, json or both");
  if (samples < 1) throw ConfigError("experiment.samples must be >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("experiment.eps must lie in [0, 1)");
  if (!(horizon > 0.0)) throw ConfigError("experiment.horizon must be positive");
  if (t_end < 0.0) throw ConfigError("experiment.t_end must be >= 0");
  if (variant_points < 0) throw ConfigError("experiment.variant_points must be >= 0");
}

}  // namespace slowfast
