#include "mcporo/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mcporo/error.hpp"

namespace mcporo {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == ',' || ch == '\r' || ch == '\n') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double to_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(ErrorKind::Config, what + ": '" + std::string(s) + "' is not a finite number");
  }
  return v;
}

int to_int(std::string_view s, const std::string& what) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Config, what + ": '" + std::string(s) + "' is not an integer");
  }
  return v;
}

std::vector<double> doubles(std::string_view s, const std::string& what) {
  std::vector<double> out;
  for (const auto& w : split_words(s)) out.push_back(to_double(w, what));
  if (out.empty()) throw Error(ErrorKind::Config, what + ": value is empty");
  return out;
}

std::vector<int> ints(std::string_view s, const std::string& what) {
  std::vector<int> out;
  for (const auto& w : split_words(s)) out.push_back(to_int(w, what));
  if (out.empty()) throw Error(ErrorKind::Config, what + ": value is empty");
  return out;
}

const std::map<std::string, std::size_t, std::less<>> kFormArity = {
    {"constant", 1}, {"linear", 3}, {"sine_product", 3}, {"gaussian", 4}, {"cosine_x", 3}};

const std::map<std::string, std::set<std::string>, std::less<>> kKeys = {
    {"experiment", {"name"}},
    {"mesh", {"fine", "coarse", "layers"}},
    {"microstructure", {"type", "period", "fraction", "radius", "file"}},
    {"material", {"lambda", "mu", "kappa", "alpha", "biot_modulus"}},
    {"time", {"t_max", "steps"}},
    {"sources", {"f1", "f2", "g"}},
    {"initial", {"u1", "u2", "p"}},
    {"run", {"variants", "output", "vtk"}},
};

Field parse_field(std::string_view s) {
  if (s == "u1") return Field::U1;
  if (s == "u2") return Field::U2;
  if (s == "p") return Field::P;
  throw Error(ErrorKind::Config, "unknown field '" + std::string(s) + "' in [boundary]");
}

std::string_view field_name(Field f) {
  switch (f) {
    case Field::U1:
      return "u1";
    case Field::U2:
      return "u2";
    case Field::P:
      return "p";
  }
  return "?";
}

}  // namespace

AnalyticForm AnalyticForm::parse(std::string_view text) {
  const auto words = split_words(text);
  if (words.empty()) throw Error(ErrorKind::Config, "empty field expression");
  AnalyticForm f;
  const auto it = kFormArity.find(words.front());
  if (it == kFormArity.end()) {
    if (words.size() == 1) {
      f.name = "constant";
      f.params = {to_double(words.front(), "constant")};
      return f;
    }
    throw Error(ErrorKind::Config, "unknown field form '" + words.front() + "'");
  }
  f.name = words.front();
  f.params.clear();
  for (std::size_t k = 1; k < words.size(); ++k) f.params.push_back(to_double(words[k], f.name));
  if (f.params.size() != it->second) {
    throw Error(ErrorKind::Config, f.name + " takes " + std::to_string(it->second) + " parameters, got " +
                                       std::to_string(f.params.size()));
  }
  return f;
}

double AnalyticForm::operator()(const Point& x) const {
  constexpr double pi = std::numbers::pi;
  const auto& p = params;
  if (name == "constant") return p[0];
  if (name == "linear") return p[0] + p[1] * x.x + p[2] * x.y;
  if (name == "sine_product") return p[0] * std::sin(p[1] * pi * x.x) * std::sin(p[2] * pi * x.y);
  if (name == "gaussian") {
    const double dx = x.x - p[1];
    const double dy = x.y - p[2];
    return p[0] * std::exp(-p[3] * (dx * dx + dy * dy));
  }
  if (name == "cosine_x") return p[0] + p[1] * std::cos(p[2] * pi * x.x);
  throw Error(ErrorKind::Config, "unknown field form '" + name + "'");
}

ScalarField AnalyticForm::field() const {
  return [form = *this](const Point& x) { return form(x); };
}

bool AnalyticForm::is_zero() const {
  if (name == "constant" || name == "sine_product" || name == "gaussian") return params[0] == 0.0;
  for (double v : params) {
    if (v != 0.0) return false;
  }
  return true;
}

std::string AnalyticForm::text() const {
  std::ostringstream s;
  s << name;
  s.precision(17);
  for (double v : params) s << ' ' << v;
  return s.str();
}

int ExperimentConfig::layers_for(std::size_t grid_index) const {
  return layers.size() == 1 ? layers.front() : layers.at(grid_index);
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Config, what); };
  if (fine_cells < 1) fail("mesh.fine must be >= 1");
  if (coarse.empty()) fail("mesh.coarse needs at least one grid");
  for (int nc : coarse) {
    if (nc < 1 || fine_cells % nc != 0) {
      fail("mesh.coarse " + std::to_string(nc) + " does not divide mesh.fine " + std::to_string(fine_cells));
    }
  }
  if (layers.size() != 1 && layers.size() != coarse.size()) fail("mesh.layers needs one value or one per coarse grid");
  for (int l : layers) {
    if (l < 0) fail("mesh.layers must be >= 0");
  }
  if (continua.empty()) fail("material needs at least one continuum");
  const int n = n_continua();
  if (std::holds_alternative<UniformSpec>(microstructure) && n != 1) {
    fail("a uniform microstructure has one continuum, material lists " + std::to_string(n));
  }
  if ((std::holds_alternative<ChannelSpec>(microstructure) || std::holds_alternative<InclusionSpec>(microstructure)) &&
      n != 2) {
    fail("channel and inclusion microstructures have two continua, material lists " + std::to_string(n));
  }
  if (const auto* r = std::get_if<Raster>(&microstructure)) {
    for (int v : r->values) {
      if (v > n) fail("raster uses continuum " + std::to_string(v) + " but material lists " + std::to_string(n));
    }
  }
  for (const auto& m : continua) {
    if (!(m.lambda >= 0.0 && m.mu > 0.0 && m.kappa > 0.0)) fail("need lambda >= 0 and positive mu and kappa");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("material.alpha must lie in [0, 1]");
  if (!(biot_modulus > 0.0)) fail("material.biot_modulus must be positive");
  if (!(time.t_max > 0.0) || time.n_steps < 1) fail("time.t_max must be positive and time.steps >= 1");
  std::set<std::pair<int, int>> seen;
  for (const auto& b : boundary) {
    if (!seen.emplace(static_cast<int>(b.field), static_cast<int>(b.side)).second) {
      fail("boundary condition for " + std::string(field_name(b.field)) + " on " + std::string(to_string(b.side)) +
           " given twice");
    }
  }
}

MaterialField ExperimentConfig::material(const ContinuumMap& cont) const {
  return MaterialField::from_continua(cont, continua, alpha, 1.0 / biot_modulus);
}

BoundarySpec ExperimentConfig::boundary_spec() const {
  BoundarySpec spec;
  for (const auto& b : boundary) spec.conditions.push_back({b.field, b.side, b.value.field(), b.value.text()});
  return spec;
}

VectorField ExperimentConfig::body_force() const {
  if (f1.is_zero() && f2.is_zero()) return {};
  return [a = f1, b = f2](const Point& x) { return std::array<double, 2>{a(x), b(x)}; };
}

ScalarField ExperimentConfig::source() const {
  if (g.is_zero()) return {};
  return g.field();
}

ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides,
                              const std::filesystem::path& base_dir) {
  pt::ptree tree;
  {
    std::istringstream in{std::string(text)};
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw Error(ErrorKind::Config, "line " + std::to_string(e.line()) + ": " + e.message());
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw Error(ErrorKind::Config, "override '" + o + "' is not section.key=value");
    }
    const std::string section = trim(o.substr(0, dot));
    const std::string key = trim(o.substr(dot + 1, eq - dot - 1));
    const std::string value = trim(o.substr(eq + 1));
    pt::ptree* target = nullptr;
    for (auto& [k, v] : tree) {
      if (k == section) target = &v;
    }
    if (target == nullptr) target = &tree.push_back({section, pt::ptree{}})->second;
    bool replaced = false;
    for (auto& [k, v] : *target) {
      if (k == key) {
        v.put_value(value);
        replaced = true;
      }
    }
    if (!replaced) target->push_back({key, pt::ptree(value)});
  }

  std::map<std::string, std::map<std::string, std::string>> values;
  for (const auto& [section, sec] : tree) {
    if (section != "boundary" && !kKeys.contains(section)) {
      throw Error(ErrorKind::Config, "unknown section [" + section + "]");
    }
    for (const auto& [key, v] : sec) {
      if (section != "boundary" && !kKeys.at(section).contains(key)) {
        throw Error(ErrorKind::Config, "unknown key '" + key + "' in [" + section + "]");
      }
      values[section][key] = trim(v.data());
    }
  }
  auto get = [&](const std::string& section, const std::string& key) -> const std::string* {
    const auto s = values.find(section);
    if (s == values.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };

  ExperimentConfig c;
  if (const auto* v = get("experiment", "name")) c.name = *v;
  if (const auto* v = get("mesh", "fine")) c.fine_cells = to_int(*v, "mesh.fine");
  if (const auto* v = get("mesh", "coarse")) c.coarse = ints(*v, "mesh.coarse");
  if (const auto* v = get("mesh", "layers")) c.layers = ints(*v, "mesh.layers");

  const std::string type = get("microstructure", "type") ? *get("microstructure", "type") : "uniform";
  if (type == "uniform") {
    c.microstructure = UniformSpec{};
  } else if (type == "channels") {
    ChannelSpec s;
    if (const auto* v = get("microstructure", "period")) s.period = to_double(*v, "microstructure.period");
    if (const auto* v = get("microstructure", "fraction")) s.fraction = to_double(*v, "microstructure.fraction");
    c.microstructure = s;
  } else if (type == "inclusions") {
    InclusionSpec s;
    if (const auto* v = get("microstructure", "period")) s.period = to_double(*v, "microstructure.period");
    if (const auto* v = get("microstructure", "radius")) s.radius = to_double(*v, "microstructure.radius");
    c.microstructure = s;
  } else if (type == "raster") {
    const auto* v = get("microstructure", "file");
    if (v == nullptr) throw Error(ErrorKind::Config, "raster microstructure needs microstructure.file");
    c.raster_path = std::filesystem::path(*v);
    if (c.raster_path.is_relative() && !base_dir.empty()) c.raster_path = base_dir / c.raster_path;
    try {
      c.microstructure = read_raster(c.raster_path);
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, e.what());
    }
  } else {
    throw Error(ErrorKind::Config, "unknown microstructure type '" + type + "'");
  }

  std::vector<double> lambda{1.0};
  std::vector<double> mu{1.0};
  std::vector<double> kappa{1.0};
  if (const auto* v = get("material", "lambda")) lambda = doubles(*v, "material.lambda");
  if (const auto* v = get("material", "mu")) mu = doubles(*v, "material.mu");
  if (const auto* v = get("material", "kappa")) kappa = doubles(*v, "material.kappa");
  if (lambda.size() != mu.size() || lambda.size() != kappa.size()) {
    throw Error(ErrorKind::Config, "material.lambda, mu and kappa need one value per continuum");
  }
  c.continua.clear();
  for (std::size_t i = 0; i < lambda.size(); ++i) c.continua.push_back({lambda[i], mu[i], kappa[i]});
  if (const auto* v = get("material", "alpha")) c.alpha = to_double(*v, "material.alpha");
  if (const auto* v = get("material", "biot_modulus")) c.biot_modulus = to_double(*v, "material.biot_modulus");

  if (const auto* v = get("time", "t_max")) c.time.t_max = to_double(*v, "time.t_max");
  if (const auto* v = get("time", "steps")) c.time.n_steps = to_int(*v, "time.steps");

  if (const auto s = values.find("boundary"); s != values.end()) {
    for (const auto& [key, v] : s->second) {
      const auto dot = key.find('.');
      if (dot == std::string::npos) {
        throw Error(ErrorKind::Config, "boundary key '" + key + "' must be field.side, e.g. u1.right");
      }
      BoundaryEntry b;
      b.field = parse_field(key.substr(0, dot));
      try {
        b.side = parse_side(key.substr(dot + 1));
      } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what());
      }
      b.value = AnalyticForm::parse(v);
      c.boundary.push_back(std::move(b));
    }
  }
  if (const auto* v = get("sources", "f1")) c.f1 = AnalyticForm::parse(*v);
  if (const auto* v = get("sources", "f2")) c.f2 = AnalyticForm::parse(*v);
  if (const auto* v = get("sources", "g")) c.g = AnalyticForm::parse(*v);
  if (const auto* v = get("initial", "u1")) c.u1_initial = AnalyticForm::parse(*v);
  if (const auto* v = get("initial", "u2")) c.u2_initial = AnalyticForm::parse(*v);
  if (const auto* v = get("initial", "p")) c.p_initial = AnalyticForm::parse(*v);

  if (const auto* v = get("run", "variants")) {
    c.variants.clear();
    for (const auto& w : split_words(*v)) {
      if (w == "none") continue;
      c.variants.push_back(parse_variant(w));
    }
  }
  // Output paths stay relative to the working directory, not the config file.
  if (const auto* v = get("run", "output")) c.output_dir = std::filesystem::path(*v);
  if (const auto* v = get("run", "vtk")) {
    if (*v == "none") {
      c.vtk = VtkOutput::None;
    } else if (*v == "final") {
      c.vtk = VtkOutput::Final;
    } else if (*v == "all") {
      c.vtk = VtkOutput::All;
    } else {
      throw Error(ErrorKind::Config, "run.vtk must be none, final or all");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides, path.parent_path());
}

}  // namespace mcporo
