#include "hspec/config.hpp"

#include "hspec/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace hspec {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

const json& member(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) fail(path + "." + it.key(), "unknown field");
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(path, "out of range");
  return static_cast<int>(v);
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

template <class F>
auto as_array(const json& j, const std::string& path, F&& element) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<decltype(element(j, path))> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(element(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> doubles(const json& j, const std::string& path) { return as_array(j, path, as_double); }

Word as_word(const json& j, const std::string& path) {
  Word w;
  for (int v : as_array(j, path, as_int)) {
    if (v < 0 || v > 255) fail(path, "symbol out of range");
    w.push_back(static_cast<Symbol>(v));
  }
  return w;
}

template <class Parse>
auto optional_field(const json& obj, const std::string& key, const std::string& path, Parse&& parse)
    -> std::optional<decltype(parse(obj, path))> {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  return parse(*it, path + "." + key);
}

ModelSpec parse_model(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string type = as_string(member(j, "type", path), path + ".type");
  if (type == "affine") {
    reject_unknown(j, {"type", "ratios", "offsets"}, path);
    return AffineSpec{doubles(member(j, "ratios", path), path + ".ratios"),
                      doubles(member(j, "offsets", path), path + ".offsets")};
  }
  if (type == "gauss") {
    reject_unknown(j, {"type", "digits"}, path);
    return GaussSpec{as_array(member(j, "digits", path), path + ".digits", as_int)};
  }
  fail(path + ".type", "expected \"affine\" or \"gauss\"");
}

json emit_model(const ModelSpec& m) {
  if (auto* a = std::get_if<AffineSpec>(&m)) return {{"type", "affine"}, {"ratios", a->ratios}, {"offsets", a->offsets}};
  return {{"type", "gauss"}, {"digits", std::get<GaussSpec>(m).digits}};
}

const std::set<std::string> kFiberKeys = {"c0", "c1", "c2", "c3", "amplitude", "omega", "phase"};

FiberCoefficients parse_fiber(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, kFiberKeys, path);
  FiberCoefficients c;
  auto get = [&](const char* key, double& out) {
    if (auto v = optional_field(j, key, path, as_double)) out = *v;
  };
  get("c0", c.c0);
  get("c1", c.c1);
  get("c2", c.c2);
  get("c3", c.c3);
  get("amplitude", c.amplitude);
  get("omega", c.omega);
  get("phase", c.phase);
  return c;
}

json emit_fiber(const FiberCoefficients& c) {
  return {{"c0", c.c0},       {"c1", c.c1},       {"c2", c.c2},      {"c3", c.c3},
          {"amplitude", c.amplitude}, {"omega", c.omega}, {"phase", c.phase}};
}

HeightSpec parse_height(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string type = as_string(member(j, "type", path), path + ".type");
  auto radius = [&] { return as_int(member(j, "radius", path), path + ".radius"); };
  if (type == "table") {
    reject_unknown(j, {"type", "radius", "entries"}, path);
    TableHeight h{radius(), {}};
    h.entries = as_array(member(j, "entries", path), path + ".entries", [](const json& e, const std::string& p) {
      require_object(e, p);
      reject_unknown(e, {"window", "value"}, p);
      return WindowValue{as_word(member(e, "window", p), p + ".window"), as_double(member(e, "value", p), p + ".value")};
    });
    return h;
  }
  if (type == "additive") {
    reject_unknown(j, {"type", "radius", "weights"}, path);
    return AdditiveHeight{radius(), doubles(member(j, "weights", path), path + ".weights")};
  }
  if (type == "embedded") {
    reject_unknown(j, {"type", "radius", "map"}, path);
    EmbeddedHeight h{radius(), {}};
    if (auto it = j.find("map"); it != j.end()) {
      const std::string p = path + ".map";
      require_object(*it, p);
      reject_unknown(*it, {"ax", "ay", "axx", "ayy"}, p);
      auto get = [&](const char* key, double& out) {
        if (auto v = optional_field(*it, key, p, as_double)) out = *v;
      };
      get("ax", h.map.ax);
      get("ay", h.map.ay);
      get("axx", h.map.axx);
      get("ayy", h.map.ayy);
    }
    return h;
  }
  if (type == "suspension") {
    reject_unknown(j, {"type", "profile", "roof", "output_radius"}, path);
    SuspensionHeight h;
    const std::string pp = path + ".profile";
    const json& prof = member(j, "profile", path);
    require_object(prof, pp);
    reject_unknown(prof, {"uniform", "radius", "windows"}, pp);
    if (auto it = prof.find("uniform"); it != prof.end()) {
      if (prof.contains("windows")) fail(pp, "give either uniform or windows, not both");
      h.uniform = parse_fiber(*it, pp + ".uniform");
    } else {
      h.profile_radius = as_int(member(prof, "radius", pp), pp + ".radius");
      h.profile = as_array(member(prof, "windows", pp), pp + ".windows", [](const json& e, const std::string& p) {
        require_object(e, p);
        reject_unknown(e, {"window", "coefficients"}, p);
        return FiberEntry{as_word(member(e, "window", p), p + ".window"),
                          parse_fiber(member(e, "coefficients", p), p + ".coefficients")};
      });
    }
    h.roof = doubles(member(j, "roof", path), path + ".roof");
    h.output_radius = as_int(member(j, "output_radius", path), path + ".output_radius");
    return h;
  }
  fail(path + ".type", "expected one of table, additive, embedded, suspension");
}

json emit_height(const HeightSpec& h) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TableHeight>) {
          json entries = json::array();
          for (const auto& e : v.entries) entries.push_back({{"window", e.window}, {"value", e.value}});
          return {{"type", "table"}, {"radius", v.radius}, {"entries", entries}};
        } else if constexpr (std::is_same_v<T, AdditiveHeight>) {
          return {{"type", "additive"}, {"radius", v.radius}, {"weights", v.weights}};
        } else if constexpr (std::is_same_v<T, EmbeddedHeight>) {
          return {{"type", "embedded"},
                  {"radius", v.radius},
                  {"map", {{"ax", v.map.ax}, {"ay", v.map.ay}, {"axx", v.map.axx}, {"ayy", v.map.ayy}}}};
        } else {
          json profile;
          if (v.uniform) {
            profile["uniform"] = emit_fiber(*v.uniform);
          } else {
            json windows = json::array();
            for (const auto& e : v.profile)
              windows.push_back({{"window", e.window}, {"coefficients", emit_fiber(e.coefficients)}});
            profile = {{"radius", v.profile_radius}, {"windows", windows}};
          }
          return {{"type", "suspension"}, {"profile", profile}, {"roof", v.roof}, {"output_radius", v.output_radius}};
        }
      },
      h);
}

const std::set<std::string> kCommands = {"dims", "curve", "spectrum", "prune", "suspend-check", "perturb", "selftest"};

RunSpec parse_run(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j,
                 {"command", "t_grid", "threshold", "max_period", "middle_bound", "depth", "r_min", "r_max",
                  "resolutions", "seed", "tolerances", "forbidden", "r0", "trials", "output_dir", "record_elapsed"},
                 path);
  RunSpec r;
  r.command = as_string(member(j, "command", path), path + ".command");
  if (!kCommands.count(r.command)) fail(path + ".command", "unknown command \"" + r.command + "\"");
  if (auto v = optional_field(j, "t_grid", path, doubles)) r.t_grid = *v;
  r.threshold = optional_field(j, "threshold", path, as_double);
  if (auto v = optional_field(j, "max_period", path, as_int)) r.max_period = *v;
  if (auto v = optional_field(j, "middle_bound", path, as_int)) r.middle_bound = *v;
  if (auto v = optional_field(j, "depth", path, as_int)) r.depth = *v;
  if (auto v = optional_field(j, "r_min", path, as_int)) r.r_min = *v;
  if (auto v = optional_field(j, "r_max", path, as_int)) r.r_max = *v;
  if (auto v = optional_field(j, "resolutions", path, doubles)) r.resolutions = *v;
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) fail(path + ".seed", "expected a non-negative integer");
    r.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("tolerances"); it != j.end()) {
    const std::string p = path + ".tolerances";
    require_object(*it, p);
    reject_unknown(*it, {"eta", "tau", "delta", "epsilon"}, p);
    auto get = [&](const char* key, double& out) {
      if (auto v = optional_field(*it, key, p, as_double)) out = *v;
    };
    get("eta", r.tolerances.eta);
    get("tau", r.tolerances.tau);
    get("delta", r.tolerances.delta);
    get("epsilon", r.tolerances.epsilon);
  }
  if (auto it = j.find("forbidden"); it != j.end()) r.forbidden = as_array(*it, path + ".forbidden", as_word);
  if (auto v = optional_field(j, "r0", path, as_int)) r.r0 = *v;
  if (auto v = optional_field(j, "trials", path, as_int)) r.trials = *v;
  if (auto v = optional_field(j, "output_dir", path, as_string)) r.output_dir = *v;
  if (auto v = optional_field(j, "record_elapsed", path, as_bool)) r.record_elapsed = *v;
  return r;
}

json emit_run(const RunSpec& r) {
  json j = {{"command", r.command},
            {"t_grid", r.t_grid},
            {"max_period", r.max_period},
            {"middle_bound", r.middle_bound},
            {"depth", r.depth},
            {"r_min", r.r_min},
            {"r_max", r.r_max},
            {"resolutions", r.resolutions},
            {"seed", r.seed},
            {"tolerances",
             {{"eta", r.tolerances.eta},
              {"tau", r.tolerances.tau},
              {"delta", r.tolerances.delta},
              {"epsilon", r.tolerances.epsilon}}},
            {"forbidden", r.forbidden},
            {"r0", r.r0},
            {"trials", r.trials},
            {"output_dir", r.output_dir},
            {"record_elapsed", r.record_elapsed}};
  if (r.threshold) j["threshold"] = *r.threshold;
  return j;
}

// Checks that need no domain objects.
void validate_fields(const RunConfig& c) {
  const int n = c.system.alphabet_size;
  if (n < 1 || n > 255) fail("system.alphabet_size", "must be in 1..255");
  if (static_cast<int>(c.system.transitions.size()) != n)
    fail("system.transitions", "expected " + std::to_string(n) + " rows");
  for (int i = 0; i < n; ++i) {
    const std::string p = "system.transitions[" + std::to_string(i) + "]";
    const auto& row = c.system.transitions[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != n) fail(p, "expected " + std::to_string(n) + " entries");
    for (std::size_t k = 0; k < row.size(); ++k)
      if (row[k] != 0 && row[k] != 1) fail(p + "[" + std::to_string(k) + "]", "entries must be 0 or 1");
  }
  const RunSpec& r = c.run;
  if (!std::is_sorted(r.t_grid.begin(), r.t_grid.end())) fail("run.t_grid", "must be sorted ascending");
  if (r.max_period < 1) fail("run.max_period", "must be >= 1");
  if (r.middle_bound < 0) fail("run.middle_bound", "must be >= 0");
  if (r.depth < 1) fail("run.depth", "must be >= 1");
  if (r.r_min < 0 || r.r_max <= r.r_min) fail("run.r_max", "need 0 <= r_min < r_max");
  for (std::size_t i = 0; i < r.resolutions.size(); ++i)
    if (!(r.resolutions[i] > 0)) fail("run.resolutions[" + std::to_string(i) + "]", "must be positive");
  if (r.r0 < 1) fail("run.r0", "must be >= 1");
  if (r.trials < 1) fail("run.trials", "must be >= 1");
  if (!(r.tolerances.eta > 0)) fail("run.tolerances.eta", "must be positive");
  if (!(r.tolerances.tau > 0)) fail("run.tolerances.tau", "must be positive");
  if (!(r.tolerances.delta >= 0)) fail("run.tolerances.delta", "must be non-negative");
  if (!(r.tolerances.epsilon > 0)) fail("run.tolerances.epsilon", "must be positive");
  if (r.output_dir.empty()) fail("run.output_dir", "must be non-empty");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  require_object(j, "config");
  reject_unknown(j, {"schema_version", "system", "model_u", "model_s", "height", "run"}, "config");
  RunConfig c;
  c.schema_version = as_int(member(j, "schema_version", "config"), "schema_version");
  if (c.schema_version != kSchemaVersion)
    fail("schema_version", "unsupported version " + std::to_string(c.schema_version));

  const json& sys = member(j, "system", "config");
  require_object(sys, "system");
  reject_unknown(sys, {"alphabet_size", "transitions"}, "system");
  c.system.alphabet_size = as_int(member(sys, "alphabet_size", "system"), "system.alphabet_size");
  c.system.transitions = as_array(member(sys, "transitions", "system"), "system.transitions",
                                  [](const json& row, const std::string& p) { return as_array(row, p, as_int); });

  c.model_u = parse_model(member(j, "model_u", "config"), "model_u");
  if (auto it = j.find("model_s"); it != j.end()) c.model_s = parse_model(*it, "model_s");
  if (auto it = j.find("height"); it != j.end()) c.height = parse_height(*it, "height");
  c.run = parse_run(member(j, "run", "config"), "run");
  validate_fields(c);
  build_system(c);  // cross-field checks
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
  json j = {{"schema_version", c.schema_version},
            {"system", {{"alphabet_size", c.system.alphabet_size}, {"transitions", c.system.transitions}}},
            {"model_u", emit_model(c.model_u)},
            {"run", emit_run(c.run)}};
  if (c.model_s) j["model_s"] = emit_model(*c.model_s);
  if (c.height) j["height"] = emit_height(*c.height);
  return j.dump(2) + "\n";
}

namespace {

CantorModel build_model(const ModelSpec& spec, int n, const std::string& path) {
  try {
    CantorModel m = std::holds_alternative<AffineSpec>(spec)
                        ? CantorModel::affine(std::get<AffineSpec>(spec).ratios, std::get<AffineSpec>(spec).offsets)
                        : CantorModel::gauss(std::get<GaussSpec>(spec).digits);
    if (m.alphabet_size() != n)
      fail(path, "model has " + std::to_string(m.alphabet_size()) + " symbols, system has " + std::to_string(n));
    return m;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

std::string window_text(const Word& w) { return "window " + to_string(w); }

}  // namespace

BuiltSystem build_system(const RunConfig& c) {
  const int n = c.system.alphabet_size;
  TransitionMatrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) b(i, k) = c.system.transitions[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  TrimResult trimmed = [&] {
    try {
      return validate_sft(b);
    } catch (const Error& e) {
      fail("system.transitions", e.what());
    }
  }();
  if (!trimmed.deleted.empty())
    fail("system.transitions", "symbol " + std::to_string(trimmed.deleted.front()) +
                                   " lies on no bi-infinite sequence; remove it from the system");

  CantorModel mu = build_model(c.model_u, n, "model_u");
  CantorModel ms = c.model_s ? build_model(*c.model_s, n, "model_s") : mu;
  BuiltSystem out{trimmed.sft, mu, ms, std::nullopt, std::nullopt, std::nullopt};
  const Sft& sft = out.sft;

  auto check_radius = [](int r, const std::string& path) {
    if (r < 0 || r > 8) fail(path, "radius must be in 0..8");
  };
  if (!c.height) return out;
  const HeightSpec& h = *c.height;
  try {
    if (auto* t = std::get_if<TableHeight>(&h)) {
      check_radius(t->radius, "height.radius");
      const std::vector<Word> windows = enumerate_words(sft, 2 * t->radius + 1);
      std::vector<double> values(windows.size(), std::numeric_limits<double>::quiet_NaN());
      for (std::size_t i = 0; i < t->entries.size(); ++i) {
        const std::string p = "height.entries[" + std::to_string(i) + "]";
        auto it = std::lower_bound(windows.begin(), windows.end(), t->entries[i].window);
        if (it == windows.end() || *it != t->entries[i].window)
          fail(p + ".window", window_text(t->entries[i].window) + " is not an admissible window of width " +
                                  std::to_string(2 * t->radius + 1));
        double& slot = values[static_cast<std::size_t>(it - windows.begin())];
        if (!std::isnan(slot)) fail(p + ".window", "duplicate " + window_text(t->entries[i].window));
        slot = t->entries[i].value;
      }
      for (std::size_t i = 0; i < windows.size(); ++i)
        if (std::isnan(values[i])) fail("height.entries", "missing " + window_text(windows[i]));
      out.table = HeightTable(sft, t->radius, std::move(values));
    } else if (auto* a = std::get_if<AdditiveHeight>(&h)) {
      check_radius(a->radius, "height.radius");
      if (static_cast<int>(a->weights.size()) != n)
        fail("height.weights", "expected " + std::to_string(n) + " weights");
      out.table = HeightTable::additive(sft, a->radius, a->weights);
    } else if (auto* e = std::get_if<EmbeddedHeight>(&h)) {
      check_radius(e->radius, "height.radius");
      try {
        e->map.validate();
      } catch (const Error& err) {
        fail("height.map", err.what());
      }
      out.table = HeightTable::embedded(sft, e->radius, ms, mu, e->map);
    } else {
      const auto& s = std::get<SuspensionHeight>(h);
      check_radius(s.output_radius, "height.output_radius");
      if (s.roof.size() != 1 && static_cast<int>(s.roof.size()) != n)
        fail("height.roof", "expected 1 or " + std::to_string(n) + " values");
      for (std::size_t i = 0; i < s.roof.size(); ++i)
        if (!(s.roof[i] > 0)) fail("height.roof[" + std::to_string(i) + "]", "must be positive");
      out.roof = s.roof.size() == 1 ? RoofFunction::constant(sft, s.roof[0]) : RoofFunction::per_symbol(sft, s.roof);
      if (s.uniform) {
        out.profile = FiberProfile::uniform(sft, *s.uniform);
      } else {
        check_radius(s.profile_radius, "height.profile.radius");
        const std::vector<Word> windows = enumerate_words(sft, 2 * s.profile_radius + 1);
        std::vector<std::optional<FiberCoefficients>> coeffs(windows.size());
        for (std::size_t i = 0; i < s.profile.size(); ++i) {
          const std::string p = "height.profile.windows[" + std::to_string(i) + "]";
          auto it = std::lower_bound(windows.begin(), windows.end(), s.profile[i].window);
          if (it == windows.end() || *it != s.profile[i].window)
            fail(p + ".window", window_text(s.profile[i].window) + " is not an admissible window");
          auto& slot = coeffs[static_cast<std::size_t>(it - windows.begin())];
          if (slot) fail(p + ".window", "duplicate " + window_text(s.profile[i].window));
          slot = s.profile[i].coefficients;
        }
        std::vector<FiberCoefficients> flat;
        for (std::size_t i = 0; i < windows.size(); ++i) {
          if (!coeffs[i]) fail("height.profile.windows", "missing " + window_text(windows[i]));
          flat.push_back(*coeffs[i]);
        }
        out.profile = FiberProfile(sft, s.profile_radius, std::move(flat));
      }
      out.table = height_table_from_suspension(*out.profile, *out.roof, sft, s.output_radius);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail("height", e.what());
  }
  for (std::size_t i = 0; i < c.run.forbidden.size(); ++i) {
    const Word& w = c.run.forbidden[i];
    if (!out.table || static_cast<int>(w.size()) != out.table->width() || out.table->index_of(w) < 0)
      fail("run.forbidden[" + std::to_string(i) + "]", window_text(w) + " is not a window of the height table");
  }
  return out;
}

}  // namespace hspec
