#include "hspec/runner.hpp"

#include "hspec/errors.hpp"
#include "hspec/perturbation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace hspec {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) v = 0;  // drop the sign of -0
  const int exponent = v == 0 ? 0 : static_cast<int>(std::floor(std::log10(std::abs(v))));
  int decimals = std::max(0, 11 - exponent);
  std::vector<char> buf(static_cast<std::size_t>(decimals + 400));
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
  // Rounding up to the next power of ten adds a digit.
  if (decimals > 0 && std::abs(std::strtod(buf.data(), nullptr)) >= std::pow(10.0, exponent + 1))
    std::snprintf(buf.data(), buf.size(), "%.*f", --decimals, v);
  return buf.data();
}

namespace {

void dump(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_number(v) : "null";
      break;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += inner;
        dump(j[i], out, indent + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "]";
      break;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += inner + json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "}";
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump(j, out, 0);
  return out + "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string curve_csv(const DimensionCurve& curve) {
  std::string out = "t,D_u,D_s,method,error\n";
  for (const auto& s : curve.samples)
    out += format_number(s.t) + "," + format_number(s.du) + "," + format_number(s.ds) + "," + to_string(s.method) +
           "," + format_number(s.error) + "\n";
  return out;
}

std::string curve_svg(const DimensionCurve& curve) {
  if (curve.samples.empty()) throw DomainError("curve_svg: need at least one sample");
  constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 20, kTop = 20, kBottom = 50;
  double t0 = curve.samples.front().t;
  double t1 = curve.samples.back().t;
  if (t1 <= t0) {
    t0 -= 0.5;
    t1 += 0.5;
  }
  double ymax = 1;
  for (const auto& s : curve.samples) ymax = std::max(ymax, s.du);
  auto px = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * (kWidth - kLeft - kRight); };
  auto py = [&](double d) { return kHeight - kBottom - d / ymax * (kHeight - kTop - kBottom); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto label = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  out += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  const std::string x_axis = num(py(0));
  out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + x_axis + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" + x_axis +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + x_axis +
         "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + num(kLeft) + "\" y=\"" + num(kHeight - kBottom + 18) + "\" font-size=\"12\" text-anchor=\"middle\">" +
         label(t0) + "</text>\n";
  out += "<text x=\"" + num(kWidth - kRight) + "\" y=\"" + num(kHeight - kBottom + 18) +
         "\" font-size=\"12\" text-anchor=\"middle\">" + label(t1) + "</text>\n";
  out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(0) + 4) + "\" font-size=\"12\" text-anchor=\"end\">0</text>\n";
  out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(ymax) + 4) + "\" font-size=\"12\" text-anchor=\"end\">" +
         label(ymax) + "</text>\n";
  out += "<text x=\"" + num(0.5 * (kLeft + kWidth - kRight)) + "\" y=\"" + num(kHeight - 12) +
         "\" font-size=\"14\" text-anchor=\"middle\">t</text>\n";
  out += "<text x=\"16\" y=\"" + num(0.5 * (kTop + kHeight - kBottom)) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + num(0.5 * (kTop + kHeight - kBottom)) +
         ")\">dimension</text>\n";

  if (curve.samples.size() > 1) {
    std::string points;
    for (std::size_t i = 0; i < curve.samples.size(); ++i) {
      const auto& s = curve.samples[i];
      if (i > 0) points += " " + num(px(s.t)) + "," + num(py(curve.samples[i - 1].du));
      points += (i > 0 ? " " : "") + num(px(s.t)) + "," + num(py(s.du));
    }
    out += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
  }
  for (const auto& s : curve.samples)
    out += "<circle cx=\"" + num(px(s.t)) + "\" cy=\"" + num(py(s.du)) + "\" r=\"3\" fill=\"steelblue\"/>\n";
  out += "</svg>\n";
  return out;
}

namespace {

json estimate_json(const DimensionEstimate& d) {
  return {{"value", d.value},
          {"method", to_string(d.method)},
          {"error_bound", d.error_bound},
          {"depth", d.depth},
          {"scale_min", d.scale_min},
          {"scale_max", d.scale_max}};
}

struct Session {
  const RunConfig& config;
  BuiltSystem built;
  std::filesystem::path out_dir;
  RunReport& report;

  void write(const std::string& name, const std::string& text) {
    const auto path = out_dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text) || !f.flush()) throw Error("cannot write " + path.string());
    if (std::find(report.files.begin(), report.files.end(), name) == report.files.end()) report.files.push_back(name);
  }

  const HeightTable& table(const std::string& command) const {
    if (!built.table) throw ConfigError("height: required by command " + command);
    return *built.table;
  }

  double threshold(const std::string& command) const {
    return config.run.threshold.value_or(table(command).max_value());
  }

  std::vector<double> resolutions(int coarse, int fine) const {
    return config.run.resolutions.empty() ? dyadic_resolutions(coarse, fine) : config.run.resolutions;
  }
};

json run_dims(Session& s) {
  const RunSpec& r = s.config.run;
  auto side = [&](const Sft& sft, const CantorModel& model) {
    const BlockGraph graph = higher_block(sft, 1);
    const VertexMask mask = full_mask(graph);
    const DimensionEstimate p = dimension_pressure(model, graph, mask);
    const DimensionEstimate c = dimension_counting(model, graph, mask, r.r_min, r.r_max);
    return json{{"pressure", estimate_json(p)}, {"counting", estimate_json(c)}, {"difference", std::abs(p.value - c.value)}};
  };
  json out = {{"unstable", side(s.built.sft, s.built.model_u)}, {"stable", side(s.built.sft.reversed(), s.built.model_s)}};
  s.write("dims.json", dump_json(out));
  return {{"du_pressure", out["unstable"]["pressure"]["value"]},
          {"du_counting", out["unstable"]["counting"]["value"]},
          {"ds_pressure", out["stable"]["pressure"]["value"]},
          {"ds_counting", out["stable"]["counting"]["value"]}};
}

json run_curve(Session& s) {
  const HeightTable& table = s.table("curve");
  if (s.config.run.t_grid.empty()) throw ConfigError("run.t_grid: required by command curve");
  const DimensionCurve curve = du_curve(s.built.sft, s.built.model_u, s.built.model_s, table, s.config.run.t_grid);
  s.write("curve.csv", curve_csv(curve));
  s.write("curve.svg", curve_svg(curve));
  for (std::size_t i = 1; i < curve.samples.size(); ++i)
    if (curve.samples[i].du < curve.samples[i - 1].du)
      s.report.warnings.push_back("D_u decreases between t=" + format_number(curve.samples[i - 1].t) +
                                  " and t=" + format_number(curve.samples[i].t));
  return {{"samples", curve.samples.size()}, {"du_max", curve.samples.back().du}, {"ds_max", curve.samples.back().ds}};
}

json run_spectrum(Session& s) {
  const HeightTable& table = s.table("spectrum");
  const RunSpec& r = s.config.run;
  const double t = s.threshold("spectrum");
  const std::vector<double> res = s.resolutions(2, 12);
  std::string csv = "value,kind,period_bound\n";
  json dims = json::object();
  json summary = {{"threshold", t}};
  for (SpectrumKind kind : {SpectrumKind::Markov, SpectrumKind::Lagrange}) {
    const SpectrumSlice slice = spectrum_slice(s.built.sft, table, kind, t, r.max_period, r.middle_bound);
    for (double v : slice.values) csv += format_number(v) + "," + to_string(kind) + "," + std::to_string(r.max_period) + "\n";
    json entry = {{"count", slice.values.size()}, {"max_period", r.max_period}, {"middle_bound", r.middle_bound}};
    if (slice.values.empty()) {
      entry["dimension"] = nullptr;
      s.report.warnings.push_back(to_string(kind) + " slice is empty below t=" + format_number(t));
    } else {
      entry["dimension"] = estimate_json(slice_dimension(slice, res));
    }
    summary[to_string(kind) + "_count"] = slice.values.size();
    dims[to_string(kind)] = entry;
  }
  dims["threshold"] = t;
  s.write("spectrum.csv", csv);
  s.write("spectrum_dim.json", dump_json(dims));
  return summary;
}

json run_prune(Session& s) {
  const HeightTable& table = s.table("prune");
  const double t = s.threshold("prune");
  const PrunedSystem p = prune_below(s.built.sft, s.built.model_u, table, t);
  json comps = json::array();
  for (const auto& c : p.components)
    comps.push_back({{"size", c.component.vertices.size()},
                     {"least_vertex", to_string(p.graph->vertices[static_cast<std::size_t>(c.component.vertices.front())])},
                     {"dimension", estimate_json(c.dimension)}});
  json out = {{"threshold", t},
              {"graph_vertices", p.graph->size()},
              {"surviving_vertices", mask_count(p.mask)},
              {"components", comps},
              {"selected", p.selected},
              {"dimension", p.dimension()}};
  json summary = {{"threshold", t}, {"components", p.components.size()}, {"dimension", p.dimension()}};
  if (!s.config.run.forbidden.empty()) {
    const SubhorseshoeSelection sel = select_subhorseshoe(p, s.config.run.forbidden, s.config.run.r0);
    out["subhorseshoe"] = {{"forbidden", s.config.run.forbidden.size()},
                           {"r0", s.config.run.r0},
                           {"count_before", sel.count_before},
                           {"count_after", sel.count_after},
                           {"counting_loss", sel.counting_loss},
                           {"dimension", sel.system.dimension()}};
    summary["subhorseshoe_dimension"] = sel.system.dimension();
  }
  s.write("prune.json", dump_json(out));
  return summary;
}

json run_suspend_check(Session& s) {
  if (!s.built.profile) throw ConfigError("height: command suspend-check needs a suspension height");
  const RunSpec& r = s.config.run;
  const FiberProfile& profile = *s.built.profile;
  const RoofFunction& roof = *s.built.roof;
  const HeightTable& table = *s.built.table;
  const int m = context_radius(profile, roof);
  double worst = 0;
  std::size_t orbits = 0;
  for (const PeriodicOrbit& orbit : periodic_orbits(s.built.sft, r.max_period)) {
    const TwoSidedPoint x = TwoSidedPoint::periodic(orbit);
    const double flow = flow_lagrange(profile, roof, x, minimal_horizon(x, m));
    worst = std::max(worst, std::abs(flow - lagrange_value(s.built.sft, table, x)));
    ++orbits;
  }
  json out = {{"reduction",
               {{"orbits", orbits},
                {"max_period", r.max_period},
                {"max_residual", worst},
                {"tolerance", r.tolerances.tau},
                {"pass", worst <= r.tolerances.tau}}}};
  if (worst > r.tolerances.tau) s.report.warnings.push_back("flow and map Lagrange values disagree");
  const int depth = std::max(r.depth, 6);
  const SuspensionDimensionCheck d = suspension_dimension_check(s.built.model_u, roof, depth, r.resolutions);
  out["dimension"] = {{"depth", depth},
                      {"dim_k", estimate_json(d.dim_k)},
                      {"dim_lambda", estimate_json(d.dim_lambda)},
                      {"residual", d.residual}};
  s.write("suspend.json", dump_json(out));
  return {{"reduction_residual", worst}, {"dimension_residual", d.residual}};
}

json regularity_json(const RegularityReport& rep) {
  json conds = json::array();
  for (const auto& c : rep.conditions)
    conds.push_back({{"name", c.name}, {"margin", c.margin}, {"vacuous", c.vacuous}, {"pass", c.pass}});
  return {{"conditions", conds}, {"tolerance", rep.tolerance}, {"pass", rep.passes()}};
}

json transversality_json(const TransversalityReport& rep) {
  return {{"points", rep.points.size()},
          {"failures", rep.failures()},
          {"epsilon", rep.epsilon},
          {"min_margin", rep.points.empty() ? 0.0 : rep.min_margin()},
          {"pass", rep.all_pass()}};
}

json run_perturb(Session& s) {
  const HeightTable& table = s.table("perturb");
  const RunSpec& r = s.config.run;
  const Tolerances& tol = r.tolerances;
  json out = json::object();
  json summary = json::object();
  if (s.built.profile) {
    const FiberProfile& profile = *s.built.profile;
    const RoofFunction& roof = *s.built.roof;
    const RegularityReport before = regularity_scan(profile, roof, 64, tol.eta);
    const RegularParamsResult found = find_regular_params(profile, roof, r.trials, r.seed, tol.delta);
    const FiberProfile perturbed = perturb_fiber(profile, found.params, tol.delta);
    constexpr int kSamples = 4096;
    const double unique_before = unique_maximizer_fraction(profile, roof, s.built.sft, kSamples);
    const double unique_after = unique_maximizer_fraction(perturbed, roof, s.built.sft, kSamples);
    out["regularity"] = {{"before", regularity_json(before)},
                         {"params", {{"a", found.params.a}, {"b", found.params.b}, {"c", found.params.c}}},
                         {"after", regularity_json(found.report)},
                         {"trials", r.trials},
                         {"bound", tol.delta}};
    out["uniqueness"] = {{"before", unique_before}, {"after", unique_after}, {"samples", kSamples}};
    summary["regular_after"] = found.report.passes();
    summary["unique_after"] = unique_after;
    if (!found.report.passes()) s.report.warnings.push_back("no regular parameters found");
  }
  const int depth = std::max(r.depth, 2 * table.radius() + 1);
  const TransversalityReport scan =
      transversality_scan(s.built.sft, s.built.model_u, s.built.model_s, table, depth, tol.epsilon);
  out["transversality"] = {{"depth", depth}, {"scan", transversality_json(scan)}};
  summary["transversality_failures"] = scan.failures();
  if (!scan.all_pass()) {
    const TiltResult tilt = find_transverse_tilt(s.built.sft, s.built.model_u, s.built.model_s, table, depth,
                                                 tol.epsilon, tol.delta, r.trials, r.seed);
    out["transversality"]["tilt"] = {{"v1", tilt.v1}, {"v2", tilt.v2}, {"scan", transversality_json(tilt.report)}};
    summary["tilt_failures"] = tilt.report.failures();
  }
  s.write("perturb.json", dump_json(out));
  return summary;
}

// Built-in invariant checks on small fixed systems.
struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

Check check_word_counts() {
  const Sft sft = Sft::golden_mean();
  Eigen::MatrixXd b = sft.transitions().cast<double>();
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(2, 2);
  for (int k = 1; k <= 12; ++k) {
    const double expected = power.sum();
    const auto got = static_cast<double>(enumerate_words(sft, k).size());
    if (got != expected) return {"word_counts", false, "length " + std::to_string(k)};
    power = power * b;
  }
  return {"word_counts", true, "golden mean, lengths 1..12"};
}

Check check_pressure() {
  const Sft sft = Sft::full_shift(2);
  const BlockGraph g = higher_block(sft, 1);
  const double a = dimension_pressure(CantorModel::uniform_affine(2, 1.0 / 3), g, full_mask(g)).value;
  const double b = dimension_pressure(CantorModel::affine({0.5, 0.25}, {0, 0.75}), g, full_mask(g)).value;
  // 2^-s + 4^-s = 1 gives 2^-s = (sqrt 5 - 1) / 2.
  const double b_exact = -std::log2((std::sqrt(5.0) - 1) / 2);
  const double err = std::max(std::abs(a - std::log(2.0) / std::log(3.0)), std::abs(b - b_exact));
  return {"pressure_closed_form", err <= 1e-6, "max error " + format_number(err)};
}

Check check_cylinders() {
  const CantorModel gauss = CantorModel::gauss({1, 2});
  const CylinderInterval c = cylinder_interval(gauss, Word{0, 1});
  const bool endpoints = std::abs(std::min(c.left, c.right) - 2.0 / 3) < 1e-15 &&
                         std::abs(std::max(c.left, c.right) - 3.0 / 4) < 1e-15;
  for (const CantorModel& model : {CantorModel::uniform_affine(2, 1.0 / 3), gauss})
    for (int k = 1; k <= 6; ++k)
      for (const Word& w : enumerate_words(Sft::full_shift(2), k)) {
        const CylinderInterval parent = cylinder_interval(model, Word(w.begin(), w.end() - 1));
        const CylinderInterval child = cylinder_interval(model, w);
        if (child.left < parent.left || child.right > parent.right)
          return {"cylinder_nesting", false, "word " + to_string(w)};
      }
  return {"cylinder_nesting", endpoints, endpoints ? "depth 6, gauss endpoints exact" : "gauss endpoints"};
}

Check check_pruning() {
  const Sft sft = Sft::full_shift(2);
  const CantorModel model = CantorModel::uniform_affine(2, 1.0 / 3);
  const HeightTable table = HeightTable::additive(sft, 1, {0, 1});
  std::vector<double> grid;
  for (int i = 0; i <= 6; ++i) grid.push_back(0.5 * i);
  VertexMask previous;
  for (double t : grid) {
    const VertexMask mask = threshold_mask(table, t);
    if (!previous.empty())
      for (std::size_t i = 0; i < mask.size(); ++i)
        if (previous[i] && !mask[i]) return {"pruning_monotone", false, "masks not nested at t=" + format_number(t)};
    previous = mask;
  }
  const DimensionCurve curve = du_curve(sft, model, model, table, grid);
  for (std::size_t i = 1; i < curve.samples.size(); ++i)
    if (curve.samples[i].du < curve.samples[i - 1].du) return {"pruning_monotone", false, "D_u decreases"};
  return {"pruning_monotone", true, "7 thresholds"};
}

Check check_spectra() {
  const Sft sft = Sft::full_shift(2);
  const HeightTable table = HeightTable::additive(sft, 1, {0, 1});
  const double t = table.max_value();
  const auto markov = spectrum_slice(sft, table, SpectrumKind::Markov, t, 6, 2).values;
  const auto lagrange = spectrum_slice(sft, table, SpectrumKind::Lagrange, t, 6, 2).values;
  std::vector<double> range = table.values();
  std::sort(range.begin(), range.end());
  for (double v : lagrange)
    if (!std::binary_search(markov.begin(), markov.end(), v)) return {"spectra_inclusion", false, "L not in M"};
  for (double v : markov)
    if (!std::binary_search(range.begin(), range.end(), v)) return {"spectra_inclusion", false, "M not in range"};

  std::mt19937_64 rng(7);
  auto word = [&](int min_len, int max_len) {
    std::uniform_int_distribution<int> len(min_len, max_len);
    Word w(static_cast<std::size_t>(len(rng)));
    for (auto& c : w) c = static_cast<Symbol>(rng() & 1);
    return w;
  };
  for (int i = 0; i < 1000; ++i) {
    TwoSidedPoint x{{word(1, 4)}, word(0, 5), {word(1, 4)}, 0};
    x.origin = static_cast<int>(rng() % (x.middle.size() + 1));
    if (lagrange_value(sft, table, x) > markov_value(sft, table, x))
      return {"spectra_inclusion", false, "lagrange exceeds markov"};
  }
  return {"spectra_inclusion", true, "slices at period 6, 1000 random points"};
}

Check check_flow_reduction() {
  const Sft sft = Sft::golden_mean();
  const FiberProfile profile = FiberProfile::from_function(sft, 1, [](const Word& w) {
    FiberCoefficients c;
    c.c0 = 0.25 * std::count(w.begin(), w.end(), Symbol{1});
    c.amplitude = 1;
    c.omega = 2 * std::numbers::pi;
    c.phase = 0.5 * w[1];
    return c;
  });
  const RoofFunction roof = RoofFunction::per_symbol(sft, {1.0, 1.3});
  const HeightTable table = height_table_from_suspension(profile, roof, sft, 1);
  double worst = 0;
  for (const PeriodicOrbit& orbit : periodic_orbits(sft, 6)) {
    const TwoSidedPoint x = TwoSidedPoint::periodic(orbit);
    worst = std::max(worst, std::abs(flow_lagrange(profile, roof, x, minimal_horizon(x, 1)) -
                                     lagrange_value(sft, table, x)));
  }
  return {"flow_reduction", worst <= 1e-9, "max residual " + format_number(worst)};
}

Check check_perturbation() {
  const Sft sft = Sft::full_shift(2);
  FiberCoefficients base;
  base.amplitude = 1;
  base.omega = 2 * std::numbers::pi;
  const FiberProfile profile = FiberProfile::uniform(sft, base);
  const PerturbationParams p{0.01, 0.02, -0.03};
  const PerturbationParams q{0.04, -0.05, 0.06};
  const bool additive = perturb_fiber(perturb_fiber(profile, p), q) ==
                        perturb_fiber(profile, {p.a + q.a, p.b + q.b, p.c + q.c});
  return {"perturbation_additive", additive, ""};
}

Check check_transversality() {
  const Sft sft = Sft::full_shift(2);
  const CantorModel model = CantorModel::uniform_affine(2, 1.0 / 3);
  const HeightTable table = HeightTable::embedded(sft, 1, model, model);
  const TransversalityReport r = transversality_scan(sft, model, model, table, 3, 0.5);
  return {"transversality_linear", r.all_pass(), "min margin " + format_number(r.min_margin())};
}

Check check_roundtrip(const RunConfig& config) {
  return {"config_roundtrip", parse_config(emit_config(config)) == config, ""};
}

json run_selftest(Session& s) {
  std::vector<Check> checks = {check_word_counts(), check_pressure(),      check_cylinders(),
                               check_pruning(),     check_spectra(),       check_flow_reduction(),
                               check_perturbation(), check_transversality(), check_roundtrip(s.config)};
  auto command = [&](const std::string& name, json (*fn)(Session&)) {
    try {
      s.report.summary[name] = fn(s);
      checks.push_back({"command " + name, true, ""});
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      checks.push_back({"command " + name, false, e.what()});
    }
  };
  command("dims", run_dims);
  if (s.built.table) {
    if (!s.config.run.t_grid.empty()) command("curve", run_curve);
    command("spectrum", run_spectrum);
    command("prune", run_prune);
    if (s.built.profile) command("suspend-check", run_suspend_check);
    command("perturb", run_perturb);
  }
  json list = json::array();
  std::size_t failed = 0;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    if (!c.pass) ++failed;
  }
  s.write("selftest.json", dump_json({{"checks", list}, {"failed", failed}}));
  s.report.selftest_passed = failed == 0;
  return {{"checks", checks.size()}, {"failed", failed}};
}

}  // namespace

RunReport run(const std::string& command, const RunConfig& config, const std::filesystem::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.command = command;
  report.digest = fnv1a_hex(emit_config(config));
  Session s{config, build_system(config), out_dir, report};
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());

  json summary;
  if (command == "dims") summary = run_dims(s);
  else if (command == "curve") summary = run_curve(s);
  else if (command == "spectrum") summary = run_spectrum(s);
  else if (command == "prune") summary = run_prune(s);
  else if (command == "suspend-check") summary = run_suspend_check(s);
  else if (command == "perturb") summary = run_perturb(s);
  else if (command == "selftest") summary = run_selftest(s);
  else throw ConfigError("command: unknown command \"" + command + "\"");
  for (auto it = summary.begin(); it != summary.end(); ++it) report.summary[it.key()] = it.value();

  if (config.run.record_elapsed)
    report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.files.push_back("report.json");
  std::sort(report.files.begin(), report.files.end());
  json j = {{"command", report.command},
            {"digest", report.digest},
            {"files", report.files},
            {"summary", report.summary},
            {"warnings", report.warnings}};
  if (report.elapsed_seconds) j["elapsed_seconds"] = *report.elapsed_seconds;
  s.write("report.json", dump_json(j));
  return report;
}

int run_and_report(const std::string& command, const std::string& config_path,
                   const std::optional<std::string>& out_dir) {
  try {
    const RunConfig config = load_config(config_path);
    const std::filesystem::path dir = out_dir ? *out_dir : config.run.output_dir;
    const RunReport report = run(command, config, dir);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << command << ": wrote " << report.files.size() << " files to " << dir.string() << "\n";
    if (command == "selftest" && !report.selftest_passed) {
      std::cerr << "selftest: failures recorded in " << (dir / "selftest.json").string() << "\n";
      return kExitSelftestFailed;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}

}  // namespace hspec
