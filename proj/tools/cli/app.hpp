/**
 * app.hpp — the `bellreal` command-line front end.
 *
 *   bellreal qm              quantum predictions per angle
 *   bellreal evaluate        one inequality from a JSON input file or from QM
 *   bellreal verify-theorem  vertex enumeration + random sampling of Z <= 0
 *   bellreal lhv             Monte Carlo of a hidden-variable model against
 *                            the strong inequality
 *   bellreal optimize        orientation scan
 *
 * Exit codes: 0 ok, 2 usage / invalid input, 3 degenerate denominator,
 * 4 theorem bound breached, 5 hidden-variable model contract violation.
 *
 * run() writes only to the streams it is given, so identical arguments give
 * byte-identical output.
 */

#pragma once

#include <charconv>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bellreal/bellreal.hpp"
#include "cli/json_config.hpp"

namespace bellreal::cli {

using json = nlohmann::json;

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitDegenerate = 3,
  kExitTheoremBreach = 4,
  kExitModelViolation = 5,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Json, Csv };

// ── formatting ─────────────────────────────────────────────────────────────

/// Shortest decimal that round-trips.
inline std::string number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
inline json optional_json(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

struct Meta {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::optional<double> eta;
  std::optional<double> phi_deg;

  json to_json() const {
    return {{"seed", optional_json(seed)},
            {"shots", optional_json(shots)},
            {"eta", optional_json(eta)},
            {"phi_deg", optional_json(phi_deg)}};
  }
};

inline json settings_to_json(const std::vector<LabeledAngle>& settings) {
  json arr = json::array();
  for (const auto& s : settings) arr.push_back({{"label", s.label}, {"deg", s.angle.deg()}, {"unit", "deg"}});
  return arr;
}

inline json report_to_json(const InequalityReport& r, const json& meta) {
  json inputs = json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  return {{"inequality", std::string(to_string(r.kind))},
          {"lhs", r.lhs},
          {"bound", r.bound},
          {"violation_factor", r.violation_factor},
          {"violated", r.violated()},
          {"settings", settings_to_json(r.settings)},
          {"inputs", inputs},
          {"meta", meta},
          {"notes", r.notes}};
}

inline std::string report_csv_header() { return "inequality,lhs,bound,violation_factor,violated"; }

inline std::string report_csv_row(const InequalityReport& r) {
  return std::string(to_string(r.kind)) + "," + number(r.lhs) + "," + number(r.bound) + "," +
         number(r.violation_factor) + "," + (r.violated() ? "true" : "false");
}

// ── JSON input (evaluate) ──────────────────────────────────────────────────

namespace detail {

class InputReader {
 public:
  InputReader(const json& inputs, InequalityKind kind) : inputs_(inputs), kind_(kind) {
    if (!inputs_.is_object()) throw UsageError("'inputs' must be a JSON object");
  }

  double get(const std::string& key) const {
    auto it = inputs_.find(key);
    if (it == inputs_.end()) {
      throw UsageError("missing input '" + key + "' for inequality '" + std::string(to_string(kind_)) + "'");
    }
    if (!it->is_number()) throw UsageError("input '" + key + "' must be a number");
    return it->get<double>();
  }

  JointProbabilities joint(const std::string& key) const {
    return JointProbabilities(get(key + ".pp"), get(key + ".pm"), get(key + ".mp"), get(key + ".mm"));
  }

  SinglesProbabilities singles(const std::string& key) const {
    return SinglesProbabilities(get(key + ".plus"), get(key + ".minus"));
  }

 private:
  const json& inputs_;
  InequalityKind kind_;
};

}  // namespace detail

inline std::vector<LabeledAngle> settings_from_json(const json& doc) {
  std::vector<LabeledAngle> out;
  auto it = doc.find("settings");
  if (it == doc.end() || it->is_null()) return out;
  if (!it->is_array()) throw UsageError("'settings' must be an array");
  for (const auto& s : *it) {
    if (!s.is_object() || !s.contains("label") || !s.contains("deg") || !s["deg"].is_number()) {
      throw UsageError("each setting needs a 'label' and a numeric 'deg'");
    }
    out.push_back({s["label"].get<std::string>(), Angle::degrees(s["deg"].get<double>())});
  }
  return out;
}

/// Evaluates `kind` on the flattened inputs of a report-schema document.
inline InequalityReport evaluate_inputs(InequalityKind kind, const json& inputs,
                                        std::vector<LabeledAngle> settings) {
  const detail::InputReader in(inputs, kind);
  switch (kind) {
    case InequalityKind::Bell1965:
      return bell_1965(in.get("e_ab"), in.get("e_bpa"), in.get("e_apb"), std::move(settings));
    case InequalityKind::Chsh:
      return chsh(in.get("e_ab"), in.get("e_bpa"), in.get("e_apb"), in.get("e_apbp"), std::move(settings));
    case InequalityKind::TwoChannel:
      return two_channel({in.joint("ab"), in.joint("bpa"), in.joint("apb"), in.joint("apbp"),
                          in.singles("singles_ap"), in.singles("singles_bp")},
                         std::move(settings));
    case InequalityKind::TwoChannelStrong:
      return two_channel_strong({in.joint("ab"), in.joint("bpa"), in.joint("apb"), in.joint("apbp"),
                                 in.joint("apr"), in.joint("rbp"), in.joint("rr")},
                                std::move(settings));
    case InequalityKind::TwoChannelStrongSymmetric:
      return two_channel_strong_symmetric(in.get("e_theta"), in.get("e_two_theta"), in.joint("aligned"),
                                          std::move(settings));
    case InequalityKind::Ch:
      return ch(in.get("p_phi"), in.get("p_3phi"), in.get("p_ap_inf"), in.get("p_inf_b"), in.get("p_inf_inf"),
                std::move(settings));
  }
  throw UsageError("unsupported inequality");
}

// ── shared flag groups ─────────────────────────────────────────────────────

struct ApparatusFlags {
  double eta = 1.0;
  double phi_deg = 180.0;
  std::vector<double> prisms;   // t_par, t_perp, r_par, r_perp (both arms)
  std::vector<double> prisms2;  // arm 2 override
  bool depolarization = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--eta", eta, "Detector quantum efficiency in (0, 1]")->capture_default_str();
    cmd->add_option("--phi-deg", phi_deg, "Detector half-angle in degrees, (0, 180]")->capture_default_str();
    cmd->add_option("--prisms", prisms, "Prism transmittances t_par,t_perp,r_par,r_perp (default ideal)")
        ->delimiter(',')
        ->expected(4);
    cmd->add_option("--prisms2", prisms2, "Arm-2 transmittances if they differ from --prisms")
        ->delimiter(',')
        ->expected(4);
    cmd->add_flag("--depolarization", depolarization, "Apply the small-aperture depolarization factor");
  }

  static ArmOptics optics(const std::vector<double>& v, const char* flag) {
    if (v.empty()) return ArmOptics::ideal();
    if (v.size() != 4) throw UsageError(std::string(flag) + " needs four values t_par,t_perp,r_par,r_perp");
    return ArmOptics(v[0], v[1], v[2], v[3]);
  }

  Apparatus build() const {
    const ArmOptics arm1 = optics(prisms, "--prisms");
    const ArmOptics arm2 = prisms2.empty() ? arm1 : optics(prisms2, "--prisms2");
    return Apparatus(eta, Angle::degrees(phi_deg), arm1, arm2, depolarization);
  }
};

/// Notes attached when the apparatus is evaluated outside the depolarization
/// approximation's comfort zone.
inline std::vector<std::string> apparatus_notes(const Apparatus& app) {
  std::vector<std::string> notes;
  if (app.use_depolarization() && quantum::depolarization(app.phi()).approximate) {
    notes.push_back("depolarization factor evaluated outside the small-aperture regime (phi > " +
                    number(quantum::kSmallApertureLimitDeg) + " deg)");
  }
  return notes;
}

struct SettingFlags {
  SettingSet values = SettingSet::maximal_violation();
  double a = 30, b = 60, ap = 0, bp = 0, r = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--a-deg", a, "Arm-1 setting a")->capture_default_str();
    cmd->add_option("--b-deg", b, "Arm-2 setting b")->capture_default_str();
    cmd->add_option("--ap-deg", ap, "Arm-1 setting a'")->capture_default_str();
    cmd->add_option("--bp-deg", bp, "Arm-2 setting b'")->capture_default_str();
    cmd->add_option("--r-deg", r, "Reference orientation r")->capture_default_str();
  }

  SettingSet build() const {
    return {Angle::degrees(a), Angle::degrees(b), Angle::degrees(ap), Angle::degrees(bp), Angle::degrees(r)};
  }
};

inline InequalityKind parse_kind(const std::string& name) {
  if (auto k = parse_inequality(name)) return *k;
  throw UsageError("unknown inequality '" + name + "'");
}

inline const std::map<std::string, InequalityKind>& kind_map() {
  static const std::map<std::string, InequalityKind> m = [] {
    std::map<std::string, InequalityKind> out;
    for (auto k : kAllInequalities) out.emplace(std::string(to_string(k)), k);
    return out;
  }();
  return m;
}

// ── subcommands ────────────────────────────────────────────────────────────

struct QmCommand {
  ApparatusFlags apparatus;
  std::vector<double> angles{0, 30, 60};
  bool ideal = false;

  int run(Format format, std::ostream& out) const {
    std::optional<Apparatus> app;
    std::vector<std::string> notes;
    if (!ideal) {
      app = apparatus.build();
      notes = apparatus_notes(*app);
    }
    struct Row {
      double theta;
      double e;
      JointProbabilities j;
      SinglesProbabilities s;
    };
    std::vector<Row> rows;
    for (double theta : angles) {
      if (ideal) {
        const auto p = quantum::ideal_predictions(separation(Angle::degrees(theta), Angle::degrees(0)));
        rows.push_back({theta, p.correlation, p.joint, p.singles});
      } else {
        const auto j = quantum::real_joint(*app, Angle::degrees(theta), Angle::degrees(0));
        rows.push_back({theta, expectation(j), j, quantum::real_singles(*app)});
      }
    }

    if (format == Format::Csv) {
      out << "theta_deg,E,pp,pm,mp,mm,p_plus,p_minus\n";
      for (const auto& r : rows) {
        out << number(r.theta) << ',' << number(r.e) << ',' << number(r.j.pp()) << ',' << number(r.j.pm()) << ','
            << number(r.j.mp()) << ',' << number(r.j.mm()) << ',' << number(r.s.p_plus()) << ','
            << number(r.s.p_minus()) << '\n';
      }
      return kExitOk;
    }
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"theta_deg", r.theta},
                     {"E", r.e},
                     {"pp", r.j.pp()},
                     {"pm", r.j.pm()},
                     {"mp", r.j.mp()},
                     {"mm", r.j.mm()},
                     {"p_plus", r.s.p_plus()},
                     {"p_minus", r.s.p_minus()}});
    }
    Meta meta;
    json depol = nullptr;
    if (app) {
      meta.eta = app->eta();
      meta.phi_deg = app->phi().deg();
      depol = quantum::effective_depolarization(*app);
    }
    json doc = {{"branch", ideal ? "ideal" : "real"}, {"unit", "deg"},    {"rows", arr},
                {"depolarization", depol},          {"meta", meta.to_json()}, {"notes", notes}};
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
};

struct EvaluateCommand {
  std::string inequality;
  std::string input;
  std::string from_qm;
  ApparatusFlags apparatus;
  SettingFlags settings;

  int run(Format format, std::ostream& out) const {
    InequalityReport report{};
    json meta;
    if (!input.empty()) {
      std::ifstream file(input);
      if (!file) throw UsageError("cannot open input file '" + input + "'");
      json doc;
      try {
        file >> doc;
      } catch (const json::exception& e) {
        throw UsageError("input file '" + input + "' is not valid JSON: " + e.what());
      }
      if (!doc.is_object()) throw UsageError("input file must hold a JSON object");
      std::string name = inequality;
      if (name.empty()) {
        if (!doc.contains("inequality") || !doc["inequality"].is_string()) {
          throw UsageError("no --inequality given and the input file names none");
        }
        name = doc["inequality"].get<std::string>();
      }
      if (!doc.contains("inputs")) throw UsageError("input file has no 'inputs' object");
      report = evaluate_inputs(parse_kind(name), doc["inputs"], settings_from_json(doc));
      meta = doc.contains("meta") && doc["meta"].is_object() ? doc["meta"] : Meta{}.to_json();
    } else if (!from_qm.empty()) {
      if (inequality.empty()) throw UsageError("--from-qm needs --inequality");
      const InequalityKind kind = parse_kind(inequality);
      Meta m;
      std::vector<std::string> notes;
      optimizer::ProbabilitySource source = optimizer::IdealQuantumSource{};
      if (from_qm == "real") {
        const Apparatus app = apparatus.build();
        notes = apparatus_notes(app);
        m.eta = app.eta();
        m.phi_deg = app.phi().deg();
        source = optimizer::RealQuantumSource{app};
      } else if (from_qm != "ideal") {
        throw UsageError("--from-qm must be 'ideal' or 'real'");
      }
      try {
        report = optimizer::evaluate(kind, source, settings.build());
      } catch (const CapabilityError& e) {
        throw UsageError(e.what());
      }
      report.notes = notes;
      meta = m.to_json();
    } else {
      throw UsageError("evaluate needs --input FILE or --from-qm {ideal,real}");
    }

    if (format == Format::Csv) {
      out << report_csv_header() << '\n' << report_csv_row(report) << '\n';
    } else {
      out << report_to_json(report, meta).dump(2) << '\n';
    }
    return kExitOk;
  }
};

struct VerifyTheoremCommand {
  double u = 1.0;
  double v = 1.0;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 42;

  static json point_json(const theorem::ZInputs& p) {
    return {{"x1p", p.x1p}, {"x1m", p.x1m}, {"x2p", p.x2p}, {"x2m", p.x2m},
            {"y1p", p.y1p}, {"y1m", p.y1m}, {"y2p", p.y2p}, {"y2m", p.y2m}};
  }

  int run(Format format, unsigned threads, std::ostream& out) const {
    const auto vertices = theorem::verify_vertices(u, v);
    const auto sampled = theorem::verify_random(u, v, samples, seed, threads);
    const double tolerance = theorem::kTolerance * std::max(1.0, u) * std::max(1.0, v);
    const bool holds = vertices.max_z <= tolerance && sampled.max_z <= vertices.max_z + tolerance;

    if (format == Format::Csv) {
      out << "u,v,vertex_max_z,sampled_max_z,samples,seed,tolerance,bound_holds\n"
          << number(u) << ',' << number(v) << ',' << number(vertices.max_z) << ',' << number(sampled.max_z) << ','
          << samples << ',' << seed << ',' << number(tolerance) << ',' << (holds ? "true" : "false") << '\n';
    } else {
      json doc = {{"u", u},
                  {"v", v},
                  {"vertex", {{"max_z", vertices.max_z}, {"argmax", point_json(vertices.argmax)}, {"count", 256}}},
                  {"random", {{"max_z", sampled.max_z}, {"argmax", point_json(sampled.argmax)}, {"samples", samples}}},
                  {"tolerance", tolerance},
                  {"bound_holds", holds},
                  {"meta", Meta{seed, samples, std::nullopt, std::nullopt}.to_json()}};
      out << doc.dump(2) << '\n';
    }
    return holds ? kExitOk : kExitTheoremBreach;
  }
};

struct LhvCommand {
  std::string model = "malus-product";
  double d = 1.0;
  std::uint64_t shots = 1000000;
  std::uint64_t seed = 0;
  bool check_assumptions = true;
  std::uint64_t lambdas = 10000;
  SettingFlags settings;

  static json check_json(const lhv::AssumptionCheck& c) {
    json witness = nullptr;
    if (c.witness) {
      witness = {{"hidden_state", c.witness->hidden_state},
                 {"arm", c.witness->arm == Arm::One ? 1 : 2},
                 {"setting_deg", c.witness->setting.deg()},
                 {"channel", std::string(1, c.witness->channel)},
                 {"probability", c.witness->probability},
                 {"reference_sum", c.witness->reference_sum}};
    }
    return {{"passed", c.passed}, {"lambdas_checked", c.lambdas_checked}, {"witness", witness}};
  }

  static json ledger_json(const lhv::CountLedger& l) {
    return {{"n_pp", l.n_pp}, {"n_pm", l.n_pm}, {"n_mp", l.n_mp}, {"n_mm", l.n_mm}, {"n_p0", l.n_p0},
            {"n_m0", l.n_m0}, {"n_0p", l.n_0p}, {"n_0m", l.n_0m}, {"n_00", l.n_00}, {"n_total", l.n_total}};
  }

  int run(Format format, unsigned threads, std::ostream& out) const {
    const lhv::BuiltinModel m = lhv::make_builtin(model, d);
    const SettingSet s = settings.build();
    const auto experiment = lhv::strong_experiment(m, s, shots, seed, threads);
    const double ceiling = 1.0 + 3.0 * experiment.sigma;
    const bool within = experiment.report.lhs <= ceiling;

    std::optional<lhv::AssumptionCheck> supplementary, gr;
    if (check_assumptions) {
      const std::vector<Angle> probe{s.a, s.b, s.a_prime, s.b_prime};
      supplementary = lhv::check_supplementary(m, probe, s.r, lambdas, derive_seed(seed, 100));
      gr = lhv::check_gr(m, probe, s.r, lambdas, derive_seed(seed, 101));
    }

    if (format == Format::Csv) {
      auto verdict = [](const std::optional<lhv::AssumptionCheck>& c) -> std::string {
        return c ? (c->passed ? "pass" : "fail") : "skipped";
      };
      out << "model,d,shots,seed," << report_csv_header() << ",sigma,within_local_bound,supplementary,gr\n"
          << model << ',' << number(d) << ',' << shots << ',' << seed << ',' << report_csv_row(experiment.report)
          << ',' << number(experiment.sigma) << ',' << (within ? "true" : "false") << ',' << verdict(supplementary)
          << ',' << verdict(gr) << '\n';
      return kExitOk;
    }

    json doc = report_to_json(experiment.report, Meta{seed, shots, std::nullopt, std::nullopt}.to_json());
    doc["model"] = {{"name", model}, {"d", d}};
    doc["sigma"] = experiment.sigma;
    doc["local_bound_3sigma"] = ceiling;
    doc["within_local_bound"] = within;
    static constexpr const char* kPairs[] = {"ab", "bpa", "apb", "apbp", "apr", "rbp", "rr"};
    json counts = json::object();
    for (std::size_t k = 0; k < experiment.runs.size(); ++k) counts[kPairs[k]] = ledger_json(experiment.runs[k].ledger);
    doc["counts"] = counts;
    doc["assumptions"] = check_assumptions
                             ? json{{"reference_deg", s.r.deg()},
                                    {"supplementary", check_json(*supplementary)},
                                    {"gr", check_json(*gr)}}
                             : json(nullptr);
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
};

struct OptimizeCommand {
  std::string inequality = "strong-symmetric";
  std::string source = "ideal";
  ApparatusFlags apparatus;
  std::string model = "noise";
  double d = 1.0;
  std::uint64_t quadrature_points = lhv::kDefaultQuadraturePoints;
  double grid = 5.0;
  double tolerance = optimizer::kDefaultRefineToleranceDeg;
  std::string out_csv;
  bool full_grid = false;

  int run(Format format, unsigned threads, std::ostream& out) const {
    const InequalityKind kind = parse_kind(inequality);
    if (kind == InequalityKind::Ch) throw UsageError("ch cannot be optimized: no built-in one-channel source");
    Meta meta;
    json model_json = nullptr;
    optimizer::ProbabilitySource src = optimizer::IdealQuantumSource{};
    if (source == "real") {
      const Apparatus app = apparatus.build();
      meta.eta = app.eta();
      meta.phi_deg = app.phi().deg();
      src = optimizer::RealQuantumSource{app};
    } else if (source == "lhv") {
      src = optimizer::LhvQuadratureSource{lhv::make_builtin(model, d), quadrature_points};
      model_json = {{"name", model}, {"d", d}, {"quadrature_points", quadrature_points}};
    } else if (source != "ideal") {
      throw UsageError("--source must be ideal, real or lhv");
    }

    if (full_grid) {
      const auto best = optimizer::scan_full(kind, src, grid, threads);
      if (format == Format::Csv) {
        out << "inequality,source,mode,a_deg,b_deg,ap_deg,best_lhs\n"
            << inequality << ',' << source << ",full-grid," << number(best.best_settings.a.deg()) << ','
            << number(best.best_settings.b.deg()) << ',' << number(best.best_settings.a_prime.deg()) << ','
            << number(best.best_lhs) << '\n';
        return kExitOk;
      }
      json doc = {{"inequality", inequality},
                  {"source", source},
                  {"mode", "full-grid"},
                  {"best_lhs", best.best_lhs},
                  {"settings", settings_to_json(best.best_settings.labeled())},
                  {"grid_step_deg", grid},
                  {"evaluations", best.evaluations},
                  {"model", model_json},
                  {"meta", meta.to_json()}};
      out << doc.dump(2) << '\n';
      return kExitOk;
    }

    const auto scan = optimizer::scan_symmetric(kind, src, grid, tolerance, threads);
    if (!out_csv.empty()) {
      std::ofstream file(out_csv);
      if (!file) throw UsageError("cannot write scan curve to '" + out_csv + "'");
      file << "t_deg,lhs\n";
      for (const auto& p : scan.curve) file << number(p.t_deg) << ',' << number(p.lhs) << '\n';
    }
    if (format == Format::Csv) {
      out << "inequality,source,mode,best_t_deg,best_lhs\n"
          << inequality << ',' << source << ",symmetric," << number(scan.best_t_deg) << ',' << number(scan.best_lhs)
          << '\n';
      return kExitOk;
    }
    json doc = {{"inequality", inequality},
                {"source", source},
                {"mode", "symmetric"},
                {"best_t_deg", scan.best_t_deg},
                {"best_lhs", scan.best_lhs},
                {"settings", settings_to_json(scan.best_settings.labeled())},
                {"grid_step_deg", grid},
                {"tolerance_deg", tolerance},
                {"curve_points", scan.curve.size()},
                {"model", model_json},
                {"meta", meta.to_json()}};
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
};

// ── entry point ────────────────────────────────────────────────────────────

/// Maps an escaped exception to an exit code, writing a diagnostic to err.
inline int exit_code_for(std::exception_ptr error, std::ostream& err) {
  try {
    std::rethrow_exception(error);
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const ModelContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitModelViolation;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-channel Bell inequality laboratory", "bellreal"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");
  app.fallthrough();
  app.require_subcommand(1);

  std::string format_name = "json";
  unsigned threads = default_threads();
  app.add_option("--format", format_name, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  QmCommand qm;
  auto* qm_cmd = app.add_subcommand("qm", "Quantum predictions per polarizer separation");
  qm.apparatus.attach(qm_cmd);
  qm_cmd->add_option("--angles", qm.angles, "Separations a - b in degrees")->delimiter(',');
  qm_cmd->add_flag("--ideal", qm.ideal, "Ideal polarizers and detectors");

  EvaluateCommand evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate one inequality");
  eval_cmd->add_option("--inequality", evaluate.inequality, "Inequality name")
      ->check(CLI::IsMember(kind_map()));
  eval_cmd->add_option("--input", evaluate.input, "JSON file in report schema (uses its 'inputs')");
  eval_cmd->add_option("--from-qm", evaluate.from_qm, "Derive inputs from quantum predictions")
      ->check(CLI::IsMember({"ideal", "real"}));
  evaluate.apparatus.attach(eval_cmd);
  evaluate.settings.attach(eval_cmd);

  VerifyTheoremCommand verify;
  auto* verify_cmd = app.add_subcommand("verify-theorem", "Check Z <= 0 on the box");
  verify_cmd->add_option("--u", verify.u, "Cap U on the x variables")->capture_default_str();
  verify_cmd->add_option("--v", verify.v, "Cap V on the y variables")->capture_default_str();
  verify_cmd->add_option("--samples", verify.samples, "Random samples")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "Seed")->capture_default_str();

  LhvCommand lhv_run;
  auto* lhv_cmd = app.add_subcommand("lhv", "Monte Carlo of a local hidden-variable model");
  lhv_cmd->add_option("--model", lhv_run.model, "noise | malus-product | threshold")->capture_default_str();
  lhv_cmd->add_option("--d", lhv_run.d, "Detection scale d in (0, 1]")->capture_default_str();
  lhv_cmd->add_option("--shots", lhv_run.shots, "Emissions per setting pair")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  lhv_cmd->add_option("--seed", lhv_run.seed, "Seed")->capture_default_str();
  lhv_cmd->add_flag("--check-assumptions,!--no-check-assumptions", lhv_run.check_assumptions,
                    "Check the supplementary and GR assumptions on sampled hidden states");
  lhv_cmd->add_option("--lambdas", lhv_run.lambdas, "Hidden states sampled by the assumption checks")
      ->capture_default_str();
  lhv_run.settings.attach(lhv_cmd);

  OptimizeCommand optimize;
  auto* opt_cmd = app.add_subcommand("optimize", "Scan orientations for the largest left side");
  opt_cmd->add_option("--inequality", optimize.inequality, "Inequality name")
      ->check(CLI::IsMember(kind_map()))
      ->capture_default_str();
  opt_cmd->add_option("--source", optimize.source, "ideal | real | lhv")
      ->check(CLI::IsMember({"ideal", "real", "lhv"}))
      ->capture_default_str();
  optimize.apparatus.attach(opt_cmd);
  opt_cmd->add_option("--model", optimize.model, "LHV model for --source lhv")->capture_default_str();
  opt_cmd->add_option("--d", optimize.d, "LHV detection scale")->capture_default_str();
  opt_cmd->add_option("--quadrature-points", optimize.quadrature_points, "Quadrature nodes for LHV sources")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  opt_cmd->add_option("--grid", optimize.grid, "Grid step in degrees, (0, 15]")->capture_default_str();
  opt_cmd->add_option("--tolerance", optimize.tolerance, "Refinement tolerance in degrees")->capture_default_str();
  opt_cmd->add_option("--out", optimize.out_csv, "Write the scan curve (t_deg,lhs) to this CSV file");
  opt_cmd->add_flag("--full-grid", optimize.full_grid, "Scan a, b, a' independently (b' = r = 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Format format = format_name == "csv" ? Format::Csv : Format::Json;
  try {
    if (*qm_cmd) return qm.run(format, out);
    if (*eval_cmd) return evaluate.run(format, out);
    if (*verify_cmd) return verify.run(format, threads, out);
    if (*lhv_cmd) return lhv_run.run(format, threads, out);
    if (*opt_cmd) return optimize.run(format, threads, out);
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
  return kExitUsage;
}

/// Convenience overload; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"bellreal"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace bellreal::cli
