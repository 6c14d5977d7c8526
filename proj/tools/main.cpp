#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hitdyn/cocycle.hpp"
#include "hitdyn/entropy.hpp"
#include "hitdyn/hitting.hpp"
#include "hitdyn/irregular.hpp"
#include "presets.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hitdyn;

namespace {

enum Exit { kOk = 0, kRefuted = 1, kConfig = 2, kBudget = 3 };

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Param {
  std::string key;
  CLI::Option* opt;
  std::function<void(const json&)> set;
  std::function<json()> get;
};

struct Command {
  std::string name;  // config section name
  CLI::App* app = nullptr;
  std::string preset;
  std::vector<Param> params;
  std::function<int()> run;

  template <class T>
  CLI::Option* add(const std::string& key, T& var, const std::string& help) {
    CLI::Option* o = app->add_option("--" + key, var, help)->capture_default_str();
    if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>) o->delimiter(',');
    params.push_back({key, o, [&var](const json& j) { var = j.get<T>(); }, [&var] { return json(var); }});
    return o;
  }
};

struct Globals {
  std::uint64_t seed = 1;
  std::string out = "hitdyn_out";
  std::string config;
} g;

struct Run {
  std::string command;
  json config;
  std::ostringstream report;

  std::string header() const {
    return "# hitdyn " + command + "\n# seed " + std::to_string(g.seed) + "\n# config " + config.dump() + "\n";
  }
  void csv(const std::string& suffix, const std::string& body) const {
    fs::create_directories(g.out);
    const fs::path p = fs::path(g.out) / (file_stem() + (suffix.empty() ? "" : "_" + suffix) + ".csv");
    std::ofstream f(p);
    f << header() << body;
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + p.string());
  }
  void text(const std::string& suffix, const std::string& body) const {
    fs::create_directories(g.out);
    std::ofstream f(fs::path(g.out) / (file_stem() + "_" + suffix + ".txt"));
    f << header() << body;
  }
  void finish() const {
    text("report", report.str());
    std::cout << header() << report.str();
  }
  std::string file_stem() const {
    std::string s = command;
    for (char& c : s)
      if (c == ' ') c = '_';
    return s;
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

Word parse_word(const std::string& s) {
  Word w;
  for (const auto& t : split(s, ',')) {
    try {
      w.push_back(std::stoi(t));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad symbol '" + t + "'");
    }
  }
  return w;
}

std::vector<Word> parse_words(const std::string& s) {
  std::vector<Word> out;
  for (const auto& t : split(s, ';')) out.push_back(parse_word(t));
  return out;
}

// Columns separated by ';', entries by ','.
Eigen::MatrixXd parse_columns(const std::string& s, int d) {
  const auto cols = split(s, ';');
  Eigen::MatrixXd m(d, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto e = split(cols[j], ',');
    if (static_cast<int>(e.size()) != d) throw Error(ErrorCode::InvalidArgument, "column '" + cols[j] + "' needs " + std::to_string(d) + " entries");
    for (int i = 0; i < d; ++i) m(i, static_cast<Eigen::Index>(j)) = std::stod(e[static_cast<std::size_t>(i)]);
  }
  return m;
}

WordStream parse_omega(const std::string& s, int kappa) {
  if (s == "random") return WordStream::random({}, kappa, g.seed);
  const Word w = parse_word(s);
  if (w.empty()) throw Error(ErrorCode::InvalidArgument, "omega must be 'random' or a periodic word like 1,2");
  for (Symbol x : w)
    if (x < 1 || x > kappa) throw Error(ErrorCode::BadSymbol, "symbol " + std::to_string(x) + " outside 1.." + std::to_string(kappa));
  return WordStream::periodic({}, w);
}

Point make_point(const Space& sp, const std::vector<double>& c) {
  auto need = [&](std::size_t k) {
    if (c.size() != k) throw Error(ErrorCode::InvalidArgument, "point on " + sp.name() + " needs " + std::to_string(k) + " coordinates");
  };
  switch (sp.kind) {
    case SpaceKind::Circle: need(1); return Point::circle(c[0]);
    case SpaceKind::Torus: need(static_cast<std::size_t>(sp.dim)); return Point::torus(c);
    case SpaceKind::Sphere2: {
      need(3);
      const double r = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
      if (r == 0) throw Error(ErrorCode::ZeroVector, "sphere point must be nonzero");
      return Point::sphere2(c[0] / r, c[1] / r, c[2] / r);
    }
    case SpaceKind::Projective: need(static_cast<std::size_t>(sp.dim)); return Point::projective(c);
    case SpaceKind::Symbolic: break;
  }
  throw Error(ErrorCode::InvalidArgument, "points on symbolic spaces cannot be given as coordinates");
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Observable make_psi(const std::string& name) {
  if (name == "cos") return [](const Point& p) { return std::cos(2 * kPi * p[0]); };
  if (name == "sin") return [](const Point& p) { return std::sin(2 * kPi * p[0]); };
  if (name == "coord") return [](const Point& p) { return p[0]; };
  throw Error(ErrorCode::InvalidArgument, "psi must be one of cos, sin, coord");
}

Cocycle load_cocycle(const std::string& preset, const std::string& file) {
  if (!file.empty()) {
    std::ifstream f(file);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read cocycle file " + file);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_cocycle(ss.str());
  }
  auto p = presets::load(preset);
  if (!p.cocycle) throw Error(ErrorCode::InvalidArgument, "preset '" + preset + "' has no cocycle");
  return *p.cocycle;
}

int code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::BudgetExceeded:
    case ErrorCode::DepthOverflow:
    case ErrorCode::NetTooLarge: return kBudget;
    case ErrorCode::NotHyperbolic:
    case ErrorCode::NotInvariant:
    case ErrorCode::TransitionNotFound:
    case ErrorCode::BasinCheckFailed: return kRefuted;
    default: return kConfig;
  }
}

// ---- result writers shared by commands and examples ----

int emit_hitting(Run& r, const HittingResult& res, const GeneratorSystem& sys, const std::string& suffix) {
  if (res.certified) {
    const auto& c = res.certificate;
    std::ostringstream os;
    os << "base,target,level,contained_radius,length,word\n";
    std::size_t verified = 0, checked = 0;
    for (std::size_t i = 0; i < c.witnesses.size(); ++i) {
      const auto& w = c.witnesses[i];
      os << w.base << ',' << w.target << ',' << w.level << ',' << num(w.contained_radius) << ',' << w.word.size() << ','
         << run_length(w.word) << '\n';
      if (i < 256) {
        ++checked;
        verified += verify_witness(sys, c, w, 16, g.seed + i);
      }
    }
    r.csv(suffix, os.str());
    r.report << "certified " << (suffix.empty() ? "" : suffix + " ") << "eps " << num(c.eps) << " delta " << num(c.delta)
             << " K " << c.K << " witnesses " << c.witnesses.size() << " nodes " << c.nodes
             << (c.translation_reduced ? " translation-reduced" : "") << " re-verified " << verified << "/" << checked
             << "\n";
    return kOk;
  }
  const auto& f = res.refutation;
  std::ostringstream os;
  os << "p,best_log_radius\n";
  for (std::size_t p = 0; p < f.best_log_radius.size(); ++p) os << p << ',' << num(f.best_log_radius[p]) << '\n';
  r.csv(suffix, os.str());
  r.report << "refutation-evidence " << (suffix.empty() ? "" : suffix + " ") << f.reason << "\n  base " << f.base.str()
           << " target " << f.target.str() << " radius " << num(f.target_radius) << " K_max " << f.K_max
           << "\n  decay_slope " << num(f.decay_slope) << "\n  " << f.note << "\n";
  return kRefuted;
}

std::string spectrum_row(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

void emit_trace(Run& r, const std::string& suffix, const std::vector<BirkhoffTrace>& traces, std::size_t stride) {
  std::ostringstream os;
  os << "m";
  for (const auto& t : traces) os << ',' << t.label;
  os << '\n';
  const std::size_t n = traces.empty() ? 0 : traces[0].averages.size();
  for (std::size_t m = 1; m <= n; ++m) {
    if (m % stride != 0 && m != n && m != 1) continue;
    os << m;
    for (const auto& t : traces) os << ',' << num(t.averages[m - 1]);
    os << '\n';
  }
  r.csv(suffix, os.str());
}

int emit_irregular(Run& r, const IrregularWitness& w, const WitnessAudit& a, const std::string& suffix) {
  std::ostringstream os;
  os << "level,checkpoint,average,recomputed,lower,upper\n";
  for (std::size_t k = 0; k < w.checkpoints.size(); ++k)
    os << k + 1 << ',' << w.checkpoints[k] << ',' << num(w.averages[k]) << ','
       << (k < a.recomputed.size() ? num(a.recomputed[k]) : "") << ',' << num(w.lower[k]) << ',' << num(w.upper[k]) << '\n';
  r.csv(suffix, os.str());
  r.text(suffix.empty() ? "witness" : suffix + "_witness", serialize_witness(w));
  r.report << "irregular " << (suffix.empty() ? "" : suffix + " ") << "depth " << w.achieved_depth << " of "
           << w.requested_depth << (w.complete ? " complete" : " incomplete") << "\n  eps " << num(w.eps) << " eps0 "
           << num(w.eps0) << " L " << num(w.L) << " certified_gap " << num(w.certified_gap)
           << "\n  audit ok " << a.ok << " nested " << a.nested << " bounds " << a.bounds_hold
           << " max_average_error " << num(a.max_average_error) << "\n  word " << run_length(w.word).substr(0, 400)
           << (w.note.empty() ? "" : "\n  note " + w.note) << "\n";
  return w.complete ? kOk : kBudget;
}

int emit_direction(Run& r, const DirectionWitness& w, const std::string& suffix) {
  std::ostringstream os;
  os << "checkpoint,exponent,high\n";
  for (std::size_t k = 0; k < w.checkpoints.size(); ++k)
    os << w.checkpoints[k] << ',' << num(w.exponents[k]) << ',' << (w.high[k] ? 1 : 0) << '\n';
  r.csv(suffix, os.str());
  std::string runs;
  for (const auto& [s, len] : w.runs) runs += (runs.empty() ? "" : " ") + std::to_string(s) + "^" + std::to_string(len);
  r.report << "irregular-direction " << (suffix.empty() ? "" : suffix + " ")
           << (w.mode == DirectionMode::Blocks ? "blocks" : "cones") << " depth " << w.achieved_depth << " of "
           << w.requested_depth << (w.complete ? " complete" : " incomplete") << "\n  high_min " << num(w.high_min)
           << " low_max " << num(w.low_max) << "\n  runs " << runs.substr(0, 400)
           << (w.note.empty() ? "" : "\n  note " + w.note) << "\n";
  return w.complete ? kOk : kBudget;
}

void emit_entropy(Run& r, const EntropyEstimate& e, const std::string& suffix) {
  r.csv(suffix, entropy_csv(e));
  r.report << "entropy " << (suffix.empty() ? "" : suffix + " ") << "value " << num(e.value)
           << (e.reliable ? "" : " unreliable") << (e.lower_bound ? " lower-bound" : "") << "\n  slopes "
           << spectrum_row(e.slopes) << "\n  residuals " << spectrum_row(e.residuals)
           << (e.note.empty() ? "" : "\n  note " + e.note) << "\n";
}

DirectionMode parse_mode(const std::string& s) {
  if (s == "auto") return DirectionMode::Auto;
  if (s == "blocks") return DirectionMode::Blocks;
  if (s == "cones") return DirectionMode::Cones;
  throw Error(ErrorCode::InvalidArgument, "mode must be auto, blocks or cones");
}

// ---- examples ----

int example(Run& r, const std::string& name) {
  const auto p = presets::load(name);
  r.report << "preset " << p.name << ": " << p.description << "\n";
  const auto audit = audit_generators(p.system, 2000, g.seed);
  r.report << "generator audit ok " << audit.ok << " max_inverse_error " << num(audit.max_inverse_error) << "\n";
  int status = audit.ok ? kOk : kRefuted;
  auto keep = [&](int s) {
    if (s == kBudget || (s == kRefuted && status == kOk)) status = s;
  };

  if (name == "golden-rotation") {
    std::ostringstream os;
    os << "eps,K,bound\n";
    for (double eps : {0.2, 0.1, 0.05}) {
      auto res = certify_frequent_hitting(p.system, eps, 200, eps / 8, g.seed);
      const int bound = static_cast<int>(std::floor(3 / eps)) + 1;
      os << num(eps) << ',' << (res.certified ? res.certificate.K : -1) << ',' << bound << '\n';
      r.report << "eps " << num(eps) << " K " << (res.certified ? std::to_string(res.certificate.K) : "none")
               << " bound " << bound << "\n";
      if (!res.certified || res.certificate.K > bound) status = kRefuted;
    }
    r.csv("hitting", os.str());
  } else if (name == "t3-translations" || name == "s2-rotations") {
    const double eps = name == "t3-translations" ? 0.4 : 1.0;
    keep(emit_hitting(r, certify_frequent_hitting(p.system, eps, 200, eps / 8, g.seed), p.system, "hitting"));
  } else if (name == "symplectic-center") {
    const double t1 = 2 * kPi * (std::sqrt(2.0) - 1), t2 = 2 * kPi * (std::sqrt(3.0) - 1);
    const auto res = symplectic_center_check(t1, t2, 50);
    r.report << "symplectic scan order 50: " << (res.resonant ? "Resonant" : "NonResonant") << " residual "
             << num(res.residual) << "\n";
    const auto lyap = lyapunov_spectrum(*p.cocycle, WordStream::constant({}, 1), 20000);
    r.report << "lyapunov spectrum " << spectrum_row(lyap) << "\n";
    if (res.resonant) status = kRefuted;
  } else if (name == "cat-map") {
    HittingResult h = certify_frequent_hitting(p.system, 0.1, 50, 0.0125, g.seed);
    emit_hitting(r, h, p.system, "hitting");
    const auto cp = hyperbolic_cones(presets::cat_matrix());
    const auto ca = audit_cones(cp, presets::cat_matrix(), 10000, 30, g.seed);
    r.report << "cones theta " << num(cp.theta) << " audit ok " << ca.ok() << "\n";
    EntropyOptions eo;
    eo.candidate_delta = 0.001;
    eo.seed = g.seed;
    emit_entropy(r, topological_entropy_estimate(p.system, {0.25, 0.2}, {1, 2, 3, 4, 5, 6}, eo), "entropy");
  } else if (name == "morse-smale-rotation") {
    auto ms = presets::morse_smale();
    ms.options.seed = g.seed;
    auto w = construct_irregular_point(ms.system, ms.psi, ms.x1, ms.I1, ms.x2, ms.I2, 0.1, 8, ms.options);
    keep(emit_irregular(r, w, audit_witness(ms.system, ms.psi, w), "irregular"));
  } else if (name == "different-types-A") {
    std::vector<BirkhoffTrace> traces;
    Rng rng(g.seed);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd v(3);
      v << nd(rng), nd(rng), nd(rng);
      auto t = directional_exponent_trace(*p.cocycle, WordStream::random({}, 2, g.seed + i), v, 5000);
      t.label = "v" + std::to_string(i + 1);
      r.report << t.label << " exponent at n=5000 " << num(t.averages.back()) << " (log 3 = " << num(std::log(3.0)) << ")\n";
      traces.push_back(std::move(t));
    }
    emit_trace(r, "traces", traces, 50);
  } else if (name == "different-types-B") {
    Eigen::VectorXd v(3);
    v << 1, 1, 1;
    DirectionOptions o;
    keep(emit_direction(r, irregular_direction(*p.cocycle, v, 0.1, 6, o), "direction"));
    const auto dom = domination_test(*p.cocycle, parse_columns("0,1,0;0,0,1", 3), parse_columns("1,0,0", 3), 6);
    r.report << "domination " << (dom.dominated ? "k " + std::to_string(dom.k) : "none") << "\n";
    const auto sr = spectrum_report(*p.cocycle, {{1}, {2}});
    r.report << "spectra " << sr.verdict << " max_deviation " << num(sr.max_deviation) << "\n";
  } else if (name == "irreducible-vs-accessible-A" || name == "irreducible-vs-accessible-B") {
    keep(emit_hitting(r, accessibility_certify(*p.cocycle, 0.2, 40, 0.02, g.seed), p.system, "accessibility"));
    for (int s = 1; s <= p.cocycle->kappa(); ++s)
      r.report << "rotation number A" << s << " " << num(rotation_number(Eigen::Matrix2d(p.cocycle->at(s)))) << "\n";
  } else if (name == "constant-hyperbolic") {
    const auto& m = p.cocycle->at(1);
    const auto cp = hyperbolic_cones(m);
    const auto ca = audit_cones(cp, m, 10000, 30, g.seed);
    r.report << "cones dim+ " << cp.dim_plus << " dim- " << cp.dim_minus << " theta " << num(cp.theta) << " audit ok "
             << ca.ok() << "\n";
    r.report << "lyapunov spectrum " << spectrum_row(lyapunov_spectrum(*p.cocycle, WordStream::constant({}, 1), 20000))
             << "\n";
    if (!ca.ok()) status = kRefuted;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hitdyn: hitting times, irregular points, Lyapunov exponents and entropy of semigroup actions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "random seed (recorded in every output)")->capture_default_str();
  app.add_option("--out", g.out, "output directory for CSV files and reports")->capture_default_str();
  app.add_option("--config", g.config, "JSON config; top-level keys and a section named after the command set defaults");

  std::vector<std::unique_ptr<Command>> cmds;
  auto make = [&](CLI::App* parent, const std::string& name, const std::string& section, const std::string& help,
                  const std::string& preset = "") {
    cmds.push_back(std::make_unique<Command>());
    Command& c = *cmds.back();
    c.name = section;
    c.preset = preset;
    c.app = parent->add_subcommand(name, help);
    return &c;
  };
  Run run;

  // hitting-certify
  double eps = 0.1, delta = 0;
  int kmax = 64;
  std::size_t node_budget = 4000000;
  {
    auto* c = make(&app, "hitting-certify", "hitting-certify", "certify frequent hitting times K(eps)", "golden-rotation");
    c->add("preset", c->preset, "system preset");
    c->add("eps", eps, "ball radius");
    c->add("kmax", kmax, "maximal word length");
    c->add("delta", delta, "net spacing (0: eps/8)");
    c->add("node-budget", node_budget, "word-tree node budget");
    c->run = [&, c] {
      const auto p = presets::load(c->preset);
      HittingOptions o;
      o.node_budget = node_budget;
      return emit_hitting(run, certify_frequent_hitting(p.system, eps, kmax, delta > 0 ? delta : eps / 8, g.seed, o),
                          p.system, "");
    };
  }

  // covering-time
  std::vector<int> symbols;
  std::size_t max_bases = 0;
  {
    auto* c = make(&app, "covering-time", "covering-time", "time for eps-ball images to cover the space", "golden-rotation");
    c->add("preset", c->preset, "system preset");
    c->add("symbols", symbols, "generator subset, comma separated (default: all)");
    c->add("eps", eps, "ball radius");
    c->add("kmax", kmax, "maximal word length");
    c->add("delta", delta, "net spacing (0: eps/8)");
    c->add("max-bases", max_bases, "cap on base points (0: all)");
    c->run = [&, c] {
      const auto p = presets::load(c->preset);
      std::vector<Symbol> s(symbols.begin(), symbols.end());
      if (s.empty())
        for (int i = 1; i <= p.system.kappa(); ++i) s.push_back(i);
      const auto res = covering_time(p.system, s, eps, kmax, delta > 0 ? delta : eps / 8, max_bases);
      std::ostringstream os;
      os << "base,length,route\n";
      for (std::size_t i = 0; i < res.routes.size(); ++i)
        os << res.bases[i].str() << ',' << res.routes[i].size() << ',' << run_length(res.routes[i]) << '\n';
      run.csv("", os.str());
      if (res.covered) {
        run.report << "covered K " << res.K << " bases " << res.bases.size() << "\n";
        return int(kOk);
      }
      run.report << "not covered within K_max " << kmax << ": " << res.refutation.reason << "\n";
      return int(kRefuted);
    };
  }

  // transition-time
  std::vector<double> x1{0.5}, x2{0.0};
  int n = 8;
  int shadow = 0;
  {
    auto* c = make(&app, "transition-time", "transition-time", "minimal transition between dynamic balls", "morse-smale-rotation");
    c->add("preset", c->preset, "system preset");
    c->add("x1", x1, "source point coordinates");
    c->add("x2", x2, "target point coordinates");
    c->add("n", n, "dynamic ball length");
    c->add("eps", eps, "dynamic ball radius");
    c->add("kmax", kmax, "maximal transition length");
    c->add("shadow", shadow, "shadowed generator (0: last)");
    c->add("node-budget", node_budget, "search node budget");
    c->run = [&, c] {
      const auto p = presets::load(c->preset);
      const Symbol s = shadow > 0 ? shadow : p.system.kappa();
      const auto res = min_transition_time(p.system, make_point(p.system.space(), x1), make_point(p.system.space(), x2),
                                           n, eps, kmax, s, node_budget);
      std::ostringstream os;
      os << "found,p,source_size,target_radius,word\n"
         << res.found << ',' << res.p << ',' << num(res.source_size) << ',' << num(res.target_radius) << ','
         << run_length(res.word) << '\n';
      run.csv("", os.str());
      run.report << (res.found ? "transition p " + std::to_string(res.p) + " word " + run_length(res.word)
                               : std::string(res.budget_exhausted ? "budget exhausted" : "no transition within K_max"))
                 << "\n";
      return res.found ? int(kOk) : res.budget_exhausted ? int(kBudget) : int(kRefuted);
    };
  }

  // irregular
  auto ms = presets::morse_smale();
  std::string psi = "cos";
  double I1 = ms.I1, I2 = ms.I2, threshold = ms.options.threshold, psi_lip = ms.options.psi_lipschitz,
         psi_bound = ms.options.psi_bound;
  int depth = 8;
  long long orbit_budget = ms.options.orbit_budget;
  std::vector<double> ix1{0.5}, ix2{0.0};
  {
    auto* c = make(&app, "irregular", "irregular", "construct a Birkhoff-irregular point by shadowing", "morse-smale-rotation");
    c->add("preset", c->preset, "system preset");
    c->add("psi", psi, "observable: cos, sin or coord (of the first coordinate)");
    c->add("I1", I1, "lower target average");
    c->add("I2", I2, "upper target average");
    c->add("x1", ix1, "point with average I1");
    c->add("x2", ix2, "point with average I2");
    c->add("eps", eps, "shadowing radius");
    c->add("depth", depth, "number of blocks");
    c->add("threshold", threshold, "schedule threshold");
    c->add("psi-lipschitz", psi_lip, "Lipschitz constant of psi (0: sampled)");
    c->add("psi-bound", psi_bound, "sup |psi| (0: sampled)");
    c->add("shadow", shadow, "shadowed generator (0: last)");
    c->add("orbit-budget", orbit_budget, "maximal orbit length");
    c->run = [&, c] {
      const auto p = presets::load(c->preset);
      IrregularOptions o = ms.options;
      o.threshold = threshold;
      o.psi_lipschitz = psi_lip;
      o.psi_bound = psi_bound;
      o.shadow = shadow;
      o.orbit_budget = orbit_budget;
      o.seed = g.seed;
      const auto f = make_psi(psi);
      const auto w = construct_irregular_point(p.system, f, make_point(p.system.space(), ix1), I1,
                                               make_point(p.system.space(), ix2), I2, eps, depth, o);
      return emit_irregular(run, w, audit_witness(p.system, f, w), "");
    };
  }

  // cocycle source
  std::string cocycle_file;
  std::string omega = "random";
  std::size_t length = 10000;
  auto cocycle_opts = [&](Command* c) {
    c->add("preset", c->preset, "cocycle preset");
    c->add("cocycle-file", cocycle_file, "cocycle text file ('d kappa' then row-major matrices)");
  };
  auto cocycle = [&](const Command* c) { return load_cocycle(c->preset, cocycle_file); };

  {
    auto* c = make(&app, "lyapunov", "lyapunov", "Lyapunov spectrum along omega", "different-types-A");
    cocycle_opts(c);
    c->add("omega", omega, "'random' or a periodic word such as 1,2");
    c->add("n", length, "orbit length");
    c->run = [&, c] {
      const auto co = cocycle(c);
      const auto w = parse_omega(omega, co.kappa());
      const auto lyap = lyapunov_spectrum(co, w, length);
      std::ostringstream os;
      os << "index,exponent\n";
      for (std::size_t i = 0; i < lyap.size(); ++i) os << i + 1 << ',' << num(lyap[i]) << '\n';
      run.csv("", os.str());
      run.report << "spectrum " << spectrum_row(lyap) << "\ntop (norm growth) " << num(product_log_norm(co, w, length))
                 << "\n";
      return int(kOk);
    };
  }

  std::vector<double> vdir{1, 1, 1};
  std::size_t stride = 100;
  {
    auto* c = make(&app, "direction-trace", "direction-trace", "directional exponent trace (1/m) log |A^m v|", "different-types-A");
    cocycle_opts(c);
    c->add("v", vdir, "direction");
    c->add("omega", omega, "'random' or a periodic word");
    c->add("n", length, "orbit length");
    c->add("stride", stride, "CSV row stride");
    c->run = [&, c] {
      const auto co = cocycle(c);
      auto t = directional_exponent_trace(co, parse_omega(omega, co.kappa()), to_vec(vdir), length);
      t.label = "exponent";
      emit_trace(run, "", {t}, std::max<std::size_t>(stride, 1));
      run.report << "exponent at n=" << length << " " << num(t.averages.back()) << "\n";
      return int(kOk);
    };
  }

  std::string E = "0,1,0;0,0,1", F = "1,0,0";
  int k_max = 8;
  {
    auto* c = make(&app, "domination", "domination", "test a k-step dominated splitting E + F", "different-types-B");
    cocycle_opts(c);
    c->add("E", E, "columns spanning the dominated bundle E (';' between columns)");
    c->add("F", F, "columns spanning the dominating bundle F");
    c->add("k-max", k_max, "largest k tried");
    c->run = [&, c] {
      const auto co = cocycle(c);
      const auto res = domination_test(co, parse_columns(E, co.d()), parse_columns(F, co.d()), k_max);
      std::ostringstream os;
      os << "k,worst_ratio\n";
      for (std::size_t k = 0; k < res.worst_ratio.size(); ++k) os << k + 1 << ',' << num(res.worst_ratio[k]) << '\n';
      run.csv("", os.str());
      run.report << (res.dominated ? "dominated k " + std::to_string(res.k) : std::string("NotDominated")) << "\n";
      return res.dominated ? int(kOk) : int(kRefuted);
    };
  }

  std::size_t samples = 10000;
  int cone_n = 30;
  int symbol = 1;
  {
    auto* c = make(&app, "cones", "cones", "cone fields of a hyperbolic matrix and their audit", "cat-map");
    cocycle_opts(c);
    c->add("symbol", symbol, "which matrix of the cocycle");
    c->add("samples", samples, "sampled cone vectors");
    c->add("n", cone_n, "largest iterate checked");
    c->run = [&, c] {
      const auto co = cocycle(c);
      const auto& m = co.at(symbol);
      const auto cp = hyperbolic_cones(m);
      const auto a = audit_cones(cp, m, samples, cone_n, g.seed);
      std::ostringstream os;
      os << "dim_plus,dim_minus,theta,zeta,invariant_plus,invariant_minus,growth,contraction,checked\n"
         << cp.dim_plus << ',' << cp.dim_minus << ',' << num(cp.theta) << ',' << num(cp.zeta) << ','
         << a.invariant_plus << ',' << a.invariant_minus << ',' << a.growth << ',' << a.contraction << ',' << a.checked
         << '\n';
      run.csv("", os.str());
      run.report << "cones theta " << num(cp.theta) << " zeta " << num(cp.zeta) << "\n  (i) invariance "
                 << (a.invariant_plus && a.invariant_minus) << " (ii) growth " << a.growth << " (iii) contraction "
                 << a.contraction << " over " << a.checked << " checks\n";
      return a.ok() ? int(kOk) : int(kRefuted);
    };
  }

  double acc_eps = 0.2;
  int acc_kmax = 40;
  {
    auto* c = make(&app, "accessibility", "accessibility", "certify strong projective accessibility", "irreducible-vs-accessible-A");
    cocycle_opts(c);
    c->add("eps", acc_eps, "ball radius (>= 0.05)");
    c->add("kmax", acc_kmax, "maximal word length");
    c->add("delta", delta, "net spacing (0: eps/8)");
    c->add("node-budget", node_budget, "word-tree node budget");
    c->run = [&, c] {
      const auto co = cocycle(c);
      HittingOptions o;
      o.node_budget = node_budget;
      return emit_hitting(run, accessibility_certify(co, acc_eps, acc_kmax, delta > 0 ? delta : acc_eps / 8, g.seed, o),
                          co.projectivized(), "");
    };
  }

  std::string mode = "auto";
  int high = 1, low = 2;
  double dthreshold = 0.1;
  long long n1 = 100, dorbit_budget = 40000000;
  int ddepth = 6;
  {
    auto* c = make(&app, "irregular-direction", "irregular-direction", "direction with oscillating Lyapunov exponent", "different-types-B");
    cocycle_opts(c);
    c->add("v", vdir, "starting direction");
    c->add("eps", eps, "shadowing radius (cones mode)");
    c->add("depth", ddepth, "number of blocks");
    c->add("mode", mode, "auto, blocks or cones");
    c->add("high", high, "growth generator (blocks mode)");
    c->add("low", low, "slow generator (blocks mode)");
    c->add("threshold", dthreshold, "schedule threshold");
    c->add("n1", n1, "first block length");
    c->add("shadow", shadow, "hyperbolic generator (cones mode, 0: last)");
    c->add("orbit-budget", dorbit_budget, "maximal orbit length");
    c->run = [&, c] {
      const auto co = cocycle(c);
      DirectionOptions o;
      o.mode = parse_mode(mode);
      o.high = high;
      o.low = low;
      o.threshold = dthreshold;
      o.n1 = n1;
      o.shadow = shadow;
      o.orbit_budget = dorbit_budget;
      o.irregular.seed = g.seed;
      return emit_direction(run, irregular_direction(co, to_vec(vdir), eps, ddepth, o), "");
    };
  }

  std::vector<double> matrix;
  double angle = 0;
  std::size_t n_iter = 100000;
  {
    auto* c = make(&app, "rotation-number", "rotation-number", "rotation number on RP^1 of a 2x2 matrix");
    c->add("matrix", matrix, "row-major a,b,c,d (default: rotation by --angle)");
    c->add("angle", angle, "rotation angle in radians");
    c->add("n-iter", n_iter, "iterations");
    c->run = [&, c] {
      Eigen::Matrix2d m;
      if (matrix.empty()) {
        m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
      } else {
        if (matrix.size() != 4) throw Error(ErrorCode::InvalidArgument, "--matrix needs 4 entries");
        m << matrix[0], matrix[1], matrix[2], matrix[3];
      }
      const double rho = rotation_number(m, n_iter);
      run.csv("", "rotation_number\n" + num(rho) + "\n");
      run.report << "rotation number " << num(rho) << " turns\n";
      return int(kOk);
    };
  }

  std::string words = "1;2";
  double tol = 0.3;
  {
    auto* c = make(&app, "spectrum", "spectrum", "Lyapunov spectra of periodic words", "different-types-B");
    cocycle_opts(c);
    c->add("words", words, "periodic words, ';' between words, ',' between symbols");
    c->add("tol", tol, "spectrum separation for a distinct verdict");
    c->run = [&, c] {
      const auto co = cocycle(c);
      const auto rep = spectrum_report(co, parse_words(words), tol);
      std::ostringstream os;
      os << "word,sum";
      for (int i = 1; i <= co.d(); ++i) os << ",lambda" << i;
      os << '\n';
      for (const auto& e : rep.entries) {
        std::string w;
        for (Symbol s : e.word) w += (w.empty() ? "" : " ") + std::to_string(s);
        os << w << ',' << num(e.sum) << ',' << spectrum_row(e.exponents) << '\n';
      }
      run.csv("", os.str());
      run.report << rep.verdict << " max_deviation " << num(rep.max_deviation) << " sums_ok " << rep.sums_ok << "\n";
      return int(kOk);
    };
  }

  double theta1 = 2 * kPi * (std::sqrt(2.0) - 1), theta2 = 2 * kPi * (std::sqrt(3.0) - 1);
  int order = 50;
  {
    auto* c = make(&app, "symplectic-check", "symplectic-check", "resonance scan m theta1 + n theta2 in 2 pi Z");
    c->add("theta1", theta1, "first angle");
    c->add("theta2", theta2, "second angle");
    c->add("order", order, "largest |m| + |n|");
    c->run = [&, c] {
      const auto res = symplectic_center_check(theta1, theta2, order);
      run.csv("", "resonant,m,n,residual\n" + std::to_string(res.resonant) + "," + std::to_string(res.m) + "," +
                      std::to_string(res.n) + "," + num(res.residual) + "\n");
      run.report << (res.resonant ? "Resonant m " + std::to_string(res.m) + " n " + std::to_string(res.n)
                                  : std::string("NonResonant"))
                 << " residual " << num(res.residual) << "\n";
      return res.resonant ? int(kRefuted) : int(kOk);
    };
  }

  // entropy
  std::vector<double> eps_grid{0.25, 0.2};
  std::vector<int> n_grid{1, 2, 3, 4, 5, 6};
  double rho = 0.1;
  std::size_t net_cap = std::size_t{1} << 22, word_cap = 4096, word_samples = 64, katok_samples = 200000;
  std::string top_omega;
  CLI::App* entropy_app = app.add_subcommand("entropy", "entropy estimators: top, glw, bufetov, katok");
  entropy_app->require_subcommand(1);
  entropy_app->fallthrough();
  for (const std::string kind : {"top", "glw", "bufetov", "katok"}) {
    auto* c = make(entropy_app, kind, "entropy-" + kind, kind + " entropy estimate", "cat-map");
    c->add("preset", c->preset, "system preset");
    c->add("eps", eps_grid, "eps grid, comma separated");
    c->add("n", n_grid, "n grid, comma separated");
    c->add("delta", delta, "candidate net spacing (0: min eps / 4)");
    c->add("net-cap", net_cap, "candidate cap");
    if (kind == "top") c->add("omega", top_omega, "drive with 'random' or a periodic word (empty: single map)");
    if (kind == "glw" || kind == "bufetov") {
      c->add("word-cap", word_cap, "words enumerated exhaustively up to this count");
      c->add("word-samples", word_samples, "sampled words otherwise");
    }
    if (kind == "katok") {
      c->add("rho", rho, "uncovered mass");
      c->add("samples", katok_samples, "sampled points");
    }
    c->run = [&, c, kind] {
      const auto p = presets::load(c->preset);
      EntropyOptions o;
      o.candidate_delta = delta;
      o.net_cap = net_cap;
      o.seed = g.seed;
      o.word_cap = word_cap;
      o.word_samples = word_samples;
      o.katok_samples = katok_samples;
      EntropyEstimate e;
      if (kind == "top") {
        std::optional<WordStream> w;
        if (!top_omega.empty()) w = parse_omega(top_omega, p.system.kappa());
        e = topological_entropy_estimate(p.system, eps_grid, n_grid, o, w);
      } else if (kind == "glw") {
        e = glw_entropy_estimate(p.system, eps_grid, n_grid, o);
      } else if (kind == "bufetov") {
        e = bufetov_entropy_estimate(p.system, eps_grid, n_grid, o);
      } else {
        const Space sp = p.system.space();
        e = katok_entropy_estimate(p.system, [sp](Rng& r) { return sample_point(sp, r); }, eps_grid, n_grid, rho, o);
      }
      emit_entropy(run, e, "");
      return int(kOk);
    };
  }

  std::string example_name;
  {
    auto* c = make(&app, "examples", "examples", "reproduce the experiment attached to a preset (or a preset family)");
    c->app->add_option("name", example_name, "preset name or family prefix such as different-types")->required();
    c->run = [&, c] {
      std::vector<std::string> chosen;
      for (const auto& nm : presets::names())
        if (nm == example_name || nm.rfind(example_name + "-", 0) == 0) chosen.push_back(nm);
      if (chosen.empty()) presets::load(example_name);  // throws with the valid names
      int status = kOk;
      for (const auto& nm : chosen) {
        const int s = example(run, nm);
        if (s != kOk && status != kBudget) status = s;
      }
      return status;
    };
  }

  {
    auto* c = make(&app, "list-presets", "list-presets", "list the built-in systems");
    c->run = [&, c] {
      std::ostringstream os;
      os << "name,space,kappa,cocycle\n";
      for (const auto& nm : presets::names()) {
        const auto p = presets::load(nm);
        os << nm << ',' << p.system.space().name() << ',' << p.system.kappa() << ',' << (p.cocycle ? 1 : 0) << '\n';
        run.report << nm << "  " << p.description << "\n";
      }
      run.csv("", os.str());
      return int(kOk);
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  Command* active = nullptr;
  for (auto& c : cmds)
    if (c->app->parsed()) active = c.get();
  if (!active) return kConfig;

  try {
    if (!g.config.empty()) {
      std::ifstream f(g.config);
      if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read config " + g.config);
      json cfg;
      try {
        cfg = json::parse(f, nullptr, true, true);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("config parse: ") + e.what());
      }
      if (!cfg.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
      const json section = cfg.contains(active->name) ? cfg[active->name] : json::object();
      auto apply = [&](const std::string& key, auto&& setter, CLI::Option* opt) {
        if (opt && opt->count() > 0) return;
        try {
          if (section.contains(key)) setter(section[key]);
          else if (cfg.contains(key) && !cfg[key].is_object()) setter(cfg[key]);
        } catch (const json::exception& e) {
          throw Error(ErrorCode::InvalidArgument, "config key '" + key + "': " + e.what());
        }
      };
      for (auto& p : active->params) apply(p.key, p.set, p.opt);
      apply("seed", [](const json& j) { g.seed = j.get<std::uint64_t>(); }, app.get_option("--seed"));
      apply("out", [](const json& j) { g.out = j.get<std::string>(); }, app.get_option("--out"));
      if (active->name == "examples" && example_name.empty() && section.contains("name"))
        example_name = section["name"].get<std::string>();
    }
    run.command = active->app->get_parent() == entropy_app ? "entropy " + active->app->get_name() : active->app->get_name();
    run.config = json::object();
    for (auto& p : active->params) run.config[p.key] = p.get();
    if (active->name == "examples") run.config["name"] = example_name;
    const int status = active->run();
    run.finish();
    return status;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
}
