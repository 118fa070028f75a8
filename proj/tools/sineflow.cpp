#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sineflow/bounds.hpp"
#include "sineflow/curves.hpp"
#include "sineflow/error.hpp"
#include "sineflow/flow.hpp"
#include "sineflow/io.hpp"
#include "sineflow/measure.hpp"
#include "sineflow/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sineflow;

namespace {

const std::set<std::string> kSubcommands{"generate", "evolve", "verify", "tsc-experiment", "levelset"};

// Reads --config files as JSON. Scalars and arrays become option values;
// objects named after a subcommand hold that subcommand's options. Other
// objects (tsc, approx, flow) are read separately as specs.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static void collect(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, val] : j.items()) {
      if (val.is_object()) {
        if (parents.empty() && kSubcommands.count(key)) collect(val, {key}, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (val.is_array()) {
        for (const auto& v : val) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(val));
      }
      out.push_back(std::move(item));
    }
  }

  static std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }
};

struct Globals {
  std::string out;
  std::uint64_t seed = 1;
  json config = json::object();

  json section(const char* key) const { return config.contains(key) ? config.at(key) : json::object(); }
  FlowParams flow() const { return flow_params_from_json(section("flow")); }
  ApproxSpec approx() const { return approx_spec_from_json(section("approx")); }
};

// Thrown when a verification does not hold; the payload is printed as JSON.
struct VerificationFailure {
  json payload;
};

void emit(const Globals& g, const std::string& file, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(g.out);
  std::ofstream os(fs::path(g.out) / file);
  if (!os) fail(ErrorKind::InvalidInput, "cannot write " + (fs::path(g.out) / file).string());
  os << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// "a..b" (integer range) or a comma list.
std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
    if (a > b) fail(ErrorKind::InvalidInput, "empty range " + s);
    for (int k = a; k <= b; ++k) out.push_back(k);
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) fail(ErrorKind::InvalidInput, "empty grid");
  return out;
}

struct GenerateOpts {
  std::string kind;
  int n = 1;
  std::optional<int> n_max;
  std::optional<double> beta;
  double c = 2.0, lambda = 0.0, t = 0.0, y_floor = -2.0, h = 0.01, r0 = 1.0;
  int vertices = 1024;
};

TSCSpec tsc_spec(const Globals& g, std::optional<int> n_max, std::optional<double> beta, int fallback_n_max) {
  json j = g.section("tsc");
  if (n_max) j["n_max"] = *n_max;
  if (beta) j["beta"] = *beta;
  if (!j.contains("n_max")) j["n_max"] = fallback_n_max;
  if (j.contains("x_min") && (n_max || beta)) j.erase("x_min");
  return tsc_spec_from_json(j);
}

void run_generate(const Globals& g, const GenerateOpts& o) {
  std::optional<Polyline> p;
  std::string name = o.kind;
  if (o.kind == "tsc") {
    p = generate_tsc(tsc_spec(g, o.n_max, o.beta, 8));
  } else if (o.kind == "inner" || o.kind == "outer") {
    const TSCSpec tsc = tsc_spec(g, o.n_max, o.beta, std::max(8, o.n));
    p = o.kind == "inner" ? generate_inner_approx(tsc, g.approx(), o.n) : generate_outer_approx(tsc, g.approx(), o.n);
    name += "_" + std::to_string(o.n);
  } else if (o.kind == "reaper") {
    json j = g.section("reaper");
    j["c"] = o.c;
    j["lambda"] = o.lambda;
    p = sample_grim_reaper(reaper_spec_from_json(j), o.t, o.y_floor, o.h);
  } else {
    p = sample_circle(o.r0, o.t, o.vertices);
  }
  std::ostringstream os;
  write_polyline_csv(os, *p);
  emit(g, name + ".csv", os.str());
  if (!g.out.empty()) {
    std::cout << dump({{"file", (fs::path(g.out) / (name + ".csv")).string()},
                       {"vertices", p->size()},
                       {"closed", p->closed()},
                       {"length", polyline_length(*p)}});
  }
}

struct EvolveOpts {
  std::string input;
  double t = 0.1;
  std::vector<double> times;
  int frames = 10;
  double mesh_h = 0.01;
};

void run_evolve(const Globals& g, const EvolveOpts& o) {
  if (g.out.empty()) fail(ErrorKind::InvalidInput, "evolve needs --out");
  if (!(o.t > 0.0)) fail(ErrorKind::InvalidInput, "--t must be positive");
  if (o.frames < 1) fail(ErrorKind::InvalidInput, "--frames must be positive");
  std::vector<double> times = o.times;
  if (times.empty())
    for (int k = 0; k <= o.frames; ++k) times.push_back(o.t * k / o.frames);
  const FlowParams prm = g.flow();
  const FlowState s0 = make_flow_state(load_polyline(o.input), o.mesh_h, prm);
  std::vector<FlowState> snaps;
  std::optional<double> extinct;
  try {
    snaps = evolve_snapshots(s0, times, prm);
  } catch (const ExtinctionError& e) {
    extinct = e.time();
    for (double t : times) {
      if (t > e.time()) break;
      snaps.push_back(t == 0.0 ? s0 : evolve_to(s0, t, prm));
    }
  }
  const json manifest = write_snapshots(g.out, snaps);
  json summary{{"snapshots", manifest.size()}, {"dir", g.out}, {"flow", to_json(prm)}};
  if (extinct) {
    summary["extinct_at"] = *extinct;
    throw VerificationFailure{summary};
  }
  std::cout << dump(summary);
}

struct VerifyOpts {
  std::string name;
  std::vector<double> c_grid{1.1, 1.5, 2.0, 4.0, 8.0};
  std::string lambda_grid = "0..6";
  int trials = 0;
  int n_max = 8;
  int lines = 200;
  int pairs = 50;
  double mesh_h = 0.0;
  double dt = 0.01;
  double tol = 0.02;
};

void run_verify(const Globals& g, const VerifyOpts& o) {
  VerifyResult r;
  if (o.name == "intersect-lemma") {
    const auto lam = parse_grid(o.lambda_grid);
    r = verify_intersect_lemma(o.c_grid, lam);
  } else if (o.name == "straight2") {
    r = verify_straight2(g.seed, o.trials > 0 ? o.trials : 10000);
  } else if (o.name == "straight") {
    r = verify_straight(g.seed, o.trials > 0 ? o.trials : 1000);
  } else if (o.name == "jacobian") {
    r = verify_jacobian(g.seed, o.trials > 0 ? o.trials : 1000);
  } else if (o.name == "intbound") {
    r = verify_intbound(tsc_spec(g, o.n_max, std::nullopt, o.n_max), g.approx(), o.n_max, g.seed, o.lines);
  } else if (o.name == "area-law") {
    r = verify_area_law(o.mesh_h > 0.0 ? o.mesh_h : 0.005, o.dt, o.tol);
  } else {
    r = verify_avoidance(g.seed, o.pairs, o.mesh_h > 0.0 ? o.mesh_h : 0.01);
  }
  json j = to_json(r);
  j["seed"] = g.seed;
  emit(g, "verify_" + o.name + ".json", dump(j));
  if (!r.pass) throw VerificationFailure{{{"name", r.name}, {"witness", r.detail}}};
}

struct ExperimentOpts {
  std::vector<double> x{0.0, 0.0};
  double t0 = 0.02;
  int n_max = 8;
  double eps = 0.0;
  double mesh_h = 0.01;
  double alpha = 0.1;
  bool wide = false;
};

void run_tsc_experiment(const Globals& g, const ExperimentOpts& o) {
  if (o.x.size() != 2) fail(ErrorKind::InvalidInput, "--x takes two coordinates");
  const Point2 x{o.x[0], o.x[1]};
  const TSCSpec tsc = tsc_spec(g, o.n_max, std::nullopt, o.n_max);
  const ApproxFamily fam = make_family(tsc, g.approx(), o.n_max);
  ExperimentOptions opt;
  opt.mesh_h = o.mesh_h;
  opt.flow = g.flow();
  opt.alpha = o.alpha;
  opt.allow_wide_window = o.wide;
  double eps = o.eps;
  if (!(eps > 0.0)) eps = on_V(x) ? case2_recipe(fam, o.t0, o.alpha).eps : 0.05;
  const LocalLengthTable tab = local_length_experiment(fam, x, o.t0, eps, opt);
  emit(g, "tsc_experiment.csv", to_csv(tab));
  if (!g.out.empty()) write_json_file(fs::path(g.out) / "tsc_experiment.json", to_json(tab));
  if (!tab.holds) throw VerificationFailure{to_json(tab)};
}

struct LevelsetOpts {
  int n = 6;
  double t = 0.02;
  double mesh_h = 0.01;
  double probe_eps = 0.1;
  std::vector<double> probes;
};

void run_levelset(const Globals& g, const LevelsetOpts& o) {
  LevelsetOptions opt;
  opt.mesh_h = o.mesh_h;
  if (g.config.contains("flow")) opt.flow = g.flow();
  opt.probe_eps = o.probe_eps;
  if (!o.probes.empty()) {
    if (o.probes.size() % 2) fail(ErrorKind::InvalidInput, "--probes takes x,y pairs");
    opt.probes.clear();
    for (std::size_t k = 0; k < o.probes.size(); k += 2) opt.probes.push_back({o.probes[k], o.probes[k + 1]});
  }
  const TSCSpec tsc = tsc_spec(g, o.n, std::nullopt, o.n);
  const LevelsetReport rep = levelset_snapshot(tsc, g.approx(), o.n, o.t, opt);
  emit(g, "levelset.json", dump(to_json(rep)));
  if (!g.out.empty() && rep.innermost) {
    save_polyline(fs::path(g.out) / "innermost_inner.csv", rep.innermost->inner.curve);
    save_polyline(fs::path(g.out) / "innermost_outer.csv", rep.innermost->outer.curve);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curve shortening flow experiments on the topologist's sine curve"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.allow_config_extras(CLI::config_extras_mode::ignore);

  Globals g;
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");
  app.add_option("--out", g.out, "Output directory (stdout when omitted)");
  app.add_option("--seed", g.seed, "Seed for randomized suites");

  GenerateOpts gen;
  auto* generate = app.add_subcommand("generate", "Sample a curve to CSV");
  generate->add_option("kind", gen.kind, "tsc | inner | outer | reaper | circle")
      ->required()
      ->check(CLI::IsMember({"tsc", "inner", "outer", "reaper", "circle"}));
  generate->add_option("--n", gen.n, "Approximation index");
  generate->add_option("--n-max", gen.n_max, "Truncation index of T");
  generate->add_option("--beta", gen.beta, "Right end of the sine graph");
  generate->add_option("--c", gen.c, "Grim reaper speed");
  generate->add_option("--lambda", gen.lambda, "Grim reaper offset");
  generate->add_option("--t", gen.t, "Time (reaper, circle)");
  generate->add_option("--y-floor", gen.y_floor, "Lowest height of the reaper sample");
  generate->add_option("--spacing", gen.h, "Reaper arclength spacing");
  generate->add_option("--r0", gen.r0, "Initial circle radius");
  generate->add_option("--vertices", gen.vertices, "Circle vertex count");

  EvolveOpts ev;
  auto* evolve = app.add_subcommand("evolve", "Evolve a curve file and write snapshots");
  evolve->add_option("input", ev.input, "Curve file (.csv or .json)")->required()->check(CLI::ExistingFile);
  evolve->add_option("--t", ev.t, "Final time");
  evolve->add_option("--times", ev.times, "Explicit snapshot times")->delimiter(',');
  evolve->add_option("--frames", ev.frames, "Evenly spaced snapshots when --times is absent");
  evolve->add_option("--mesh-h", ev.mesh_h, "Base spacing");

  VerifyOpts vf;
  auto* verify = app.add_subcommand("verify", "Run a property suite; exit 1 with a witness on failure");
  verify->add_option("name", vf.name, "Suite")
      ->required()
      ->check(CLI::IsMember({"intersect-lemma", "straight", "straight2", "jacobian", "intbound", "area-law",
                             "avoidance"}));
  verify->add_option("--c-grid", vf.c_grid, "Reaper speeds")->delimiter(',');
  verify->add_option("--lambda-grid", vf.lambda_grid, "Offsets, a..b or a comma list");
  verify->add_option("--trials", vf.trials, "Random trials");
  verify->add_option("--n-max", vf.n_max, "Largest approximation index");
  verify->add_option("--lines", vf.lines, "Random lines (intbound)");
  verify->add_option("--pairs", vf.pairs, "Random nested pairs (avoidance)");
  verify->add_option("--mesh-h", vf.mesh_h, "Base spacing for flow suites");
  verify->add_option("--dt", vf.dt, "Time window (area-law)");
  verify->add_option("--tol", vf.tol, "Relative tolerance (area-law)");

  ExperimentOpts ex;
  auto* experiment = app.add_subcommand("tsc-experiment", "Local length table near a point of T");
  experiment->add_option("--x", ex.x, "Center x,y")->delimiter(',')->expected(2);
  experiment->add_option("--t0", ex.t0, "Time");
  experiment->add_option("--n-max", ex.n_max, "Largest approximation index");
  experiment->add_option("--eps", ex.eps, "Ball radius (default: recipe window on V, 0.05 off V)");
  experiment->add_option("--mesh-h", ex.mesh_h, "Base spacing");
  experiment->add_option("--alpha", ex.alpha, "Slope bound of the flattening map");
  experiment->add_flag("--wide", ex.wide, "Allow eps above the recipe window on V");

  LevelsetOpts ls;
  auto* levelset = app.add_subcommand("levelset", "Annulus areas, Hausdorff distances and local lengths at t");
  levelset->add_option("--n", ls.n, "Number of approximation pairs");
  levelset->add_option("--t", ls.t, "Time");
  levelset->add_option("--mesh-h", ls.mesh_h, "Base spacing");
  levelset->add_option("--probe-eps", ls.probe_eps, "Probe ball radius");
  levelset->add_option("--probes", ls.probes, "Probe points x1,y1,x2,y2,...")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (const auto* c = app.get_config_ptr(); c != nullptr && c->count() > 0)
      g.config = read_json_file(c->as<std::string>());
    if (*generate) run_generate(g, gen);
    else if (*evolve) run_evolve(g, ev);
    else if (*verify) run_verify(g, vf);
    else if (*experiment) run_tsc_experiment(g, ex);
    else run_levelset(g, ls);
  } catch (const VerificationFailure& f) {
    std::cerr << dump({{"status", "fail"}, {"failure", f.payload}});
    return 1;
  } catch (const Error& e) {
    std::cerr << dump({{"status", "error"}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}});
    return e.kind() == ErrorKind::InvalidInput ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << dump({{"status", "error"}, {"message", e.what()}});
    return 1;
  }
  return 0;
}
