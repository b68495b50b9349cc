// mrx: command-line front end for the matrix-ring lab.
//
// Exit codes: 0 ok, 1 verification mismatch, 2 usage, 3 resource limit.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mrx/cache.hpp"
#include "mrx/expansion.hpp"
#include "mrx/io.hpp"
#include "mrx/spectral.hpp"
#include "mrx/structure.hpp"

#ifndef MRX_VERSION
#define MRX_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace mrx;

namespace {

enum Exit { kOk = 0, kMismatch = 1, kUsage = 2, kResource = 3 };

struct Common {
  std::uint32_t q = 3;
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = default_threads();
  std::uint64_t budget_mb = 1024;
  std::string config;
  bool no_timing = false;
  std::string cache_dir = ".mrx-cache";
};

struct Stage {
  std::string name;
  double ms;
};

class Run {
  using clock = std::chrono::steady_clock;
  using clock_t_point = clock::time_point;

 public:
  Run(const Common& c, std::string command) : c_(c), command_(std::move(command)), t0_(clock::now()) {}

  void stage(const std::string& name, clock_t_point start) { stages_.push_back({name, ms_since(start)}); }
  static clock_t_point now() { return clock::now(); }

  /// Writes `text` to --out (atomically) or stdout.
  void emit(const std::string& text, const std::string& path_override = {}) {
    const std::string path = path_override.empty() ? c_.out : path_override;
    if (path.empty()) {
      std::cout << text;
      return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    atomic_write(p, text);
    outputs_.push_back(path);
  }

  /// One manifest per run, next to the primary output.
  void finish() {
    if (c_.out.empty() || outputs_.empty()) return;
    ordered_json m;
    m["command"] = command_;
    m["q"] = c_.q;
    m["seed"] = c_.seed;
    m["version"] = MRX_VERSION;
    m["outputs"] = outputs_;
    m["wall_clock_ms"] = c_.no_timing ? 0.0 : ms_since(t0_);
    ordered_json st = ordered_json::object();
    for (const auto& s : stages_) st[s.name] = c_.no_timing ? 0.0 : s.ms;
    m["stages"] = st;
    atomic_write(fs::path(c_.out + ".manifest.json"), dump(m));
  }

 private:
  static double ms_since(clock_t_point t) {
    return std::chrono::duration<double, std::milli>(clock::now() - t).count();
  }

  const Common& c_;
  std::string command_;
  clock_t_point t0_;
  std::vector<Stage> stages_;
  std::vector<std::string> outputs_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::usage, "not a number: '" + s + "'");
  }
}

/// "q^2.5" or a plain count.
SizeSpec parse_size(const std::string& s) {
  if (s.rfind("q^", 0) == 0) return {true, parse_double(s.substr(2))};
  return {false, parse_double(s)};
}

/// "1,1.5,2" or "lo:hi:step".
std::vector<double> parse_grid(const std::string& s) {
  if (s.find(':') != std::string::npos) {
    const auto p = split(s, ':');
    if (p.size() != 3) throw Error(ErrorKind::usage, "range must be lo:hi:step");
    const double lo = parse_double(p[0]), hi = parse_double(p[1]), step = parse_double(p[2]);
    if (step <= 0) throw Error(ErrorKind::usage, "range step must be positive");
    std::vector<double> g;
    for (int k = 0; lo + k * step <= hi + 1e-9; ++k) g.push_back(lo + k * step);
    return g;
  }
  std::vector<double> g;
  for (const auto& t : split(s, ',')) g.push_back(parse_double(t));
  return g;
}

/// key=value lines; flags on the command line win.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::usage, "cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::usage, path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "config") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw Error(ErrorKind::usage, path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

CLI::App* add_common(CLI::App* sub, Common& c) {
  sub->add_option("--q", c.q, "field order");
  sub->add_option("--seed", c.seed, "64-bit seed");
  sub->add_option("--out", c.out, "output file (stdout if omitted)");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--budget-mb", c.budget_mb, "memory budget for dense structures");
  sub->add_option("--config", c.config, "key=value config file");
  sub->add_flag("--no-timing", c.no_timing, "zero all timings (golden outputs)");
  sub->add_option("--cache-dir", c.cache_dir, "table/spectrum cache ('none' disables)");
  return sub;
}

std::optional<CacheManager> open_cache(const Common& c) {
  if (c.cache_dir == "none" || c.cache_dir.empty()) return std::nullopt;
  return CacheManager(c.cache_dir);
}

RingPtr load_ring(const Common& c, std::optional<CacheManager>& cache) {
  // validate the field first so over-large q fails before touching the cache
  Field::make(c.q);
  if (!cache) return make_ring(c.q);
  bool hit = false;
  auto r = cache->ring(c.q, &hit);
  std::cerr << (hit ? "cache hit: " : "cache miss: ") << cache->tables_path(r->field().spec()).filename().string()
            << "\n";
  for (const auto& l : cache->log())
    if (l.rfind("warning", 0) == 0) std::cerr << l << "\n";
  return r;
}

std::uint64_t budget_bytes(const Common& c) { return c.budget_mb * 1024ull * 1024ull; }

// ---- subcommands ----

int cmd_enumerate(const Common& c, Run& run) {
  auto cache = open_cache(c);
  const auto t0 = Run::now();
  const RingPtr r = load_ring(c, cache);
  run.stage("enumerate", t0);
  const auto& t = r->table();
  const std::uint64_t q = c.q;
  ordered_json j;
  const auto& fs = r->field().spec();
  j["q"] = q;
  j["characteristic"] = fs.characteristic;
  j["degree"] = fs.degree;
  j["modulus"] = fs.modulus;
  j["m2"] = t.size();
  j["sl2"] = t.sl2.size();
  j["gl2"] = t.gl2.size();
  std::vector<std::uint64_t> slices;
  for (Elem a = 0; a < q; ++a) slices.push_back(t.slice(a).size());
  j["slices"] = slices;
  bool ok = t.sl2.size() == q * q * q - q && t.gl2.size() == (q * q - 1) * (q * q - q) &&
            t.slice(0).size() == q * q * q + q * q - q;
  for (Elem a = 1; a < q; ++a) ok = ok && t.slice(a).size() == q * q * q - q;
  j["verdict"] = ok ? "exact" : "mismatch";
  run.emit(dump(j));
  return ok ? kOk : kMismatch;
}

struct SpectrumArgs {
  std::string family = "unit-cayley";
  std::string method = "auto";
  std::string normality = "verify";
};

int cmd_spectrum(const Common& c, const SpectrumArgs& a, Run& run) {
  auto cache = open_cache(c);
  const RingPtr ring = load_ring(c, cache);
  const GraphSpec spec = parse_family(a.family, c.q);
  SpectralOptions opt;
  opt.seed = c.seed;
  if (a.method == "dense") opt.method = SpectralOptions::Method::dense;
  else if (a.method == "iterative") opt.method = SpectralOptions::Method::iterative;
  else if (a.method != "auto") throw Error(ErrorKind::usage, "method must be auto, dense or iterative");
  if (a.normality == "assume") opt.normality = NormalityPolicy::assume;
  else if (a.normality == "override") opt.normality = NormalityPolicy::override;
  else if (a.normality != "verify") throw Error(ErrorKind::usage, "normality must be verify, assume or override");

  const std::string key = family_name(spec) + "|" + a.method + "|" + a.normality;
  std::optional<SpectralReport> rep;
  if (cache) rep = cache->load_spectrum(ring->field().spec(), key);
  if (rep) {
    std::cerr << "cache hit: spectrum " << key << "\n";
    rep->family = family_name(spec);
    rep->runtime_ms = 0;
  } else {
    BuildOptions bo;
    bo.budget_bytes = budget_bytes(c);
    GraphFactory f(ring, bo);
    const auto t0 = Run::now();
    RegularGraph g = f.build(spec);
    run.stage("build", t0);
    const std::uint64_t n = g.n();
    const bool dense = opt.method == SpectralOptions::Method::dense ||
                       (opt.method == SpectralOptions::Method::automatic &&
                        n <= (g.directed() ? 3'000u : kDenseSpectrumLimit));
    if (dense && n * n * 8 > budget_bytes(c))
      throw Error(ErrorKind::resource_limit, "dense solve needs " + std::to_string(n * n * 8 >> 20) + " MB");
    const auto t1 = Run::now();
    rep = second_eigenvalue(g, opt);
    run.stage("spectrum", t1);
    if (cache) {
      SpectralReport stored = *rep;
      stored.family = key;
      cache->store_spectrum(ring->field().spec(), stored);
    }
  }
  const auto claim = claimed_lambda(spec);
  bool ok = true;
  if (claim) {
    rep->set_claimed_bound(claim->bound(c.q));
    ok = rep->lambda2 <= claim->bound(c.q) + 1e-6;
  }
  run.emit(dump(to_json(*rep, !c.no_timing)));
  return ok ? kOk : kMismatch;
}

struct VerifyArgs {
  std::string target;
  std::string mode = "auto";
  std::uint64_t samples = 100'000;
  std::uint64_t instances = 100;
};

VerificationReport verify_scaling(const IndexedRing& r, CheckMode mode, std::uint64_t instances, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.target = "scaling";
  rep.q = r.q();
  rep.mode = mode;
  for (Elem i = 1; i < r.q(); ++i)
    for (Elem j = 1; j < r.q(); ++j) {
      const auto& di = r.table().slice(i);
      const auto& dj = r.table().slice(j);
      auto check = [&](const std::vector<MatIndex>& a, const std::vector<MatIndex>& b, const std::string& label) {
        const auto s = scaling_lemma_sizes(r, i, j, a, b);
        ++rep.pairs_checked;
        ++rep.label_counts[label];
        if (s.equal()) return;
        ++rep.mismatch_count;
        ++rep.label_mismatches[label];
        if (rep.mismatches.size() < kMismatchKeep)
          rep.mismatches.push_back({"D" + std::to_string(i), "D" + std::to_string(j), label,
                                    static_cast<std::int64_t>(s.original), static_cast<std::int64_t>(s.scaled)});
      };
      if (mode == CheckMode::exhaustive) {
        check(di, dj, "full-slice");
      } else {
        for (std::uint64_t k = 0; k < instances; ++k) {
          auto ra = trial_rng(seed, (std::uint64_t{i} << 32 | j) * instances + k, 0);
          auto rb = trial_rng(seed, (std::uint64_t{i} << 32 | j) * instances + k, 1);
          std::uniform_int_distribution<std::uint64_t> sa(1, di.size()), sb(1, dj.size());
          const auto na = sa(ra), nb = sb(rb);
          check(sample_subset(di, na, ra), sample_subset(dj, nb, rb), "random-subset");
        }
      }
    }
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

int cmd_verify(const Common& c, const VerifyArgs& a, Run& run) {
  auto cache = open_cache(c);
  const RingPtr ring = load_ring(c, cache);
  BuildOptions bo;
  bo.budget_bytes = budget_bytes(c);
  GraphFactory f(ring, bo);
  CheckOptions opt;
  opt.samples = a.samples;
  opt.seed = c.seed;
  opt.threads = c.threads;
  const std::uint64_t q = c.q;
  auto pick_mode = [&](std::uint64_t n) {
    if (a.mode == "exhaustive") return CheckMode::exhaustive;
    if (a.mode == "sampled") return CheckMode::sampled;
    if (a.mode != "auto") throw Error(ErrorKind::usage, "mode must be auto, exhaustive or sampled");
    return n * n <= 10'000'000 ? CheckMode::exhaustive : CheckMode::sampled;
  };
  const auto t0 = Run::now();
  VerificationReport rep;
  const std::string& t = a.target;
  if (t == "g1-cases" || t == "g2-cases" || t == "g31-cases") {
    const CaseFamily fam = t == "g1-cases"   ? CaseFamily::sp_digraph_m2
                           : t == "g2-cases" ? CaseFamily::sp_digraph_sl2
                                             : CaseFamily::sl2_singular_diff;
    const std::uint64_t n = t == "g1-cases" ? q * q * q * q * q * q * q * q
                            : t == "g2-cases" ? (q * q * q - q) * q * q * q * q
                                              : q * q * q - q;
    opt.mode = pick_mode(n);
    rep = verify_case_analysis(f, fam, opt);
  } else if (t == "g1-normal" || t == "g2-normal") {
    auto g = f.build(GraphSpec::of(t == "g1-normal" ? Family::sp_digraph_m2 : Family::sp_digraph_sl2, c.q));
    opt.mode = pick_mode(g.n());
    rep = verify_normality(g, opt, &f);
  } else if (t == "g1-mmt" || t == "g2-mmt" || t == "g31-squared") {
    const auto target = parse_decomposition(t);
    const std::uint64_t n = target == DecompositionTarget::g1_mmt   ? q * q * q * q * q * q * q * q
                            : target == DecompositionTarget::g2_mmt ? (q * q * q - q) * q * q * q * q
                                                                    : q * q * q - q;
    opt.mode = pick_mode(n);
    rep = verify_decomposition(f, target, opt);
  } else if (t == "scaling") {
    rep = verify_scaling(*ring, pick_mode(q), a.instances, c.seed);
  } else if (t == "sl2-sumcover") {
    const auto t1 = std::chrono::steady_clock::now();
    rep.target = t;
    rep.q = c.q;
    rep.pairs_checked = ring->size();
    rep.mismatch_count = verify_sl2_sumcover(*ring) ? 0 : 1;
    rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t1).count();
  } else if (t == "sharpness") {
    const auto t1 = std::chrono::steady_clock::now();
    const auto s = sharpness_check(*ring);
    rep.target = t;
    rep.q = c.q;
    rep.pairs_checked = 1;
    rep.mismatch_count = (s.equals_d0 && s.image == s.expected) ? 0 : 1;
    rep.notes["image"] = std::to_string(s.image);
    rep.notes["expected"] = std::to_string(s.expected);
    rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t1).count();
  } else {
    throw Error(ErrorKind::usage, "unknown verify target '" + t + "'");
  }
  run.stage("verify", t0);
  run.emit(dump(to_json(rep, !c.no_timing)));
  return rep.exact() ? kOk : kMismatch;
}

struct ExperimentArgs {
  std::string theorem, poly, domains, sizes, aliases;
  std::uint32_t trials = 1;
  double eps = 0.25;
};

int cmd_experiment(const Common& c, const ExperimentArgs& a, Run& run) {
  auto cache = open_cache(c);
  const RingPtr ring = load_ring(c, cache);
  ExperimentConfig cfg;
  cfg.q = c.q;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  cfg.trials = a.trials;
  cfg.eps = a.eps;
  cfg.timing = !c.no_timing;
  if (!a.theorem.empty()) {
    cfg.theorem = parse_theorem(a.theorem);
    const auto s = theorem_setup(*cfg.theorem);
    cfg.polynomial = s.polynomial;
    cfg.domains = s.domains;
    cfg.aliases = s.aliases;
  }
  if (!a.poly.empty()) cfg.polynomial = parse_polynomial(a.poly);
  if (!a.domains.empty()) {
    cfg.domains.clear();
    for (const auto& d : split(a.domains, ',')) cfg.domains.push_back(parse_domain(d));
  }
  if (!a.aliases.empty()) {
    cfg.aliases.clear();
    for (const auto& k : split(a.aliases, ',')) cfg.aliases.push_back(static_cast<std::size_t>(parse_double(k)));
  }
  if (cfg.domains.empty()) throw Error(ErrorKind::usage, "give --theorem or --poly with --domains");
  if (a.sizes.empty()) throw Error(ErrorKind::usage, "--sizes is required");
  for (const auto& s : split(a.sizes, ',')) cfg.sizes.push_back(parse_size(s));
  const auto t0 = Run::now();
  const auto recs = run_experiment(*ring, cfg);
  run.stage("experiment", t0);
  if (cfg.polynomial == Polynomial::xy_plus_z_plus_t) {
    std::uint32_t covered = 0;
    for (const auto& r : recs) covered += r.covered;
    std::cerr << "coverage: " << covered << "/" << recs.size() << " trials hit all of M2\n";
  }
  run.emit(records_csv(recs));
  return kOk;
}

struct SweepArgs {
  std::string theorem;
  std::string qs;
  std::string exponents = "1:4:0.25";
  std::uint32_t trials = 20;
  double eps = 0.25;
};

int cmd_sweep(const Common& c, const SweepArgs& a, Run& run) {
  SweepConfig cfg;
  if (a.theorem.empty()) throw Error(ErrorKind::usage, "--theorem is required");
  cfg.theorem = parse_theorem(a.theorem);
  if (a.qs.empty()) cfg.qs = {c.q};
  else
    for (const auto& s : split(a.qs, ',')) cfg.qs.push_back(static_cast<std::uint32_t>(parse_double(s)));
  cfg.exponents = parse_grid(a.exponents);
  cfg.trials = a.trials;
  cfg.seed = c.seed;
  cfg.eps = a.eps;
  cfg.threads = c.threads;
  cfg.timing = !c.no_timing;
  auto cache = open_cache(c);
  std::map<std::uint32_t, RingPtr> rings;
  for (auto q : cfg.qs) {
    Common cq = c;
    cq.q = q;
    rings[q] = load_ring(cq, cache);
  }
  const auto t0 = Run::now();
  const auto res = threshold_sweep(cfg, rings);
  run.stage("sweep", t0);
  if (c.out.empty()) {
    run.emit(summary_csv(res.cells));
    return kOk;
  }
  const fs::path out(c.out);
  auto sibling = [&](const std::string& suffix) {
    fs::path p = out;
    p.replace_extension();
    return p.string() + suffix;
  };
  run.emit(records_csv(res.records));
  run.emit(summary_csv(res.cells), sibling(".summary.csv"));
  run.emit(dump(sweep_summary_json(res, cfg)), sibling(".json"));
  return kOk;
}

struct ReportArgs {
  std::string in = ".";
};

int cmd_report(const Common& c, const ReportArgs& a, Run& run) {
  (void)c;
  if (!fs::is_directory(a.in)) throw Error(ErrorKind::usage, "not a directory: " + a.in);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.in)) {
    const auto name = e.path().filename().string();
    if (e.path().extension() == ".json" && name.find(".manifest.") == std::string::npos) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::ostringstream o;
  o << "| file | kind | q | result |\n|---|---|---|---|\n";
  bool any_mismatch = false;
  for (const auto& p : files) {
    ordered_json j;
    try {
      j = ordered_json::parse(*read_file(p));
    } catch (const std::exception&) {
      std::cerr << "skipping unreadable " << p.filename().string() << "\n";
      continue;
    }
    if (!j.is_object()) continue;
    const std::string q = j.contains("q") ? j["q"].dump() : "-";
    std::string kind, result;
    if (j.contains("verdict") && j.contains("target")) {
      kind = "verify " + j["target"].get<std::string>();
      result = j["verdict"].get<std::string>() + " (" + j["mismatches"].dump() + "/" + j["pairs_checked"].dump() + ")";
      any_mismatch = any_mismatch || j["verdict"] == "mismatch";
    } else if (j.contains("lambda2")) {
      kind = "spectrum " + j["family"].get<std::string>();
      result = "lambda2=" + j["lambda2"].dump() + " ratio=" + j["ratio"].dump();
    } else if (j.contains("cells") && j.contains("theorem")) {
      kind = "sweep " + j["theorem"].get<std::string>();
      result = std::string("monotone=") + (j["monotone"].get<bool>() ? "yes" : "no");
    } else if (j.contains("slices")) {
      kind = "enumerate";
      result = j["verdict"].get<std::string>();
      any_mismatch = any_mismatch || j["verdict"] == "mismatch";
    } else {
      continue;
    }
    o << "| " << p.filename().string() << " | " << kind << " | " << q << " | " << result << " |\n";
  }
  run.emit(o.str());
  return any_mismatch ? kMismatch : kOk;
}

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::resource_limit: return kResource;
    case ErrorKind::normality_required:
    case ErrorKind::convergence:
    case ErrorKind::missing_spectrum: return kMismatch;
    default: return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mrx: finite-field matrix-ring lab"};
  app.set_version_flag("--version", MRX_VERSION);
  app.require_subcommand(1);
  Common common;

  auto* enumerate = add_common(app.add_subcommand("enumerate", "enumerate M2, GL2, SL2 and determinant slices"), common);

  SpectrumArgs sa;
  auto* spectrum = add_common(app.add_subcommand("spectrum", "second eigenvalue of a graph family"), common);
  spectrum->add_option("--family", sa.family, "graph family, e.g. unit-cayley, sp-digraph-m2, tensor:a,b");
  spectrum->add_option("--method", sa.method, "auto | dense | iterative");
  spectrum->add_option("--normality", sa.normality, "verify | assume | override (digraphs)");

  VerifyArgs va;
  auto* verify = add_common(app.add_subcommand("verify", "exact structural checks"), common);
  verify->add_option("--target", va.target,
                     "g1-cases g2-cases g31-cases g1-normal g2-normal g1-mmt g2-mmt g31-squared scaling "
                     "sl2-sumcover sharpness")
      ->required();
  verify->add_option("--mode", va.mode, "auto | exhaustive | sampled");
  verify->add_option("--samples", va.samples, "pairs or entries in sampled mode");
  verify->add_option("--instances", va.instances, "random-subset instances per (i,j) for scaling");

  ExperimentArgs ea;
  auto* experiment = add_common(app.add_subcommand("experiment", "image-size trials"), common);
  experiment->add_option("--theorem", ea.theorem, "1.2 1.3 1.6 1.9 1.12 1.13 1.16 cor1.4 cor1.7 cor1.8 cor1.10 cor1.11");
  experiment->add_option("--poly", ea.poly, "sum product x_plus_yz x_times_y_plus_z xy_plus_z_plus_t sumproduct_max");
  experiment->add_option("--domains", ea.domains, "per-variable domains, e.g. SL2,M2");
  experiment->add_option("--sizes", ea.sizes, "per-set sizes: counts or q^e");
  experiment->add_option("--aliases", ea.aliases, "variable -> set map, e.g. 0,0,1,1");
  experiment->add_option("--trials", ea.trials, "trials")->check(CLI::PositiveNumber);
  experiment->add_option("--eps", ea.eps, "epsilon for cor1.4");

  SweepArgs wa;
  auto* sweep = add_common(app.add_subcommand("sweep", "threshold sweep over q and exponents"), common);
  sweep->add_option("--theorem", wa.theorem, "theorem id");
  sweep->add_option("--qs", wa.qs, "comma-separated q values (default: --q)");
  sweep->add_option("--exponents", wa.exponents, "list or lo:hi:step");
  sweep->add_option("--trials", wa.trials, "trials per cell")->check(CLI::PositiveNumber);
  sweep->add_option("--eps", wa.eps, "epsilon for cor1.4");

  ReportArgs ra;
  auto* report = add_common(app.add_subcommand("report", "summarize result files in a directory"), common);
  report->add_option("--in", ra.in, "directory of JSON results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  std::string command;
  for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!common.config.empty()) apply_config(sub, common.config);
    Run run(common, command);
    int code = kOk;
    if (sub == enumerate) code = cmd_enumerate(common, run);
    else if (sub == spectrum) code = cmd_spectrum(common, sa, run);
    else if (sub == verify) code = cmd_verify(common, va, run);
    else if (sub == experiment) code = cmd_experiment(common, ea, run);
    else if (sub == sweep) code = cmd_sweep(common, wa, run);
    else if (sub == report) code = cmd_report(common, ra, run);
    run.finish();
    return code;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << sub->help();
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::usage) std::cerr << "\n" << sub->help();
    return exit_for(e.kind());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
