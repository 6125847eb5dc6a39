#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "embedlab/embedlab.hpp"
#include "embedlab/io.hpp"

namespace embedlab::cli {
namespace {

using nlohmann::json;

// Malformed flag values; reported with the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FlagSpec {
  const char* name;
  const char* help;
  bool required = false;
};

struct CommandSpec {
  const char* name;
  const char* help;
  std::vector<FlagSpec> flags;
  bool has_csv = false;
};

const std::vector<CommandSpec>& command_table() {
  static const std::vector<CommandSpec> table = {
      {"space", "emit a truncation's points and distance matrix",
       {{"space", "M or N0 (default M)"}, {"n", "truncation level", true}}, true},
      {"dist-matrix", "emit a validated distance matrix",
       {{"space", "M or N0 (default M)"}, {"n", "truncation level"},
        {"space-file", "space JSON document to load instead of --space/--n"}}, true},
      {"roundness", "tabulate the certified distortion lower bound",
       {{"q", "roundness exponent as p/q (default 1)"},
        {"n-from", "first certificate size", true}, {"n-to", "last certificate size", true}},
       true},
      {"deficit", "evaluate a roundness certificate",
       {{"space", "M (default)"}, {"n", "truncation level", true},
        {"cert", "certificate kind: paper (default)"},
        {"indices", "comma-separated integers (default 1..n)"},
        {"q", "roundness exponent as p/q (default 1)"}}},
      {"free-norm", "transportation norm of a molecule",
       {{"space", "M or N0 (default M)"}, {"n", "truncation level"},
        {"space-file", "space JSON document"},
        {"molecule", "molecule JSON {\"weights\": {...}}"},
        {"molecule-file", "file holding the molecule JSON"}}},
      {"check-isometry", "check ||delta_x - delta_y|| = d(x,y) for all pairs",
       {{"space", "M or N0 (default M)"}, {"n", "truncation level"},
        {"space-file", "space JSON document"}}},
      {"check-n0-l1", "check F(N0) norms against l1 coefficient norms",
       {{"n", "N0 truncation level (default 10)"},
        {"count", "random molecules to test (default 100)"},
        {"seed", "random seed (default 0)"},
        {"molecule", "single molecule JSON to check instead of random ones"}}},
      {"bijection-constants", "Lipschitz constants of the canonical bijection onto N0",
       {{"n", "truncation level", true}}},
      {"embed-search", "search for a low-distortion embedding",
       {{"space", "M or N0 (default M)"}, {"n", "truncation level"},
        {"space-file", "space JSON document"},
        {"target", "l1, l2 or linf", true}, {"dim", "target dimension", true},
        {"restarts", "restarts (default 10)"}, {"iters", "iterations per restart (default 1000)"},
        {"seed", "random seed (default 0)"}, {"threads", "worker threads (default: all cores)"}}},
      {"witness", "separating coordinate for disjoint sets under an linf embedding",
       {{"n", "truncation level", true}, {"A", "comma-separated set A", true},
        {"B", "comma-separated set B", true},
        {"embedding", "embedding JSON file (default: Frechet embedding)"},
        {"D", "expansion constant (default: distortion of the embedding)"}}},
      {"perturb-bound", "bi-Lipschitz constants after an eta-perturbation",
       {{"c1", "lower constant", true}, {"c2", "upper constant", true},
        {"eta", "pointwise perturbation", true},
        {"min-distance", "minimum distance of the space (default 1)"}}},
  };
  return table;
}

const CommandSpec* find_command(const std::string& name) {
  for (const auto& c : command_table())
    if (name == c.name) return &c;
  return nullptr;
}

class Flags {
 public:
  explicit Flags(const CommandRequest& r) : r_(r) {}

  bool has(const std::string& key) const { return r_.flags.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback = "") const {
    auto it = r_.flags.find(key);
    return it == r_.flags.end() ? fallback : it->second;
  }

  long long integer(const std::string& key, std::optional<long long> fallback = {}) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw UsageError("--" + key + " is required");
    }
    return parse_int(key, str(key));
  }

  Rational rational(const std::string& key, std::optional<Rational> fallback = {}) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw UsageError("--" + key + " is required");
    }
    try {
      return parse_rational(str(key));
    } catch (const Error&) {
      throw UsageError("--" + key + " expects a rational p/q, got '" + str(key) + "'");
    }
  }

  std::vector<int> int_list(const std::string& key) const {
    std::vector<int> out;
    std::string text = str(key);
    if (!text.empty() && text.front() == '{' && text.back() == '}')
      text = text.substr(1, text.size() - 2);
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
      out.push_back(static_cast<int>(parse_int(key, item)));
    if (out.empty()) throw UsageError("--" + key + " expects a comma-separated list");
    return out;
  }

  static long long parse_int(const std::string& key, std::string text) {
    while (!text.empty() && text.front() == ' ') text.erase(text.begin());
    while (!text.empty() && text.back() == ' ') text.pop_back();
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
      throw UsageError("--" + key + " expects an integer, got '" + text + "'");
    return value;
  }

 private:
  const CommandRequest& r_;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Validation, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, "'" + path + "' is not valid JSON: " + e.what());
  }
}

json parse_json_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string(what) + " is not valid JSON: " + e.what());
  }
}

// Spaces read from a file must be metrics unless the caller reports violations itself.
TruncatedSpace load_space(const Flags& flags, int max_level, bool require_metric = true) {
  if (flags.has("space-file")) {
    TruncatedSpace space = io::space_from_json(read_json_file(flags.str("space-file")));
    if (require_metric && !validate_metric(space).ok())
      throw Error(ErrorKind::Validation, "space file is not a valid metric; run dist-matrix for details");
    return space;
  }
  const std::string label = flags.str("space", "M");
  if (!flags.has("n")) throw UsageError("--n or --space-file is required");
  const long long n = flags.integer("n");
  if (label == "M") {
    if (n < 1 || n > max_level)
      throw Error(ErrorKind::SizeLimit, "truncation level " + std::to_string(n) + " outside 1.." +
                                            std::to_string(max_level));
    return TruncatedSpace::m_space(static_cast<int>(n), max_level);
  }
  if (label == "N0") return TruncatedSpace::n0_space(static_cast<int>(n));
  throw UsageError("--space expects M or N0, got '" + label + "'");
}

json rational_json(const Rational& r) { return format_rational(r); }

std::string fixed10(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(10) << v;
  return s.str();
}

// --- subcommands -----------------------------------------------------------

void cmd_space(const Flags& flags, const CommandRequest& req, RunReport& rep) {
  const TruncatedSpace space = load_space(flags, req.max_level);
  rep.results = io::space_to_json(space);
  rep.csv = io::space_to_csv(space);
}

void cmd_dist_matrix(const Flags& flags, const CommandRequest& req, RunReport& rep) {
  const TruncatedSpace space = load_space(flags, req.max_level, false);
  const MetricReport report = validate_metric(space);
  rep.results = io::space_to_json(space);
  rep.results["violations"] = io::violations_to_json(space, report);
  rep.csv = io::space_to_csv(space);
  if (!report.ok()) {
    rep.exit_code = kExitValidation;
    rep.error = std::to_string(report.violations.size()) + " metric violation(s)";
  }
}

void cmd_roundness(const Flags& flags, const CommandRequest&, RunReport& rep) {
  const Rational q = flags.rational("q", Rational(1));
  const long long from = flags.integer("n-from");
  const long long to = flags.integer("n-to");
  if (to < from) throw Error(ErrorKind::Domain, "--n-to is smaller than --n-from");
  if (to - from > 10'000'000) throw Error(ErrorKind::SizeLimit, "table too long");
  json rows = json::array();
  std::ostringstream csv;
  csv << "n,lower_bound_num,lower_bound_den,float\n";
  for (long long n = from; n <= to; ++n) {
    const LowerBoundRecord rec = distortion_lower_bound(static_cast<int>(n), q);
    json row = {{"n", n}, {"float", rec.value}};
    csv << n << ',';
    if (rec.exact) {
      row["exact"] = rational_json(*rec.exact);
      csv << numerator(*rec.exact).str() << ',' << denominator(*rec.exact).str();
    } else {
      csv << ',';
    }
    csv << ',' << fixed10(rec.value) << '\n';
    rows.push_back(std::move(row));
  }
  rep.results = {{"q", rational_json(q)}, {"rows", std::move(rows)}};
  rep.csv = csv.str();
}

void cmd_deficit(const Flags& flags, const CommandRequest& req, RunReport& rep) {
  if (flags.str("space", "M") != "M") throw Error(ErrorKind::Domain, "certificates live in M");
  if (flags.str("cert", "paper") != "paper")
    throw UsageError("--cert supports only 'paper'");
  const TruncatedSpace space = load_space(flags, req.max_level);
  std::vector<int> indices;
  if (flags.has("indices")) {
    indices = flags.int_list("indices");
  } else {
    indices.resize(static_cast<std::size_t>(space.level()));
    std::iota(indices.begin(), indices.end(), 1);
  }
  const Rational q = flags.rational("q", Rational(1));
  const auto config = paper_certificate(space, indices);
  const auto cert = make_certificate(space, config.a_list, config.b_list, q);
  json a = json::array(), b = json::array();
  for (const auto& p : cert.a_list) a.push_back(p.to_string());
  for (const auto& p : cert.b_list) b.push_back(p.to_string());
  rep.results = {{"q", rational_json(q)},
                 {"a_list", std::move(a)},
                 {"b_list", std::move(b)},
                 {"holds", cert.sums.holds()},
                 {"deficit_float", cert.sums.deficit_approx()}};
  if (cert.sums.exact) {
    rep.results["within"] = rational_json(cert.sums.within);
    rep.results["cross"] = rational_json(cert.sums.cross);
    rep.results["deficit"] = rational_json(cert.sums.deficit());
  } else {
    rep.results["within"] = cert.sums.within_approx;
    rep.results["cross"] = cert.sums.cross_approx;
    rep.results["deficit"] = cert.sums.deficit_approx();
  }
  if (indices.size() >= 3) {
    const auto bound = distortion_lower_bound(static_cast<int>(indices.size()), q);
    rep.results["lower_bound"] = bound.value;
    if (bound.exact) rep.results["lower_bound_exact"] = rational_json(*bound.exact);
  }
}

void cmd_free_norm(const Flags& flags, const CommandRequest& req, RunReport& rep) {
  const TruncatedSpace space = load_space(flags, req.max_level);
  json doc;
  if (flags.has("molecule")) doc = parse_json_text(flags.str("molecule"), "--molecule");
  else if (flags.has("molecule-file")) doc = read_json_file(flags.str("molecule-file"));
  else throw UsageError("--molecule or --molecule-file is required");
  const Molecule m = io::molecule_from_json(space, doc);
  const FreeNormResult r = free_norm(m);
  rep.results = io::free_norm_to_json(space, r);
}

void cmd_check_isometry(const Flags& flags, const CommandRequest& req, RunReport& rep) {
  const TruncatedSpace space = load_space(flags, req.max_level, false);
  const IsometryReport report = check_delta_isometry(space);
  json violations = json::array();
  for (const auto& m : report.mismatches)
    violations.push_back({{"x", space.name(m.x)},
                          {"y", space.name(m.y)},
                          {"expected", m.expected},
                          {"norm", rational_json(m.norm)},
                          {"gap", rational_json(m.gap)},
                          {"witness_ok", m.witness_ok},
                          {"plan_ok", m.plan_ok}});
  rep.results = {{"label", to_string(space.label())},
                 {"n", space.level()},
                 {"pairs_checked", report.pairs_checked},
                 {"violations", std::move(violations)}};
  if (!report.ok()) {
    rep.exit_code = kExitValidation;
    rep.error = std::to_string(report.mismatches.size()) + " isometry violation(s)";
  }
}

void cmd_check_n0_l1(const Flags& flags, const CommandRequest&, RunReport& rep) {
  const long long n = flags.integer("n", 10);
  const TruncatedSpace space = TruncatedSpace::n0_space(static_cast<int>(n));
  std::vector<Molecule> molecules;
  if (flags.has("molecule")) {
    molecules.push_back(io::molecule_from_json(space, parse_json_text(flags.str("molecule"), "--molecule")));
  } else {
    const long long count = flags.integer("count", 100);
    if (count < 0) throw Error(ErrorKind::Domain, "--count must be nonnegative");
    std::mt19937_64 rng(static_cast<std::uint64_t>(flags.integer("seed", 0)));
    std::uniform_int_distribution<int> num(-20, 20), den(1, 12);
    for (long long i = 0; i < count; ++i) {
      std::vector<Rational> c(static_cast<std::size_t>(n));
      for (auto& x : c) x = make_rational(num(rng), den(rng));
      molecules.push_back(n0_molecule(space, c));
    }
  }
  const L1Report report = check_n0_is_l1(molecules);
  json violations = json::array();
  for (const auto& m : report.mismatches)
    violations.push_back({{"molecule", m.molecule},
                          {"norm", rational_json(m.norm)},
                          {"l1", rational_json(m.l1)}});
  rep.results = {{"n", n}, {"checked", report.checked}, {"violations", std::move(violations)}};
  if (!report.ok()) {
    rep.exit_code = kExitValidation;
    rep.error = std::to_string(report.mismatches.size()) + " l1 violation(s)";
  }
}

void cmd_bijection_constants(const Flags& flags, const CommandRequest& req, RunReport& rep) {
  const long long n = flags.integer("n");
  if (n > req.max_level) throw Error(ErrorKind::SizeLimit, "--n exceeds the size cap");
  const auto c = canonical_bijection_constants(static_cast<int>(n));
  rep.results = {{"n", n},
                 {"lip_forward", rational_json(c.lip_forward)},
                 {"lip_inverse", rational_json(c.lip_inverse)},
                 {"product", rational_json(c.product)}};
}

// Certified lower bound for any embedding of M_n into the target: roundness
// certificates for l1 (and l2, which embeds isometrically into l1); 1 otherwise.
std::pair<double, Rational> certified_bound(const TruncatedSpace& space, Norm norm) {
  if (space.label() == SpaceLabel::MSpace && norm != Norm::LInf && space.level() >= 3) {
    const Rational b = *distortion_lower_bound(space.level(), 1).exact;
    if (b > 1) return {to_double(b), b};
  }
  return {1.0, Rational(1)};
}

void cmd_embed_search(const Flags& flags, const CommandRequest& req, RunReport& rep) {
  const TruncatedSpace space = load_space(flags, req.max_level);
  const Norm norm = [&] {
    try {
      return parse_norm(flags.str("target"));
    } catch (const Error&) {
      throw UsageError("--target expects l1, l2 or linf");
    }
  }();
  const long long dim = flags.integer("dim");
  SearchOptions opt;
  opt.restarts = static_cast<std::size_t>(std::max<long long>(0, flags.integer("restarts", 10)));
  opt.iterations = static_cast<std::size_t>(std::max<long long>(0, flags.integer("iters", 1000)));
  opt.seed = static_cast<std::uint64_t>(flags.integer("seed", 0));
  opt.threads = static_cast<unsigned>(std::max<long long>(0, flags.integer("threads", 0)));
  if (dim < 1) throw Error(ErrorKind::Domain, "--dim must be at least 1");
  const SearchResult result = search_min_distortion(space, norm, static_cast<std::size_t>(dim), opt);
  const auto [bound, bound_exact] = certified_bound(space, norm);
  rep.results = io::embedding_to_json(result.map);
  rep.results["best_dist"] = result.report.value();
  rep.results["c1"] = result.report.c1;
  rep.results["c2"] = result.report.c2;
  rep.results["best_restart"] = result.best_restart;
  rep.results["certified_lower_bound"] = bound;
  rep.results["certified_lower_bound_exact"] = rational_json(bound_exact);
  rep.results["seed"] = opt.seed;
}

PointM set_flag(const Flags& flags, const std::string& key) {
  const auto elements = flags.int_list(key);
  try {
    return PointM::set(elements);
  } catch (const Error& e) {
    throw UsageError("--" + key + ": " + e.what());
  }
}

template <class T>
json witness_json(const TruncatedSpace& space, const WitnessEntry<T>& w, const T& expansion) {
  auto num = [](const T& v) -> json {
    if constexpr (std::is_floating_point_v<T>) return v;
    else return format_rational(v);
  };
  json out = {{"A", w.a_set.to_string()},
              {"B", w.b_set.to_string()},
              {"D", num(expansion)},
              {"eta", num(w.eta)},
              {"sup_norm", num(w.sup_norm)},
              {"feasible", w.feasible}};
  if (w.feasible) {
    out["coordinate"] = w.coordinate;
    if (w.coordinate < space.size()) out["coordinate_point"] = space.name(w.coordinate);
    out["sign"] = w.sign;
    out["min_separation"] = num(w.min_separation);
  }
  return out;
}

void cmd_witness(const Flags& flags, const CommandRequest& req, RunReport& rep) {
  const long long n = flags.integer("n");
  if (n < 1 || n > req.max_level)
    throw Error(ErrorKind::SizeLimit, "--n outside 1.." + std::to_string(req.max_level));
  const TruncatedSpace space = TruncatedSpace::m_space(static_cast<int>(n), req.max_level);
  const PointM a = set_flag(flags, "A");
  const PointM b = set_flag(flags, "B");

  auto finish = [&](const json& entry, bool feasible) {
    rep.results = entry;
    if (!feasible) {
      rep.exit_code = kExitInfeasible;
      rep.error = "no coordinate separates f(A) and f(B) by 4";
    }
  };

  if (!flags.has("embedding")) {
    const auto f = frechet_embedding<Rational>(space);
    const Rational expansion = flags.rational("D", Rational(1));
    const auto w = extract_witness(f, a, b, expansion);
    json entry = witness_json(space, w, expansion);
    entry["embedding"] = "frechet";
    finish(entry, w.feasible);
    return;
  }

  const json doc = read_json_file(flags.str("embedding"));
  EmbeddingMap<double> f = io::embedding_from_json(space, doc);
  if (f.norm != Norm::LInf) throw Error(ErrorKind::Domain, "witness extraction requires linf");
  const auto report = distortion(f);
  if (report.collapsed) throw Error(ErrorKind::Validation, "embedding collapses a pair of points");
  // rescale so that C1 = 1; then D is the distortion
  for (auto& row : f.vectors)
    for (auto& x : row) x /= report.c1;
  const double expansion = flags.has("D") ? to_double(flags.rational("D")) : report.dist;
  const auto w = extract_witness(f, a, b, expansion);
  json entry = witness_json(space, w, expansion);
  entry["embedding"] = flags.str("embedding");
  finish(entry, w.feasible);
}

void cmd_perturb_bound(const Flags& flags, const CommandRequest&, RunReport& rep) {
  const Rational c1 = flags.rational("c1");
  const Rational c2 = flags.rational("c2");
  const Rational eta = flags.rational("eta");
  const Rational md = flags.rational("min-distance", Rational(1));
  const auto r = perturbation_bound<Rational>(c1, c2, eta, md);
  rep.results = {{"c1_prime", rational_json(r.c1)},
                 {"c2_prime", rational_json(r.c2)},
                 {"distortion_bound", rational_json(r.c2 / r.c1)},
                 {"c1_prime_float", to_double(r.c1)},
                 {"c2_prime_float", to_double(r.c2)}};
}

using Handler = void (*)(const Flags&, const CommandRequest&, RunReport&);

Handler find_handler(const std::string& name) {
  static const std::map<std::string, Handler> handlers = {
      {"space", cmd_space},
      {"dist-matrix", cmd_dist_matrix},
      {"roundness", cmd_roundness},
      {"deficit", cmd_deficit},
      {"free-norm", cmd_free_norm},
      {"check-isometry", cmd_check_isometry},
      {"check-n0-l1", cmd_check_n0_l1},
      {"bijection-constants", cmd_bijection_constants},
      {"embed-search", cmd_embed_search},
      {"witness", cmd_witness},
      {"perturb-bound", cmd_perturb_bound},
  };
  auto it = handlers.find(name);
  return it == handlers.end() ? nullptr : it->second;
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::Infeasible ? kExitInfeasible : kExitValidation;
}

int env_max_level() {
  if (const char* env = std::getenv("EMBEDLAB_MAX_N")) {
    try {
      const long long v = Flags::parse_int("EMBEDLAB_MAX_N", env);
      if (v >= 1 && v <= 62) return static_cast<int>(v);
    } catch (const UsageError&) {
    }
  }
  return TruncatedSpace::kDefaultMaxLevel;
}

}  // namespace

RunReport dispatch(const CommandRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  rep.subcommand = request.subcommand;
  rep.inputs = json::object();
  for (const auto& [k, v] : request.flags) rep.inputs[k] = v;

  const CommandSpec* spec = find_command(request.subcommand);
  Handler handler = find_handler(request.subcommand);
  try {
    if (!spec || !handler) throw UsageError("unknown subcommand '" + request.subcommand + "'");
    for (const auto& [key, value] : request.flags) {
      bool known = false;
      for (const auto& f : spec->flags) known = known || key == f.name;
      if (!known) throw UsageError("unknown flag --" + key + " for " + request.subcommand);
    }
    if (request.format == Format::Csv && !spec->has_csv)
      throw UsageError(request.subcommand + " has no csv output");
    handler(Flags(request), request, rep);
  } catch (const UsageError& e) {
    rep.exit_code = kExitUsage;
    rep.error = e.what();
  } catch (const Error& e) {
    rep.exit_code = exit_code_for(e.kind());
    rep.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  rep.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

void emit(const RunReport& report, Format format, std::ostream& out, std::ostream& err) {
  if (!report.error.empty()) err << "embedlab " << report.subcommand << ": " << report.error << '\n';
  if (report.exit_code == kExitUsage || report.results.is_null()) return;
  switch (format) {
    case Format::Csv: out << report.csv; break;
    case Format::Json: out << report.results.dump() << '\n'; break;
    case Format::Human: out << report.results.dump(2) << '\n'; break;
  }
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"embedlab: metric embedding workbench for the space M"};
  app.require_subcommand(1);
  CommandRequest request;
  request.max_level = env_max_level();
  std::string format = "json";
  bool timing = false;
  app.add_option("--max-n", request.max_level, "cap on the M truncation level (env EMBEDLAB_MAX_N)")
      ->check(CLI::Range(1, 62));
  app.add_flag("--timing", timing, "print wall time to stderr");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> options;
  for (const auto& cmd : command_table()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--format", format, cmd.has_csv ? "json, csv or human" : "json or human")
        ->check(CLI::IsMember({"json", "csv", "human"}));
    auto& store = values[cmd.name];
    for (const auto& flag : cmd.flags) {
      CLI::Option* opt = sub->add_option(std::string("--") + flag.name, store[flag.name], flag.help);
      if (flag.required) opt->required();
      options[cmd.name].emplace_back(flag.name, opt);
    }
  }

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    request.subcommand = sub->get_name();
    for (const auto& [name, opt] : options[request.subcommand])
      if (opt->count() > 0) request.flags[name] = values[request.subcommand][name];
  }
  request.format = format == "csv" ? Format::Csv : format == "human" ? Format::Human : Format::Json;

  const RunReport report = dispatch(request);
  emit(report, request.format, out, err);
  if (timing)
    err << "embedlab " << report.subcommand << ": " << std::fixed << std::setprecision(1)
        << report.wall_ms << " ms, exit " << report.exit_code << '\n';
  return report.exit_code;
}

}  // namespace embedlab::cli
