#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "zolab/error.hpp"
#include "zolab/eval.hpp"
#include "zolab/image.hpp"
#include "zolab/local.hpp"
#include "zolab/parallel.hpp"
#include "zolab/percolation.hpp"
#include "zolab/thresholds.hpp"

namespace zolab::cli {

namespace {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  int n = 0;
  std::vector<int> n_list;
  std::optional<double> p;
  std::optional<double> alpha;
  double c = 1.0;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  std::string formula;
  std::string formula_file;
  std::string local;
  std::string pattern;
  std::string target;
  std::string image;
  std::string crossing = "blr";
  bool duality = false;
  std::string format = "csv";
  std::string out;
  std::string pattern_out;
  int max_enum_n = 4;
  int max_radius = kMaxEnumerationRadius;
  std::uint64_t work_budget = EvalOptions{}.work_budget;
  unsigned workers = default_workers();
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto text = v.get<std::string>();
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char ch : text) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return number(v.get<double>());
  return v.dump();
}

// Resolved configuration echoed into every document. Worker count is left
// out: output must not depend on it.
Json config_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  if (cfg.n != 0) j["n"] = cfg.n;
  if (!cfg.n_list.empty()) j["n_list"] = cfg.n_list;
  if (cfg.p) j["p"] = *cfg.p;
  if (cfg.alpha) {
    j["alpha"] = *cfg.alpha;
    j["c"] = cfg.c;
  }
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  if (!cfg.formula.empty()) j["formula"] = cfg.formula;
  if (!cfg.formula_file.empty()) j["formula_file"] = cfg.formula_file;
  if (!cfg.local.empty()) j["local"] = cfg.local;
  if (!cfg.pattern.empty()) j["pattern"] = cfg.pattern;
  if (!cfg.target.empty()) j["target"] = cfg.target;
  if (!cfg.image.empty()) j["image"] = cfg.image;
  if (cfg.command == "percolate") {
    j["crossing"] = cfg.crossing;
    j["duality"] = cfg.duality;
  }
  j["max_enum_n"] = cfg.max_enum_n;
  j["max_radius"] = cfg.max_radius;
  j["work_budget"] = cfg.work_budget;
  j["format"] = cfg.format;
  return j;
}

class Document {
 public:
  explicit Document(const RunConfig& cfg) : cfg_(cfg) {}

  void add_row(Json row) { rows_.push_back(std::move(row)); }

  std::string render() const {
    const Json config = config_json(cfg_);
    if (cfg_.format == "json") {
      Json doc;
      doc["config"] = config;
      doc["rows"] = rows_;
      return doc.dump(2) + "\n";
    }
    std::string out = "# zolab " + config.dump() + "\n";
    if (rows_.empty()) return out;
    bool first = true;
    for (const auto& item : rows_.front().items()) {
      if (!first) out += ',';
      out += item.key();
      first = false;
    }
    out += '\n';
    for (const auto& row : rows_) {
      first = true;
      for (const auto& item : row.items()) {
        if (!first) out += ',';
        out += csv_cell(item.value());
        first = false;
      }
      out += '\n';
    }
    return out;
  }

 private:
  const RunConfig& cfg_;
  Json rows_ = Json::array();
};

Json estimate_row(const SweepRow& row) {
  const auto& e = row.estimate;
  Json j;
  j["n"] = e.n;
  j["p"] = e.p;
  j["samples"] = e.samples;
  j["hits"] = e.hits;
  j["phat"] = e.phat;
  j["ci_low"] = e.ci_low;
  j["ci_high"] = e.ci_high;
  j["lower_bound"] = row.bounds ? Json(row.bounds->lower) : Json();
  j["upper_bound"] = row.bounds ? Json(row.bounds->upper) : Json();
  j["classification"] = row.classification ? Json(to_string(*row.classification)) : Json();
  return j;
}

LocalOptions local_options(const RunConfig& cfg) {
  LocalOptions o;
  o.max_radius = cfg.max_radius;
  o.workers = cfg.workers;
  o.eval.work_budget = cfg.work_budget;
  return o;
}

BasicLocalSentence load_local(const RunConfig& cfg) { return parse_local_sentence(read_file(cfg.local)); }

Formula load_formula(const RunConfig& cfg) {
  if (!cfg.formula.empty() && !cfg.formula_file.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give only one of --formula and --formula-file");
  }
  if (!cfg.formula.empty()) return parse(cfg.formula);
  if (!cfg.formula_file.empty()) return parse_formula_file(read_file(cfg.formula_file));
  throw Error(ErrorCode::InvalidArgument, "a formula is required (--formula or --formula-file)");
}

Target load_target(const RunConfig& cfg) {
  const int given = (!cfg.formula.empty() || !cfg.formula_file.empty() ? 1 : 0) +
                    (!cfg.local.empty() ? 1 : 0) + (!cfg.pattern.empty() ? 1 : 0) +
                    (!cfg.target.empty() ? 1 : 0);
  if (given != 1) {
    throw Error(ErrorCode::InvalidArgument,
                "choose exactly one target: --formula/--formula-file, --local, --pattern or --target");
  }
  if (!cfg.local.empty()) return factor(load_local(cfg), local_options(cfg));
  if (!cfg.pattern.empty()) return parse_factored_pattern(read_file(cfg.pattern));
  if (!cfg.target.empty()) {
    if (cfg.target == "parity") return ParityTarget{CrossingColor::Black};
    if (cfg.target == "parity-white") return ParityTarget{CrossingColor::White};
    return parse_crossing(cfg.target);
  }
  Formula f = load_formula(cfg);
  check_well_formed(f);
  return f;
}

double resolve_p(const RunConfig& cfg, int n) {
  if (cfg.p.has_value() == cfg.alpha.has_value()) {
    throw Error(ErrorCode::InvalidArgument, "give exactly one of --p and --alpha");
  }
  if (cfg.p) return *cfg.p;
  return PowerLawRate{cfg.c, *cfg.alpha}.at(n);
}

std::vector<int> resolve_n_list(const RunConfig& cfg) {
  if (cfg.n != 0 && !cfg.n_list.empty()) throw Error(ErrorCode::InvalidArgument, "give --n or --n-list, not both");
  if (cfg.n != 0) return {cfg.n};
  if (cfg.n_list.empty()) throw Error(ErrorCode::InvalidArgument, "--n or --n-list is required");
  return cfg.n_list;
}

MonteCarloOptions mc_options(const RunConfig& cfg) {
  MonteCarloOptions o;
  o.workers = cfg.workers;
  o.eval.work_budget = cfg.work_budget;
  return o;
}

std::string run_sample(const RunConfig& cfg) {
  if (!cfg.p) throw Error(ErrorCode::InvalidArgument, "--p is required");
  const Image img = sample({cfg.n, *cfg.p, cfg.seed});
  std::string pbm = write_pbm(img);
  // Config goes in a PBM comment right after the magic number.
  return "P1\n# zolab " + config_json(cfg).dump() + "\n" + pbm.substr(3);
}

void run_eval(const RunConfig& cfg, Document& doc) {
  if (cfg.image.empty()) throw Error(ErrorCode::InvalidArgument, "--image is required");
  const Image img = read_pbm(read_file(cfg.image));
  const Formula f = load_formula(cfg);
  check_well_formed(f);
  EvalOptions eval;
  eval.work_budget = cfg.work_budget;
  Json row;
  row["n"] = img.n();
  row["formula"] = to_string(f);
  row["satisfied"] = evaluate(img, f, {}, std::nullopt, eval);
  doc.add_row(std::move(row));
}

void run_exact(const RunConfig& cfg, Document& doc) {
  if (!cfg.p) throw Error(ErrorCode::InvalidArgument, "--p is required");
  const Target target = load_target(cfg);
  EnumerationOptions o;
  o.max_enum_n = cfg.max_enum_n;
  o.workers = cfg.workers;
  o.eval.work_budget = cfg.work_budget;
  for (int n : resolve_n_list(cfg)) {
    Json row;
    row["n"] = n;
    row["p"] = *cfg.p;
    row["target"] = describe(target);
    row["probability"] = exact_probability(target, n, *cfg.p, o);
    doc.add_row(std::move(row));
  }
}

void run_estimate(const RunConfig& cfg, Document& doc, const Target& target) {
  const auto* fp = std::get_if<FactoredPattern>(&target);
  std::optional<Limit> classification;
  if (fp != nullptr && cfg.alpha) classification = classify(index(*fp), PowerLawRate{cfg.c, *cfg.alpha});
  for (int n : resolve_n_list(cfg)) {
    const double p = resolve_p(cfg, n);
    SweepRow row;
    row.estimate = estimate(target, n, p, cfg.samples, cfg.seed, mc_options(cfg));
    if (fp != nullptr && n >= 2 * fp->r + 2) row.bounds = pattern_bounds(n, p, *fp);
    row.classification = classification;
    doc.add_row(estimate_row(row));
  }
}

void run_index(const RunConfig& cfg, Document& doc) {
  if (cfg.local.empty()) throw Error(ErrorCode::InvalidArgument, "--local is required");
  const SentenceIndex k = index(load_local(cfg), local_options(cfg));
  Json row;
  row["index"] = k.to_string();
  row["threshold_exponent"] = threshold_exponent(k).to_string();
  doc.add_row(std::move(row));
}

void run_classify(const RunConfig& cfg, Document& doc) {
  if (cfg.local.empty()) throw Error(ErrorCode::InvalidArgument, "--local is required");
  if (!cfg.alpha) throw Error(ErrorCode::InvalidArgument, "--alpha is required");
  const PowerLawRate rate{cfg.c, *cfg.alpha};
  const SentenceIndex k = index(load_local(cfg), local_options(cfg));
  Json row;
  row["index"] = k.to_string();
  row["threshold_exponent"] = threshold_exponent(k).to_string();
  row["alpha"] = rate.alpha;
  row["c"] = rate.c;
  row["classification"] = to_string(classify(k, rate));
  doc.add_row(std::move(row));
}

void run_sweep(const RunConfig& cfg, Document& doc) {
  if (!cfg.alpha) throw Error(ErrorCode::InvalidArgument, "--alpha is required");
  if (cfg.p) throw Error(ErrorCode::InvalidArgument, "sweep takes a rate (--alpha, --c), not --p");
  if (cfg.n_list.empty()) throw Error(ErrorCode::InvalidArgument, "--n-list is required");
  const Target target = load_target(cfg);
  const auto rows =
      sweep(target, PowerLawRate{cfg.c, *cfg.alpha}, cfg.n_list, cfg.samples, cfg.seed, mc_options(cfg));
  for (const auto& row : rows) doc.add_row(estimate_row(row));
}

void run_decompose(const RunConfig& cfg, Document& doc, std::ostream& err) {
  if (cfg.local.empty()) throw Error(ErrorCode::InvalidArgument, "--local is required");
  const BasicLocalSentence sentence = load_local(cfg);
  const FactoredPattern fp = factor(sentence, local_options(cfg));
  for (std::size_t i = 0; i < fp.slots.size(); ++i) {
    const auto& slot = fp.slots[i];
    Json row;
    row["slot"] = i + 1;
    row["formula"] = to_string(sentence.psis[i]);
    row["descriptions"] = slot.size();
    row["min_black"] = slot.min_black() ? Json(*slot.min_black()) : Json("INFINITY");
    row["min_white"] = slot.min_white() ? Json(*slot.min_white()) : Json("INFINITY");
    doc.add_row(std::move(row));
  }
  if (!cfg.pattern_out.empty()) {
    std::ofstream file(cfg.pattern_out, std::ios::binary);
    if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + cfg.pattern_out + "'");
    file << write_factored_pattern(fp);
  }
  (void)err;
}

void run_percolate(const RunConfig& cfg, Document& doc) {
  if (cfg.duality) {
    for (int n : resolve_n_list(cfg)) {
      const auto report = duality_check(n, cfg.max_enum_n, cfg.workers);
      Json row;
      row["n"] = n;
      row["total"] = report.total;
      row["violations"] = report.violations;
      row["blr_count"] = report.blr_count;
      doc.add_row(std::move(row));
    }
    return;
  }
  run_estimate(cfg, doc, Target{parse_crossing(cfg.crossing)});
}

void add_caps(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--max-enum-n", cfg.max_enum_n, "Largest n for exhaustive enumeration")
      ->envname("ZOLAB_MAX_ENUM_N")
      ->capture_default_str();
  sub->add_option("--max-radius", cfg.max_radius, "Largest radius for ball enumeration")
      ->envname("ZOLAB_MAX_RADIUS")
      ->capture_default_str();
  sub->add_option("--work-budget", cfg.work_budget, "Formula evaluation step budget")
      ->envname("ZOLAB_WORK_BUDGET")
      ->capture_default_str();
  sub->add_option("--workers", cfg.workers, "Worker threads (does not change results)")
      ->envname("ZOLAB_WORKERS")
      ->check(CLI::PositiveNumber);
}

void add_output(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->envname("ZOLAB_FORMAT")
      ->capture_default_str();
  sub->add_option("--out", cfg.out, "Write the document here instead of stdout")->envname("ZOLAB_OUT");
}

void add_target(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--formula", cfg.formula, "First-order sentence")->envname("ZOLAB_FORMULA");
  sub->add_option("--formula-file", cfg.formula_file, "File holding a sentence (# comments)")
      ->envname("ZOLAB_FORMULA_FILE");
  sub->add_option("--local", cfg.local, "Basic local sentence JSON {r, psis}")->envname("ZOLAB_LOCAL");
  sub->add_option("--pattern", cfg.pattern, "Factored pattern JSON")->envname("ZOLAB_PATTERN");
  sub->add_option("--target", cfg.target, "Built-in target: parity, parity-white, blr, wtb, wlr, btb")
      ->envname("ZOLAB_TARGET");
}

void add_n(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--n", cfg.n, "Image side length")->envname("ZOLAB_N")->check(CLI::PositiveNumber);
}

void add_n_list(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--n-list", cfg.n_list, "Comma-separated side lengths")
      ->delimiter(',')
      ->envname("ZOLAB_N_LIST")
      ->check(CLI::PositiveNumber);
}

void add_p(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--p", cfg.p, "Pixel black probability")->envname("ZOLAB_P")->check(CLI::Range(0.0, 1.0));
}

void add_rate(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--alpha", cfg.alpha, "Rate exponent: p(n) = min(c n^-alpha, 1/2)")->envname("ZOLAB_ALPHA");
  sub->add_option("--c", cfg.c, "Rate coefficient")->envname("ZOLAB_C")->capture_default_str();
}

void add_sampling(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--samples", cfg.samples, "Monte Carlo replicates")
      ->envname("ZOLAB_SAMPLES")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Master seed")->envname("ZOLAB_SEED")->capture_default_str();
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + cfg.out + "'");
  file << text;
}

void report_error(std::ostream& err, std::string_view code, const std::string& message) {
  Json j;
  j["error"] = code;
  j["message"] = message;
  err << j.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Random binary images: first-order sentences, thresholds and crossings"};
  app.name("zolab");
  app.require_subcommand(1, 1);

  auto* sample_cmd = app.add_subcommand("sample", "Emit a random PBM image");
  add_n(sample_cmd, cfg);
  add_p(sample_cmd, cfg);
  sample_cmd->add_option("--seed", cfg.seed, "Seed")->envname("ZOLAB_SEED")->capture_default_str();
  sample_cmd->add_option("--out", cfg.out, "Write the image here")->envname("ZOLAB_OUT");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a sentence on a PBM image");
  eval_cmd->add_option("--image", cfg.image, "PBM (P1) image")->envname("ZOLAB_IMAGE");
  eval_cmd->add_option("--formula", cfg.formula, "First-order sentence")->envname("ZOLAB_FORMULA");
  eval_cmd->add_option("--formula-file", cfg.formula_file, "File holding a sentence")
      ->envname("ZOLAB_FORMULA_FILE");
  add_caps(eval_cmd, cfg);
  add_output(eval_cmd, cfg);

  auto* exact_cmd = app.add_subcommand("exact", "Exact probability by enumerating all images");
  add_n(exact_cmd, cfg);
  add_n_list(exact_cmd, cfg);
  add_p(exact_cmd, cfg);
  add_target(exact_cmd, cfg);
  add_caps(exact_cmd, cfg);
  add_output(exact_cmd, cfg);

  auto* estimate_cmd = app.add_subcommand("estimate", "Monte Carlo estimate with a Wilson interval");
  add_n(estimate_cmd, cfg);
  add_n_list(estimate_cmd, cfg);
  add_p(estimate_cmd, cfg);
  add_rate(estimate_cmd, cfg);
  add_sampling(estimate_cmd, cfg);
  add_target(estimate_cmd, cfg);
  add_caps(estimate_cmd, cfg);
  add_output(estimate_cmd, cfg);

  auto* index_cmd = app.add_subcommand("index", "Index k(L) of a basic local sentence");
  index_cmd->add_option("--local", cfg.local, "Basic local sentence JSON")->envname("ZOLAB_LOCAL");
  add_caps(index_cmd, cfg);
  add_output(index_cmd, cfg);

  auto* classify_cmd = app.add_subcommand("classify", "Limit of a basic local sentence along a rate");
  classify_cmd->add_option("--local", cfg.local, "Basic local sentence JSON")->envname("ZOLAB_LOCAL");
  add_rate(classify_cmd, cfg);
  add_caps(classify_cmd, cfg);
  add_output(classify_cmd, cfg);

  auto* sweep_cmd = app.add_subcommand("sweep", "Threshold table over a list of n");
  add_n_list(sweep_cmd, cfg);
  add_rate(sweep_cmd, cfg);
  add_p(sweep_cmd, cfg);
  add_sampling(sweep_cmd, cfg);
  add_target(sweep_cmd, cfg);
  add_caps(sweep_cmd, cfg);
  add_output(sweep_cmd, cfg);

  auto* decompose_cmd = app.add_subcommand("decompose", "Description sets of a basic local sentence");
  decompose_cmd->add_option("--local", cfg.local, "Basic local sentence JSON")->envname("ZOLAB_LOCAL");
  decompose_cmd->add_option("--pattern-out", cfg.pattern_out, "Write the factored pattern JSON here");
  add_caps(decompose_cmd, cfg);
  add_output(decompose_cmd, cfg);

  auto* percolate_cmd = app.add_subcommand("percolate", "Crossing estimates or the duality check");
  percolate_cmd->add_flag("--duality", cfg.duality, "Exhaustive BLR/WTB duality check");
  percolate_cmd->add_option("--crossing", cfg.crossing, "blr, wtb, wlr or btb")
      ->envname("ZOLAB_CROSSING")
      ->capture_default_str();
  add_n(percolate_cmd, cfg);
  add_n_list(percolate_cmd, cfg);
  add_p(percolate_cmd, cfg);
  add_rate(percolate_cmd, cfg);
  add_sampling(percolate_cmd, cfg);
  add_caps(percolate_cmd, cfg);
  add_output(percolate_cmd, cfg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "UsageError", e.what());
    return kExitInputError;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    Document doc(cfg);
    if (cfg.command == "sample") {
      if (cfg.n == 0) throw Error(ErrorCode::InvalidArgument, "--n is required");
      emit(cfg, run_sample(cfg), out);
      return kExitOk;
    }
    if (cfg.command == "eval") run_eval(cfg, doc);
    else if (cfg.command == "exact") run_exact(cfg, doc);
    else if (cfg.command == "estimate") run_estimate(cfg, doc, load_target(cfg));
    else if (cfg.command == "index") run_index(cfg, doc);
    else if (cfg.command == "classify") run_classify(cfg, doc);
    else if (cfg.command == "sweep") run_sweep(cfg, doc);
    else if (cfg.command == "decompose") run_decompose(cfg, doc, err);
    else if (cfg.command == "percolate") run_percolate(cfg, doc);
    emit(cfg, doc.render(), out);
    return kExitOk;
  } catch (const Error& e) {
    report_error(err, to_string(e.code()), e.what());
    return is_resource_error(e.code()) ? kExitResourceRefusal : kExitInputError;
  }
}

}  // namespace zolab::cli
