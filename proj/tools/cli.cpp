#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "zscreen/domain.hpp"
#include "zscreen/error.hpp"
#include "zscreen/normality.hpp"
#include "zscreen/report.hpp"
#include "zscreen/screening.hpp"
#include "zscreen/stats.hpp"
#include "zscreen/tabulation.hpp"
#include "zscreen/transforms.hpp"

namespace zscreen::cli {
namespace {

using nlohmann::json;

struct Options {
  std::string input;
  std::string output;
  std::vector<std::string> biomarkers;
  std::string kind;
  std::string model;
  std::vector<std::string> transforms;
  std::vector<std::string> selections;
  std::string family = "default";
  std::string group_by = "all";
  std::string pairs = "default";
  std::string tables;
  std::string rejects;
  double alpha = 0.05;
  std::vector<double> alphas;
  std::size_t reps = 100000;
  std::optional<std::uint64_t> seed;
  std::size_t min_n = 0;
  std::size_t n = 0;
  std::size_t d = 2;
  std::optional<std::size_t> n_summer;
  std::size_t trials = 20000;
  std::size_t bins = 20;
  unsigned threads = 1;
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::string_view rest(item);
    while (!rest.empty()) {
      const auto sep = rest.find(',');
      auto tok = rest.substr(0, sep);
      if (!tok.empty()) out.emplace_back(tok);
      if (sep == std::string_view::npos) break;
      rest.remove_prefix(sep + 1);
    }
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out.flush()) throw InputError("write failed for " + path);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
}

std::uint64_t resolve_seed(Options& o, std::ostream& err) {
  if (!o.seed) {
    std::random_device rd;
    o.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err << "seed: " << *o.seed << "\n";
  }
  return *o.seed;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

StatKind resolve_kind(const Options& o) {
  auto kind = parse_kind(lower(o.kind));
  if (!kind) throw std::invalid_argument("unknown --kind '" + o.kind + "'");
  if (o.model.empty()) {
    if (*kind == StatKind::T4) throw std::invalid_argument("--kind t4 needs --model A, B or C");
    return *kind;
  }
  const auto m = lower(o.model);
  StatKind from_model;
  if (m == "a") {
    from_model = StatKind::T4A;
  } else if (m == "b") {
    from_model = StatKind::T4B;
  } else if (m == "c") {
    from_model = StatKind::T4C;
  } else {
    throw std::invalid_argument("unknown --model '" + o.model + "'");
  }
  if (*kind != StatKind::T4 && *kind != from_model)
    throw std::invalid_argument("--model conflicts with --kind " + o.kind);
  return from_model;
}

ParsedCohort load(const Options& o, std::ostream& err) {
  auto parsed = read_cohort_file(o.input);
  if (!parsed.rejects.empty()) {
    err << parsed.rejects.size() << " row(s) rejected";
    if (!o.rejects.empty()) {
      write_text(o.rejects, format_rejects(parsed.rejects));
      err << ", see " << o.rejects;
    }
    err << "\n";
  }
  return parsed;
}

std::unique_ptr<TableStore> open_store(const Options& o) {
  if (o.tables.empty()) return nullptr;
  return std::make_unique<TableStore>(std::filesystem::path(o.tables));
}

// Common config fields; thread count and output paths are not part of the
// computation and stay out so outputs compare byte for byte.
json base_config(const std::string& command, const Options& o) {
  json c{{"command", command}};
  if (!o.input.empty()) c["input"] = o.input;
  if (o.seed) c["seed"] = *o.seed;
  return c;
}

void check_mc(const Options& o) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw std::invalid_argument("--alpha must lie in (0, 1)");
  for (double a : o.alphas)
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("--alphas must lie in (0, 1)");
  if (o.reps < kMinReps) throw std::invalid_argument("--reps must be at least " + std::to_string(kMinReps));
}

int cmd_select_transform(Options& o, std::ostream& out, std::ostream& err) {
  if (o.biomarkers.size() != 1) throw std::invalid_argument("select-transform takes exactly one --biomarker");
  const auto family = parse_family(o.family);
  const std::size_t min_n = o.min_n ? o.min_n : 4;
  resolve_seed(o, err);
  const auto parsed = load(o, err);
  const auto& biomarker = o.biomarkers.front();
  const auto report = select_transformation(build_sequences(parsed.cohort, biomarker), family, min_n);

  json config = base_config("select-transform", o);
  config["biomarker"] = biomarker;
  config["family"] = o.family;
  config["min_n"] = min_n;
  std::string text = provenance_comment(config);
  text += "# biomarker: " + biomarker + "\n";
  text += "# eligible_sequences: " + std::to_string(report.eligible_sequences) + "\n";
  for (const auto& name : report.dropped) text += "# dropped: " + name + " (outside its domain)\n";
  text += format_normality_table(report);
  emit(o.output, text, out);
  err << "selected " << report.selected_transformation().name() << " for " << biomarker << "\n";
  return kExitOk;
}

int cmd_screen(Options& o, std::ostream& out, std::ostream& err) {
  check_mc(o);
  if (o.output.empty()) throw std::invalid_argument("screen needs --output <prefix>");
  const auto kind = resolve_kind(o);
  const auto grouping = parse_grouping(lower(o.group_by));
  if (!grouping) throw std::invalid_argument("unknown --group-by '" + o.group_by + "'");
  const auto biomarkers = split_list(o.biomarkers);
  if (biomarkers.empty()) throw std::invalid_argument("screen needs --biomarker");
  const std::uint64_t seed = resolve_seed(o, err);
  const auto parsed = load(o, err);

  // Transformation per biomarker: --transform, else --selection tables, else
  // selected here from the --family on the same data.
  std::vector<Transformation> transformations;
  std::string source;
  const auto names = split_list(o.transforms);
  if (!names.empty()) {
    if (names.size() != 1 && names.size() != biomarkers.size())
      throw std::invalid_argument("--transform takes one name or one per biomarker");
    for (std::size_t j = 0; j < biomarkers.size(); ++j)
      transformations.push_back(Transformation::parse(names.size() == 1 ? names[0] : names[j]));
    source = "transform";
  } else if (!o.selections.empty()) {
    if (o.selections.size() != biomarkers.size())
      throw std::invalid_argument("--selection takes one table per biomarker");
    for (const auto& path : o.selections) transformations.push_back(read_selected_transformation(read_text(path)));
    source = "selection";
  } else {
    const auto family = parse_family(o.family);
    for (const auto& b : biomarkers)
      transformations.push_back(
          select_transformation(build_sequences(parsed.cohort, b), family).selected_transformation());
    source = "family:" + o.family;
  }

  ScreenConfig config;
  config.kind = kind;
  config.biomarkers = biomarkers;
  config.transformations = transformations;
  config.alpha = o.alpha;
  config.tabulation = {o.reps, seed, o.threads};
  auto store = open_store(o);
  const auto outcome = screen(parsed.cohort, config, store.get());
  const auto groups = group_report(outcome.results, parsed.cohort, *grouping);

  json cfg = base_config("screen", o);
  cfg["kind"] = kind_token(kind);
  cfg["biomarkers"] = biomarkers;
  json tnames = json::array();
  for (const auto& t : transformations) tnames.push_back(t.name());
  cfg["transformations"] = tnames;
  cfg["transformation_source"] = source;
  cfg["alpha"] = o.alpha;
  cfg["reps"] = o.reps;
  cfg["seed"] = seed;
  cfg["group_by"] = grouping_token(*grouping);

  json doc = provenance(cfg);
  doc["schema_version"] = kSchemaVersion;
  doc["rejected_rows"] = parsed.rejects.size();
  doc["summary"] = to_json(outcome.summary);
  json results = json::array();
  for (const auto& r : outcome.results) results.push_back(to_json(r));
  doc["results"] = results;
  json cells = json::array();
  for (const auto& c : groups) {
    cells.push_back({{"group", c.group}, {"biomarker", c.biomarker}, {"kind", kind_token(c.kind)},
                     {"flagged", c.flagged}, {"eligible", c.eligible}, {"cell", c.cell()}});
  }
  doc["groups"] = cells;

  write_text(o.output + ".json", doc.dump(2) + "\n");
  std::string summary = provenance_comment(cfg);
  if (!outcome.summary.note.empty()) summary += "# note: " + outcome.summary.note + "\n";
  summary += format_group_table(groups);
  write_text(o.output + ".summary.csv", summary);
  if (!parsed.rejects.empty()) write_text(o.output + ".rejects.csv", format_rejects(parsed.rejects));

  out << "flagged " << format_cell(outcome.summary.flagged, outcome.summary.eligible) << " of "
      << outcome.summary.total << " sequences";
  if (!outcome.summary.note.empty()) out << " (" << outcome.summary.note << ")";
  out << "\n";
  return kExitOk;
}

NullModel calibration_model(StatKind kind, const Options& o, std::uint64_t seed) {
  return make_null_model(kind, o.n, o.d, o.n_summer.value_or(o.n / 2), seed);
}

json model_config(const std::string& command, StatKind kind, const Options& o, std::uint64_t seed) {
  json c = base_config(command, o);
  c["kind"] = kind_token(kind);
  c["n"] = o.n;
  if (kind == StatKind::T3) c["d"] = o.d;
  if (kind == StatKind::T4B) c["n_summer"] = o.n_summer.value_or(o.n / 2);
  c["reps"] = o.reps;
  c["seed"] = seed;
  return c;
}

int cmd_calibrate(Options& o, std::ostream& out, std::ostream& err) {
  check_mc(o);
  const auto kind = resolve_kind(o);
  const std::uint64_t seed = resolve_seed(o, err);
  const auto model = calibration_model(kind, o, seed);
  auto store = open_store(o);
  const auto r = calibrate(model, o.alpha, {o.reps, seed, o.threads}, o.trials, store.get());

  json cfg = model_config("calibrate", kind, o, seed);
  cfg["alpha"] = o.alpha;
  cfg["trials"] = o.trials;
  std::string text = provenance_comment(cfg);
  text += "kind,n,d,alpha,reps,trials,critical,rejections,rate\n";
  text += std::string(kind_token(kind)) + "," + std::to_string(model.n) + "," + std::to_string(model.d) + "," +
          format_real(o.alpha) + "," + std::to_string(r.reps) + "," + std::to_string(r.trials) + "," +
          format_real(r.critical) + "," + std::to_string(r.rejections) + "," + format_real(r.rate) + "\n";
  emit(o.output, text, out);
  if (!o.output.empty() && o.output != "-") out << "rejection rate " << format_real(r.rate) << "\n";
  return kExitOk;
}

int cmd_tabulate(Options& o, std::ostream& out, std::ostream& err) {
  check_mc(o);
  const auto kind = resolve_kind(o);
  if (kind == StatKind::T0) throw std::invalid_argument("t0 uses the exact Student law; nothing to tabulate");
  const std::uint64_t seed = resolve_seed(o, err);
  const auto model = calibration_model(kind, o, seed);
  std::vector<double> alphas = o.alphas.empty() ? std::vector<double>{o.alpha} : o.alphas;
  auto store = open_store(o);
  const auto tables = tabulate_levels(model, alphas, {o.reps, seed, o.threads}, store.get());

  json cfg = model_config("tabulate", kind, o, seed);
  cfg["alphas"] = alphas;
  std::string text = provenance_comment(cfg);
  text += "kind,n,d,alpha,reps,quantile\n";
  for (const auto& t : tables) {
    text += std::string(kind_token(kind)) + "," + std::to_string(t.key.n) + "," + std::to_string(t.key.d) + "," +
            format_real(t.key.alpha) + "," + std::to_string(t.reps) + "," + format_real(t.quantile) + "\n";
  }
  emit(o.output, text, out);
  return kExitOk;
}

int cmd_correlate(Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, std::string>> pairs;
  if (lower(o.pairs) == "default") {
    pairs = preset_pairs();
  } else {
    for (const auto& item : split_list({o.pairs})) {
      const auto sep = item.find(':');
      if (sep == std::string::npos || sep == 0 || sep + 1 == item.size())
        throw std::invalid_argument("--pairs expects a:b entries, got '" + item + "'");
      pairs.emplace_back(item.substr(0, sep), item.substr(sep + 1));
    }
  }
  const std::size_t min_n = o.min_n ? o.min_n : 10;
  resolve_seed(o, err);
  const auto parsed = load(o, err);
  const auto hist = correlation_report(parsed.cohort, pairs, min_n, o.bins);

  json cfg = base_config("correlate", o);
  json jp = json::array();
  for (const auto& [a, b] : pairs) jp.push_back(a + ":" + b);
  cfg["pairs"] = jp;
  cfg["min_n"] = min_n;
  cfg["bins"] = o.bins;
  emit(o.output, provenance_comment(cfg) + format_histograms(hist), out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Longitudinal biomarker outlier screening", "zscreen"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  auto add_input = [&](CLI::App* c) { c->add_option("--input", o.input, "Cohort CSV")->required(); };
  auto add_mc = [&](CLI::App* c) {
    c->add_option("--reps", o.reps, "Monte Carlo replicates")->capture_default_str();
    c->add_option("--seed", o.seed, "Master seed (generated and printed when absent)");
    c->add_option("--threads", o.threads, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
    c->add_option("--tables", o.tables, "Quantile table file (read and extended)");
  };
  auto add_kind = [&](CLI::App* c) {
    c->add_option("--kind", o.kind, "t0, t1, t2, t3, t4a, t4b, t4c or t4")->required();
    c->add_option("--model", o.model, "Regression model A, B or C (with --kind t4)");
    c->add_option("--alpha", o.alpha, "Significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  };

  auto* sel = app.add_subcommand("select-transform", "Score a transformation family and select one");
  add_input(sel);
  sel->add_option("--biomarker", o.biomarkers, "Biomarker name")->required();
  sel->add_option("--family", o.family, "'default' or a comma-separated list")->capture_default_str();
  sel->add_option("--min-n", o.min_n, "Minimum sequence length (default 4)");
  sel->add_option("--output", o.output, "Output table (stdout when absent)");
  sel->add_option("--seed", o.seed, "Recorded seed (the computation draws nothing)");
  sel->add_option("--rejects", o.rejects, "Write rejected input rows here");

  auto* scr = app.add_subcommand("screen", "Screen sequences with one statistic");
  add_input(scr);
  add_kind(scr);
  add_mc(scr);
  scr->add_option("--biomarker", o.biomarkers, "Biomarker(s); several for t3")->required();
  scr->add_option("--transform", o.transforms, "Transformation name(s)");
  scr->add_option("--selection", o.selections, "Selection table(s) from select-transform");
  scr->add_option("--family", o.family, "Family selected from when no transformation is given")
      ->capture_default_str();
  scr->add_option("--group-by", o.group_by, "all, status or discipline")->capture_default_str();
  scr->add_option("--output", o.output, "Output prefix (<prefix>.json, <prefix>.summary.csv)")->required();
  scr->add_option("--rejects", o.rejects, "Write rejected input rows here");

  auto* cal = app.add_subcommand("calibrate", "Empirical rejection rate of fresh null data");
  add_kind(cal);
  add_mc(cal);
  cal->add_option("--n", o.n, "Sequence length")->required();
  cal->add_option("--d", o.d, "Dimension for t3")->capture_default_str();
  cal->add_option("--n-summer", o.n_summer, "Summer observations for model B (default n/2)");
  cal->add_option("--trials", o.trials, "Fresh null sequences to flag")->capture_default_str();
  cal->add_option("--output", o.output, "Output CSV (stdout when absent)");

  auto* tab = app.add_subcommand("tabulate", "Tabulate null quantiles into a table file");
  add_kind(tab);
  add_mc(tab);
  tab->add_option("--n", o.n, "Sequence length")->required();
  tab->add_option("--d", o.d, "Dimension for t3")->capture_default_str();
  tab->add_option("--n-summer", o.n_summer, "Summer observations for model B (default n/2)");
  tab->add_option("--alphas", o.alphas, "Several levels from one draw set")->delimiter(',');
  tab->add_option("--output", o.output, "Output CSV (stdout when absent)");

  auto* cor = app.add_subcommand("correlate", "Histogram of within-individual correlations");
  add_input(cor);
  cor->add_option("--pairs", o.pairs, "'default' or a:b,c:d")->capture_default_str();
  cor->add_option("--min-n", o.min_n, "Minimum paired observations (default 10)");
  cor->add_option("--bins", o.bins, "Histogram bins")->capture_default_str()->check(CLI::Range(1, 10000));
  cor->add_option("--output", o.output, "Output CSV (stdout when absent)");
  cor->add_option("--seed", o.seed, "Recorded seed (the computation draws nothing)");
  cor->add_option("--rejects", o.rejects, "Write rejected input rows here");

  std::vector<std::string> argv_store{"zscreen"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*sel) return cmd_select_transform(o, out, err);
    if (*scr) return cmd_screen(o, out, err);
    if (*cal) return cmd_calibrate(o, out, err);
    if (*tab) return cmd_tabulate(o, out, err);
    if (*cor) return cmd_correlate(o, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const StatisticalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitStatistical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace zscreen::cli
