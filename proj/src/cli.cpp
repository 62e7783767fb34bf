#include "minoria/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "minoria/dataset.hpp"
#include "minoria/explore.hpp"
#include "minoria/kmeans.hpp"
#include "minoria/mining.hpp"
#include "minoria/report.hpp"

namespace minoria {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoCandidate = 3;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) {
    double v = 0.0;
    const char* b = item.data();
    auto r = std::from_chars(b, b + item.size(), v);
    if (r.ec != std::errc{} || r.ptr != b + item.size()) {
      throw std::runtime_error(what + ": bad number '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error(what + ": empty list");
  return out;
}

std::vector<std::string> read_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("'" + path + "': empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return split_list(line);
}

// Role flags: "" = auto-detect a column with the conventional name,
// "none" = ignore even if such a column exists, anything else = use that
// column.
struct ColumnFlags {
  std::string features;  // comma list; "" = every non-role column
  std::string label;
  std::string prediction;
  std::string loss;
  std::string group;
};

void add_column_flags(CLI::App* cmd, ColumnFlags& flags) {
  cmd->add_option("--features", flags.features,
                  "Comma-separated feature columns (default: every column "
                  "not claimed by a role)");
  cmd->add_option("--label", flags.label,
                  "Label column ('' auto-detects 'label', 'none' disables)");
  cmd->add_option("--prediction", flags.prediction,
                  "Prediction column ('' auto-detects 'prediction', 'none' "
                  "disables)");
  cmd->add_option("--loss", flags.loss,
                  "Loss column ('' auto-detects 'loss', 'none' disables)");
  cmd->add_option("--group", flags.group,
                  "Group column ('' auto-detects 'group', 'none' disables)");
}

Dataset load_with_flags(const std::string& path, const ColumnFlags& flags) {
  const std::vector<std::string> header = read_header(path);
  auto resolve = [&](const std::string& flag, const char* conventional)
      -> std::optional<std::string> {
    if (flag == "none") return std::nullopt;
    if (!flag.empty()) return flag;
    if (std::find(header.begin(), header.end(), conventional) != header.end()) {
      return std::string(conventional);
    }
    return std::nullopt;
  };

  ColumnMap columns;
  columns.label = resolve(flags.label, "label");
  columns.prediction = resolve(flags.prediction, "prediction");
  columns.loss = resolve(flags.loss, "loss");
  columns.group = resolve(flags.group, "group");
  if (!flags.features.empty()) {
    columns.features = split_list(flags.features);
  } else {
    for (const std::string& name : header) {
      const bool taken = (columns.label && name == *columns.label) ||
                         (columns.prediction && name == *columns.prediction) ||
                         (columns.loss && name == *columns.loss) ||
                         (columns.group && name == *columns.group);
      if (!taken) columns.features.push_back(name);
    }
  }
  return load_csv(path, columns);
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

RatioMode ratio_mode_of(const std::string& name) {
  if (name == "minor_over_total") return RatioMode::kMinorOverTotal;
  if (name == "minor_over_major") return RatioMode::kMinorOverMajor;
  throw std::runtime_error("unknown ratio mode '" + name + "'");
}

ordered_json params_json(const MiningParams& p, double min_sep_deg) {
  ordered_json j;
  j["p"] = p.p;
  j["tau"] = p.tau;
  j["top_l"] = p.top_l;
  j["min_sep_deg"] = min_sep_deg;
  return j;
}

// Shared tail: emit candidate JSON (+ optional report CSV for the top
// accepted direction); empty accepted set maps to the no-candidate exit.
int emit_mining_output(const Dataset& ds_original,
                       const std::vector<MiningCandidate>& candidates,
                       const ordered_json& provenance,
                       const std::string& out_path,
                       const std::string& report_path,
                       const std::string& percentiles_text,
                       const ReportOptions& opts) {
  const std::string doc =
      candidates_to_json(candidates, ds_original, provenance.dump(), opts);
  write_text(out_path, doc);
  if (candidates.empty()) {
    std::cerr << "no candidate passed the disparity threshold\n";
    return kExitNoCandidate;
  }
  if (!report_path.empty()) {
    const std::vector<double> percentiles =
        parse_double_list(percentiles_text, "--percentiles");
    const auto rows =
        tail_report(ds_original, candidates.front().direction, percentiles, opts);
    std::ostringstream csv;
    write_report_csv(rows, csv);
    write_text(report_path, csv.str());
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"minoria: mine under-represented, under-performing group "
               "candidates via high-skew projections"};
  app.require_subcommand(1);

  // --- synth ---
  auto* synth = app.add_subcommand(
      "synth", "Generate a two-Gaussian majority/minority dataset CSV");
  std::string synth_out = "-";
  SynthSpec spec;
  spec.n_major = 1000;
  spec.n_minor = 100;
  std::string mean_major_text, mean_minor_text;
  synth->add_option("--out", synth_out, "Output CSV path")->required();
  synth->add_option("--d", spec.d, "Dimensions")->check(CLI::Range(2, 1000000));
  synth->add_option("--n-major", spec.n_major, "Majority rows");
  synth->add_option("--n-minor", spec.n_minor, "Minority rows");
  synth->add_option("--mean-major", mean_major_text,
                    "Majority mean, comma list (default all 0)");
  synth->add_option("--mean-minor", mean_minor_text,
                    "Minority mean, comma list (default all 1)");
  synth->add_option("--sd-major", spec.sd_major, "Majority stddev");
  synth->add_option("--sd-minor", spec.sd_minor, "Minority stddev");
  synth->add_option("--seed", spec.seed, "RNG seed")->envname("MINORIA_SEED");

  // --- shared mining options ---
  MiningParams mining;
  double min_sep_deg = 15.0;
  ReportOptions ropts;
  std::string ratio_mode_text = "minor_over_major";
  auto add_mining_flags = [&](CLI::App* cmd) {
    cmd->add_option("--p", mining.p, "Tail fraction")
        ->check(CLI::Range(1e-12, 1.0));
    cmd->add_option("--tau", mining.tau, "Disparity acceptance threshold");
    cmd->add_option("--l", mining.top_l, "Max accepted candidates");
    cmd->add_option("--min-sep-deg", min_sep_deg,
                    "Minimum angular separation between accepted directions "
                    "(degrees)")
        ->check(CLI::Range(0.0, 90.0));
    cmd->add_option("--positive-class", ropts.positive_class,
                    "Positive class for binary F1");
    cmd->add_option("--minority-group", ropts.minority_group,
                    "Group value treated as the minority");
    cmd->add_option("--ratio-mode", ratio_mode_text, "Group ratio convention")
        ->check(CLI::IsMember({"minor_over_total", "minor_over_major"}));
  };

  // --- mine2d ---
  auto* mine2d = app.add_subcommand(
      "mine2d", "Exact 2-d mining over median regions of the dual line "
                "arrangement");
  std::string m2_in, m2_mode = "raysweep", m2_out = "-", m2_report,
              m2_percentiles = "1,0.1,0.01";
  ColumnFlags m2_cols;
  mine2d->add_option("--in", m2_in, "Input CSV")->required();
  mine2d->add_option("--mode", m2_mode,
                     "warmup = O(n^3 log n) enumeration; raysweep = region "
                     "maxima via closed form; boundary = raysweep restricted "
                     "to region boundaries")
      ->check(CLI::IsMember({"warmup", "raysweep", "boundary"}));
  mine2d->add_option("--passes", mining.passes,
                     "1 = positive-quadrant directions only, 2 = also cover "
                     "mixed-sign directions")
      ->check(CLI::IsMember({1, 2}));
  add_mining_flags(mine2d);
  add_column_flags(mine2d, m2_cols);
  mine2d->add_option("--out", m2_out, "Result JSON path ('-' = stdout)");
  mine2d->add_option("--report", m2_report,
                     "Also write a tail report CSV for the best candidate");
  mine2d->add_option("--percentiles", m2_percentiles,
                     "Percentile rows for --report");

  // --- mine-hd ---
  auto* minehd = app.add_subcommand(
      "mine-hd", "Heuristic direction search in any dimension");
  std::string hd_in, hd_heuristic, hd_out = "-", hd_report,
              hd_percentiles = "1,0.1,0.01";
  ColumnFlags hd_cols;
  std::uint64_t hd_seed = 0;
  FocusedParams focused;
  GridParams grid;
  QpParams qp;
  EEParams ee;
  std::string gate_text = "error-head";
  minehd->add_option("--in", hd_in, "Input CSV")->required();
  minehd->add_option("--heuristic", hd_heuristic, "Search strategy")
      ->required()
      ->check(CLI::IsMember({"focused", "grid", "qp", "ee"}));
  minehd->add_option("--seed", hd_seed, "RNG seed")->envname("MINORIA_SEED");
  add_mining_flags(minehd);
  add_column_flags(minehd, hd_cols);
  minehd->add_option("--out", hd_out, "Result JSON path ('-' = stdout)");
  minehd->add_option("--report", hd_report,
                     "Also write a tail report CSV for the best candidate");
  minehd->add_option("--percentiles", hd_percentiles,
                     "Percentile rows for --report");
  minehd->add_option("--K", focused.K, "focused: high-loss head fraction")
      ->check(CLI::Range(1e-12, 1.0));
  minehd->add_option("--K-err", focused.K_err,
                     "focused: error-head fraction of the tail for the gate")
      ->check(CLI::Range(1e-12, 1.0));
  minehd->add_option("--sample-s", focused.sample_s,
                     "focused: high-loss rows sampled");
  minehd->add_option("--sample-t", focused.sample_t,
                     "focused: other rows sampled");
  minehd->add_option("--gate", gate_text,
                     "focused: gate on the error head of the tail or on the "
                     "whole tail")
      ->check(CLI::IsMember({"error-head", "whole-tail"}));
  minehd->add_option("--eps-angle", grid.eps_angle,
                     "grid: angular cell size (radians)")
      ->check(CLI::Range(1e-6, 1.6));
  minehd->add_option("--max-eval", grid.max_eval,
                     "grid: directions evaluated after diverse sampling");
  minehd->add_option("--count", qp.count, "qp: directions generated");
  minehd->add_option("--eps-explore", ee.eps_explore,
                     "ee: exploration probability")
      ->check(CLI::Range(0.0, 1.0));
  minehd->add_option("--tau-prime", ee.tau_prime,
                     "ee: exploitation cone cosine threshold")
      ->check(CLI::Range(-0.999999, 1.0));
  minehd->add_option("--iterations", ee.iterations, "ee: sampling iterations");
  minehd->add_option("--n-starts", ee.n_starts, "ee: initial random starts")
      ->check(CLI::Range(1, 1000000));

  // --- kmeans ---
  auto* km = app.add_subcommand(
      "kmeans", "k-means baseline and per-cluster minority composition");
  std::string km_in, km_assign_out, km_ratio_out, km_assign_in;
  ColumnFlags km_cols;
  int km_k = 0;
  std::uint64_t km_seed = 0;
  int km_max_iter = 300;
  km->add_option("--in", km_in, "Input CSV")->required();
  km->add_option("--k", km_k, "Cluster count")->check(CLI::Range(1, 1000000));
  km->add_option("--seed", km_seed, "RNG seed")->envname("MINORIA_SEED");
  km->add_option("--max-iter", km_max_iter, "Lloyd iteration cap")
      ->check(CLI::Range(1, 1000000));
  km->add_option("--assign-in", km_assign_in,
                 "Skip clustering; read an assignment CSV and only build the "
                 "composition table");
  km->add_option("--assign-out", km_assign_out, "Write assignment CSV here");
  km->add_option("--ratio-out", km_ratio_out,
                 "Write per-cluster minority ratio CSV here");
  km->add_option("--minority-group", ropts.minority_group,
                 "Group value treated as the minority");
  km->add_option("--ratio-mode", ratio_mode_text, "Group ratio convention")
      ->check(CLI::IsMember({"minor_over_total", "minor_over_major"}));
  add_column_flags(km, km_cols);

  // --- report ---
  auto* rep = app.add_subcommand(
      "report", "Accuracy/F1/group-ratio table over nested projection tails");
  std::string rep_in, rep_direction, rep_out = "-",
              rep_percentiles = "1,0.1,0.01,0.001,0.0001";
  ColumnFlags rep_cols;
  rep->add_option("--in", rep_in, "Input CSV")->required();
  rep->add_option("--direction", rep_direction,
                  "Projection direction, comma list")
      ->required();
  rep->add_option("--percentiles", rep_percentiles, "Percentile rows");
  rep->add_option("--out", rep_out, "Output CSV path ('-' = stdout)");
  rep->add_option("--positive-class", ropts.positive_class,
                  "Positive class for binary F1");
  rep->add_option("--minority-group", ropts.minority_group,
                  "Group value treated as the minority");
  rep->add_option("--ratio-mode", ratio_mode_text, "Group ratio convention")
      ->check(CLI::IsMember({"minor_over_total", "minor_over_major"}));
  add_column_flags(rep, rep_cols);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    mining.min_sep_cos = std::cos(min_sep_deg * std::numbers::pi / 180.0);
    ropts.ratio_mode = ratio_mode_of(ratio_mode_text);

    if (app.got_subcommand(synth)) {
      spec.mean_major = Eigen::VectorXd::Zero(spec.d);
      spec.mean_minor = Eigen::VectorXd::Ones(spec.d);
      for (auto [text, target] :
           {std::pair{&mean_major_text, &spec.mean_major},
            std::pair{&mean_minor_text, &spec.mean_minor}}) {
        if (text->empty()) continue;
        const auto values = parse_double_list(*text, "--mean-*");
        if (static_cast<int>(values.size()) != spec.d) {
          throw std::runtime_error("mean list length does not match --d");
        }
        *target = Eigen::Map<const Eigen::VectorXd>(
            values.data(), static_cast<Eigen::Index>(values.size()));
      }
      const Dataset ds = generate_synthetic(spec);
      write_csv(ds, synth_out);
      return kExitOk;
    }

    if (app.got_subcommand(mine2d)) {
      const Dataset ds_raw = load_with_flags(m2_in, m2_cols);
      if (ds_raw.dim() != 2) {
        throw std::runtime_error("mine2d needs exactly 2 feature columns");
      }
      const Dataset ds = normalize_positive(ds_raw, 1.0);
      std::vector<MiningCandidate> candidates;
      if (m2_mode == "warmup") {
        candidates = mine_warmup(ds, mining);
      } else {
        candidates = mine_raysweep(ds, mining,
                                   m2_mode == "boundary"
                                       ? SweepMode::kBoundaryOnly
                                       : SweepMode::kStationary);
      }
      ordered_json prov;
      prov["command"] = "mine2d";
      prov["mode"] = m2_mode;
      prov["normalize_delta"] = 1.0;
      prov["normalize_offset"] =
          std::vector<double>(ds.offset.data(), ds.offset.data() + ds.offset.size());
      if (mining.passes == 2) {
        prov["rotation_offset"] = default_rotation_offset(ds);
      }
      prov["params"] = params_json(mining, min_sep_deg);
      prov["params"]["passes"] = mining.passes;
      return emit_mining_output(ds_raw, candidates, prov, m2_out, m2_report,
                                m2_percentiles, ropts);
    }

    if (app.got_subcommand(minehd)) {
      const Dataset ds = load_with_flags(hd_in, hd_cols);
      std::vector<MiningCandidate> candidates;
      ordered_json extra;
      if (hd_heuristic == "focused") {
        focused.seed = hd_seed;
        focused.gate_on_error_head = gate_text == "error-head";
        focused.mining = mining;
        candidates = focused_explore(ds, focused);
        extra["K"] = focused.K;
        extra["K_err"] = focused.K_err;
        extra["sample_s"] = focused.sample_s;
        extra["sample_t"] = focused.sample_t;
        extra["gate"] = gate_text;
      } else if (hd_heuristic == "grid") {
        grid.seed = hd_seed;
        grid.mining = mining;
        candidates = mine_grid(ds, grid);
        extra["eps_angle"] = grid.eps_angle;
        extra["max_eval"] = grid.max_eval;
      } else if (hd_heuristic == "qp") {
        qp.seed = hd_seed;
        qp.mining = mining;
        candidates = mine_qp(ds, qp);
        extra["count"] = qp.count;
      } else {
        ee.seed = hd_seed;
        ee.mining = mining;
        candidates = ee_search(ds, ee);
        extra["eps_explore"] = ee.eps_explore;
        extra["tau_prime"] = ee.tau_prime;
        extra["iterations"] = ee.iterations;
        extra["n_starts"] = ee.n_starts;
      }
      ordered_json prov;
      prov["command"] = "mine-hd";
      prov["heuristic"] = hd_heuristic;
      prov["seed"] = hd_seed;
      prov["params"] = params_json(mining, min_sep_deg);
      for (auto& [key, value] : extra.items()) prov["params"][key] = value;
      return emit_mining_output(ds, candidates, prov, hd_out, hd_report,
                                hd_percentiles, ropts);
    }

    if (app.got_subcommand(km)) {
      const Dataset ds = load_with_flags(km_in, km_cols);
      Clustering clustering;
      if (!km_assign_in.empty()) {
        std::ifstream in(km_assign_in);
        if (!in) throw std::runtime_error("cannot open '" + km_assign_in + "'");
        clustering.assignment = read_assignment_csv(in, ds.n());
        const int k = 1 + *std::max_element(clustering.assignment.begin(),
                                            clustering.assignment.end());
        clustering.centroids = Eigen::MatrixXd::Zero(k, ds.dim());
      } else {
        if (km_k < 1) {
          throw std::runtime_error("kmeans: --k is required without --assign-in");
        }
        clustering = kmeans(ds, km_k, km_seed, km_max_iter);
      }
      const bool want_default_stdout =
          km_assign_out.empty() && km_ratio_out.empty();
      if (!km_assign_out.empty()) {
        std::ostringstream out;
        write_assignment_csv(clustering, out);
        write_text(km_assign_out, out.str());
      }
      if (!km_ratio_out.empty() || want_default_stdout) {
        std::ostringstream out;
        if (ds.group) {
          const auto rows = cluster_group_ratios(ds, clustering,
                                                 ropts.minority_group,
                                                 ropts.ratio_mode);
          write_group_ratio_csv(rows, ropts.ratio_mode, out);
        } else if (want_default_stdout) {
          write_assignment_csv(clustering, out);
        } else {
          throw std::runtime_error(
              "--ratio-out needs a group column (use --group)");
        }
        write_text(km_ratio_out.empty() ? "-" : km_ratio_out, out.str());
      }
      return kExitOk;
    }

    // report
    const Dataset ds = load_with_flags(rep_in, rep_cols);
    const auto dir_values = parse_double_list(rep_direction, "--direction");
    if (static_cast<int>(dir_values.size()) != ds.dim()) {
      throw std::runtime_error(
          "--direction length does not match the feature count");
    }
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(
        dir_values.data(), static_cast<Eigen::Index>(dir_values.size()));
    const auto rows = tail_report(
        ds, Direction(std::move(v)),
        parse_double_list(rep_percentiles, "--percentiles"), ropts);
    std::ostringstream out;
    write_report_csv(rows, out);
    write_text(rep_out, out.str());
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace minoria
