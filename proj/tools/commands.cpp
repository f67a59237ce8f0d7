#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cmlm/batch.hpp"
#include "cmlm/csv.hpp"
#include "cmlm/dates.hpp"
#include "cmlm/errors.hpp"
#include "cmlm/inference.hpp"
#include "cmlm/ingest.hpp"
#include "cmlm/model_registry.hpp"
#include "cmlm/moments_io.hpp"
#include "cmlm/panel.hpp"
#include "cmlm/synth.hpp"

namespace cmlm::cli {

const char kProfilesCsvHeader[] =
    "account_id,month,mu_obs,sigma_obs,sharpe,theta,w_star,efficiency,status,n_stocks";

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open output file: " + path);
  return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) fail(errc::io_error, "write failed: " + path);
}

/// One parsed row of the profiles CSV. Only rows with status "ok" carry
/// numbers, so the loader returns just those; `total` reports the full
/// row count including failed scorings.
struct ScoredRow {
  std::string account_id;
  std::string month;
  double mu_obs = 0.0;
  double sigma_obs = 0.0;
  double sharpe = 0.0;
  double theta = 0.0;
  double w_star = 0.0;
  double efficiency = 0.0;
  long n_stocks = 0;
};

std::vector<ScoredRow> load_scored_rows(const std::string& path, std::size_t* total = nullptr) {
  csv::Reader reader(path, kProfilesCsvHeader);
  std::vector<ScoredRow> rows;
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  std::size_t seen = 0;
  while (reader.next(fields, line_no)) {
    ++seen;
    if (fields[8] != "ok") continue;
    ScoredRow row;
    row.account_id = fields[0];
    row.month = fields[1];
    if (!dates::is_month(row.month)) {
      fail(errc::bad_row, path + " line " + std::to_string(line_no) + ": bad month key");
    }
    row.mu_obs = csv::parse_decimal(fields[2], line_no);
    row.sigma_obs = csv::parse_decimal(fields[3], line_no);
    row.sharpe = csv::parse_decimal(fields[4], line_no);
    row.theta = csv::parse_decimal(fields[5], line_no);
    row.w_star = csv::parse_decimal(fields[6], line_no);
    row.efficiency = csv::parse_decimal(fields[7], line_no);
    row.n_stocks = csv::parse_integer(fields[9], line_no);
    rows.push_back(std::move(row));
  }
  if (total != nullptr) *total = seen;
  std::sort(rows.begin(), rows.end(), [](const ScoredRow& a, const ScoredRow& b) {
    return std::tie(a.account_id, a.month) < std::tie(b.account_id, b.month);
  });
  return rows;
}

void print_quartile_line(const char* label, const std::vector<double>& values) {
  QuartileSummary q = quartiles(values);
  std::vector<char> keep = iqr_filter(values);
  std::size_t removed = 0;
  for (char k : keep) {
    if (!k) ++removed;
  }
  std::printf("%s quartiles: q25=%s q50=%s q75=%s iqr_removed=%zu\n", label,
              csv::format_decimal(q.q25).c_str(), csv::format_decimal(q.q50).c_str(),
              csv::format_decimal(q.q75).c_str(), removed);
}

// ---- figure rendering (optional, deterministic) ---------------------------

std::string fmt_tick(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
};

AxisRange padded(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

constexpr double kSvgW = 800.0;
constexpr double kSvgH = 600.0;

std::string svg_open() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
}

std::string render_scatter_svg(const std::vector<std::pair<double, double>>& points,
                               const std::string& x_label, const std::string& y_label) {
  constexpr double ml = 80, mr = 20, mt = 20, mb = 50;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& [x, y] : points) {
    xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
  }
  if (points.empty()) xlo = xhi = ylo = yhi = 0.0;
  const AxisRange xr = padded(xlo, xhi);
  const AxisRange yr = padded(ylo, yhi);
  auto px = [&](double x) { return ml + (x - xr.lo) / (xr.hi - xr.lo) * (kSvgW - ml - mr); };
  auto py = [&](double y) { return kSvgH - mb - (y - yr.lo) / (yr.hi - yr.lo) * (kSvgH - mt - mb); };

  std::string svg = svg_open();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                ml, kSvgH - mb, kSvgW - mr, kSvgH - mb, ml, mt, ml, kSvgH - mb);
  svg += buf;
  for (int i = 0; i <= 4; ++i) {
    const double xv = xr.lo + i * (xr.hi - xr.lo) / 4.0;
    const double yv = yr.lo + i * (yr.hi - yr.lo) / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">%s</text>\n",
                  px(xv), kSvgH - mb + 18, fmt_tick(xv).c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\">%s</text>\n",
                  ml - 6, py(yv) + 4, fmt_tick(yv).c_str());
    svg += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n",
                (ml + kSvgW - mr) / 2, kSvgH - 12, x_label.c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"%g\" text-anchor=\"middle\" transform=\"rotate(-90 16 %g)\">"
                "%s</text>\n",
                (mt + kSvgH - mb) / 2, (mt + kSvgH - mb) / 2, y_label.c_str());
  svg += buf;
  for (const auto& [x, y] : points) {
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"steelblue\" "
                  "fill-opacity=\"0.6\"/>\n",
                  px(x), py(y));
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_histogram_svg(const std::map<std::string, std::vector<long>>& counts_by_group,
                                 double lo, double bin_width, const std::string& x_label) {
  constexpr double ml = 80, mr = 20, mt = 10, mb = 40;
  long max_count = 1;
  std::size_t n_bins = 1;
  for (const auto& [group, counts] : counts_by_group) {
    n_bins = std::max(n_bins, counts.size());
    for (long c : counts) max_count = std::max(max_count, c);
  }
  const double band_h =
      (kSvgH - mt - mb) / static_cast<double>(std::max<std::size_t>(1, counts_by_group.size()));
  const double plot_w = kSvgW - ml - mr;

  std::string svg = svg_open();
  char buf[256];
  double band_top = mt;
  for (const auto& [group, counts] : counts_by_group) {
    const double base = band_top + band_h - 14;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"black\"/>\n",
                  ml, base, kSvgW - mr, base);
    svg += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\">%s</text>\n",
                  ml - 6, band_top + band_h / 2, group.c_str());
    svg += buf;
    for (std::size_t b = 0; b < counts.size(); ++b) {
      if (counts[b] == 0) continue;
      const double h = (band_h - 22) * static_cast<double>(counts[b]) /
                       static_cast<double>(max_count);
      const double w = plot_w / static_cast<double>(n_bins);
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                    "fill=\"steelblue\"/>\n",
                    ml + static_cast<double>(b) * w, base - h, w * 0.9, h);
      svg += buf;
    }
    band_top += band_h;
  }
  for (int i = 0; i <= 4; ++i) {
    const double xv = lo + i * bin_width * static_cast<double>(n_bins) / 4.0;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">%s</text>\n",
                  ml + i * plot_w / 4.0, kSvgH - mb + 18, fmt_tick(xv).c_str());
    svg += buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n",
                (ml + kSvgW - mr) / 2, kSvgH - 8, x_label.c_str());
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

std::string group_label(const std::string& by, const HouseholdProfile& h) {
  if (by == "account_type") return account_type_name(h.account_type);
  if (by == "net_worth") return std::to_string(h.net_worth_band);
  if (by == "knowledge") return knowledge_name(h.knowledge);
  if (by == "segment") return segment_name(h.segment);
  if (by == "age") return std::to_string(h.age_band);
  return std::to_string(h.n_children);  // children
}

// Every level of a grouping, so the output always spans the full domain
// even when some levels hold no accounts.
std::vector<std::string> all_group_labels(const std::string& by) {
  if (by == "account_type") return {"cash", "ira", "keogh", "margin", "schwab_one"};
  if (by == "net_worth") return {"1", "2", "3", "4", "5", "6"};
  if (by == "knowledge") return {"extensive", "good", "limited", "none", "unknown"};
  if (by == "segment") return {"active_trader", "affluent", "general"};
  if (by == "age") return {"1", "2", "3", "4", "5", "6", "7"};
  std::vector<std::string> children;
  for (int i = 0; i <= 6; ++i) children.push_back(std::to_string(i));
  return children;
}

}  // namespace

void cmd_estimate(const EstimateArgs& args) {
  const FactorSeries factors = load_factors(args.factors_path);
  const std::map<std::string, std::vector<DatedValue>> returns =
      load_asset_returns(args.returns_path);

  std::vector<std::pair<std::string, const std::vector<DatedValue>*>> assets;
  assets.reserve(returns.size());
  for (const auto& [id, series] : returns) assets.emplace_back(id, &series);

  // candidate months: every distinct month of the factor history (sorted input)
  std::vector<std::string> months;
  for (const FactorObservation& obs : factors.observations) {
    std::string m = dates::month_of_date(obs.date);
    if (months.empty() || months.back() != m) months.push_back(std::move(m));
  }

  std::vector<MomentsSnapshot> snapshots;
  std::size_t skipped_fits = 0;
  for (const std::string& month : months) {
    FactorSeries window;
    try {
      window = rolling_window(factors, month, static_cast<std::size_t>(args.window));
    } catch (const Error& e) {
      if (e.code() == errc::insufficient_history) continue;  // no full window yet
      throw;
    }
    std::vector<FitOutcome> outcomes = fit_universe(assets, window);
    std::vector<FactorLoadings> loadings;
    loadings.reserve(outcomes.size());
    for (FitOutcome& outcome : outcomes) {
      if (outcome.skipped) {
        ++skipped_fits;
        continue;
      }
      if (!outcome.ok) {
        // rerun the one bad fit serially so its typed failure propagates
        fit_loadings(outcome.asset_id, returns.at(outcome.asset_id), window);
        fail(errc::bad_row, outcome.message);  // unreachable
      }
      loadings.push_back(std::move(outcome.loadings));
    }
    if (loadings.empty()) continue;  // nothing estimable this month

    MomentsSnapshot snap;
    snap.month = month;
    snap.moments = estimate_moments(loadings, window);
    // the market universe is the MKT-prefixed ids; all assets if none exist
    for (const std::string& id : snap.moments.asset_ids) {
      if (id.rfind("MKT", 0) == 0) snap.market_ids.push_back(id);
    }
    if (snap.market_ids.empty()) snap.market_ids = snap.moments.asset_ids;
    snapshots.push_back(std::move(snap));
  }

  write_moments(args.out_path, snapshots);
  std::printf("estimate: %zu monthly snapshots, %zu asset fits skipped for short history -> %s\n",
              snapshots.size(), skipped_fits, args.out_path.c_str());
}

void cmd_infer(const InferArgs& args) {
  if (args.rf_source != "factors") {
    fail(errc::invalid_argument,
         "unsupported --rf-source '" + args.rf_source + "' (only 'factors')");
  }
  std::vector<MomentsSnapshot> snapshots = read_moments(args.moments_path);
  std::map<std::string, PreparedSnapshot> prepared;
  for (MomentsSnapshot& snap : snapshots) {
    std::string month = snap.month;
    prepared.emplace(std::move(month), prepare_snapshot(std::move(snap)));
  }

  const std::vector<PositionRecord> positions = load_positions(args.positions_path);
  const std::vector<AccountMonthPortfolio> portfolios = build_all_weights(positions);
  std::vector<ProfileRow> rows = profile_points(portfolios, prepared);
  std::sort(rows.begin(), rows.end(), [](const ProfileRow& a, const ProfileRow& b) {
    return std::tie(a.account_id, a.month) < std::tie(b.account_id, b.month);
  });

  std::ofstream out = open_out(args.out_path);
  out << kProfilesCsvHeader << '\n';
  for (const ProfileRow& row : rows) {
    out << row.account_id << ',' << row.month << ',';
    if (row.status == "ok") {
      out << csv::format_decimal(row.mu_obs) << ',' << csv::format_decimal(row.sigma_obs) << ','
          << csv::format_decimal(row.sharpe) << ',' << csv::format_decimal(row.theta) << ','
          << csv::format_decimal(row.w_star) << ',' << csv::format_decimal(row.efficiency);
    } else {
      out << ",,,,,";  // failed rows keep the shape but carry no numbers
    }
    out << ',' << row.status << ',' << row.n_stocks << '\n';
  }
  finish_out(out, args.out_path);

  std::vector<double> thetas;
  std::vector<double> efficiencies;
  for (const ProfileRow& row : rows) {
    if (row.status != "ok") continue;
    thetas.push_back(row.theta);
    efficiencies.push_back(row.efficiency);
  }
  std::printf("infer: %zu rows, %zu ok -> %s\n", rows.size(), thetas.size(),
              args.out_path.c_str());
  if (!thetas.empty()) {
    print_quartile_line("theta", thetas);
    print_quartile_line("efficiency", efficiencies);
  }
}

void cmd_regress(const RegressArgs& args) {
  const ModelDef& model = find_model(args.model_id);  // reject bad ids before any file IO

  std::size_t total_rows = 0;
  const std::vector<ScoredRow> rows = load_scored_rows(args.profiles_path, &total_rows);
  std::size_t dropped_missing = 0;
  const std::vector<HouseholdProfile> households =
      load_household_profiles(args.demographics_path, &dropped_missing);
  const std::vector<DatedValue> vix_monthly = monthly_last(load_vix(args.vix_path));

  std::map<std::string, const HouseholdProfile*> household_by_id;
  for (const HouseholdProfile& h : households) household_by_id[h.household_id] = &h;
  std::map<std::string, double> vix_by_month;
  for (const DatedValue& v : vix_monthly) vix_by_month[v.date] = v.value;

  std::vector<PanelObservation> observations;
  observations.reserve(rows.size());
  std::size_t no_household = 0;
  std::size_t no_vix = 0;
  for (const ScoredRow& row : rows) {
    const auto household = household_by_id.find(row.account_id);
    if (household == household_by_id.end()) {
      ++no_household;
      continue;
    }
    const auto vix = vix_by_month.find(row.month);
    if (vix == vix_by_month.end()) {
      ++no_vix;
      continue;
    }
    PanelObservation obs;
    obs.entity_id = row.account_id;
    obs.time_id = row.month;
    add_profile_covariates(*household->second, obs.covariates);
    obs.covariates["n_stocks"] = static_cast<double>(row.n_stocks);
    obs.covariates["sharpe"] = row.sharpe;
    obs.covariates["mu_obs"] = row.mu_obs;
    obs.covariates["sigma_obs"] = row.sigma_obs;
    obs.covariates["vix"] = vix->second;
    obs.response = model.response == "efficiency" ? row.efficiency : row.theta;
    observations.push_back(std::move(obs));
  }
  if (observations.empty()) {
    fail(errc::empty_input, "no usable rows after joining profiles with demographics");
  }

  // fence off extreme responses before fitting
  std::vector<double> responses;
  responses.reserve(observations.size());
  for (const PanelObservation& obs : observations) responses.push_back(obs.response);
  const std::vector<char> keep = iqr_filter(responses);
  std::vector<PanelObservation> kept;
  kept.reserve(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    if (keep[i]) kept.push_back(std::move(observations[i]));
  }
  const std::size_t outliers = observations.size() - kept.size();

  const RegressionResult result = fit_panel(kept, model.spec);
  const std::string title = model.id + ": " + model.description;
  const std::string table = format_table(result, title, display_names(), reference_level_notes());
  const std::string result_csv = format_result_csv(result);

  std::ofstream out = open_out(args.out_path);
  out << table;
  finish_out(out, args.out_path);
  const std::string csv_path = args.out_path + ".csv";
  std::ofstream out_csv = open_out(csv_path);
  out_csv << result_csv;
  finish_out(out_csv, csv_path);

  std::fputs(table.c_str(), stdout);
  std::printf(
      "regress %s: %zu scored rows, %zu joined (%zu without household, %zu without vix month, "
      "%zu demographic rows dropped for missing fields), %zu response outliers removed, "
      "fit on %zu -> %s\n",
      model.id.c_str(), total_rows, observations.size(), no_household, no_vix, dropped_missing,
      outliers, kept.size(), args.out_path.c_str());
}

void cmd_plotdata(const PlotDataArgs& args) {
  const bool scatter = args.by == "sharpe" || args.by == "stddev";
  const bool categorical = args.by == "account_type" || args.by == "net_worth" ||
                           args.by == "knowledge" || args.by == "segment" || args.by == "age" ||
                           args.by == "children";
  if (!scatter && !categorical) {
    fail(errc::unknown_grouping, "unknown --by grouping '" + args.by + "'");
  }

  const std::vector<ScoredRow> rows = load_scored_rows(args.profiles_path);
  std::string csv_text;
  std::string svg_text;

  if (scatter) {
    csv_text = args.by + ",theta\n";
    std::vector<std::pair<double, double>> points;
    points.reserve(rows.size());
    for (const ScoredRow& row : rows) {
      const double x = args.by == "sharpe" ? row.sharpe : row.sigma_obs;
      points.emplace_back(x, row.theta);
      csv_text += csv::format_decimal(x) + ',' + csv::format_decimal(row.theta) + '\n';
    }
    if (!args.svg_path.empty()) svg_text = render_scatter_svg(points, args.by, "theta");
    std::printf("plotdata: %zu scatter points -> %s\n", points.size(), args.out_path.c_str());
  } else {
    if (args.demographics_path.empty()) {
      fail(errc::invalid_argument,
           "--demographics is required when grouping by '" + args.by + "'");
    }
    const std::vector<HouseholdProfile> households =
        load_household_profiles(args.demographics_path);
    std::map<std::string, const HouseholdProfile*> household_by_id;
    for (const HouseholdProfile& h : households) household_by_id[h.household_id] = &h;

    // one theta per account: its average over the scored months
    std::map<std::string, std::pair<double, long>> sums;
    for (const ScoredRow& row : rows) {
      auto& [sum, n] = sums[row.account_id];
      sum += row.theta;
      ++n;
    }
    std::map<std::string, std::vector<double>> theta_by_group;
    for (const std::string& label : all_group_labels(args.by)) theta_by_group[label];
    std::size_t unmatched = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& [account_id, sum_n] : sums) {
      const auto household = household_by_id.find(account_id);
      if (household == household_by_id.end()) {
        ++unmatched;
        continue;
      }
      const double mean_theta = sum_n.first / static_cast<double>(sum_n.second);
      theta_by_group[group_label(args.by, *household->second)].push_back(mean_theta);
      lo = std::min(lo, mean_theta);
      hi = std::max(hi, mean_theta);
    }
    if (unmatched == sums.size()) {
      fail(errc::empty_input, "no scored accounts matched the demographics file");
    }

    constexpr int kBins = 30;
    const double width = (hi - lo) / kBins;
    std::map<std::string, std::vector<long>> counts_by_group;
    csv_text = "group,bin_low,bin_high,count\n";
    for (const auto& [group, values] : theta_by_group) {
      std::vector<long> counts(kBins, 0);
      for (double v : values) {
        const int bin =
            width > 0 ? std::min(kBins - 1, static_cast<int>((v - lo) / width)) : 0;
        ++counts[bin];
      }
      for (int b = 0; b < kBins; ++b) {
        csv_text += group + ',' + csv::format_decimal(lo + b * width) + ',' +
                    csv::format_decimal(lo + (b + 1) * width) + ',' + std::to_string(counts[b]) +
                    '\n';
      }
      counts_by_group[group] = std::move(counts);
    }
    if (!args.svg_path.empty()) {
      svg_text = render_histogram_svg(counts_by_group, lo, width, "theta");
    }
    std::printf("plotdata: %zu groups over %zu accounts (%zu unmatched) -> %s\n",
                theta_by_group.size(), sums.size(), unmatched, args.out_path.c_str());
  }

  std::ofstream out = open_out(args.out_path);
  out << csv_text;
  finish_out(out, args.out_path);
  if (!args.svg_path.empty()) {
    std::ofstream svg_out = open_out(args.svg_path);
    svg_out << svg_text;
    finish_out(svg_out, args.svg_path);
  }
}

void cmd_synth(const SynthArgs& args) {
  const SynthConfig config = load_synth_config(args.config_path);
  const SynthDataset dataset = generate_dataset(config);
  write_dataset(args.out_dir, dataset);
  std::printf("synth: %d households x %d months (%zu scored) -> %s\n", config.n_households,
              config.n_months, dataset.scored_months.size(), args.out_dir.c_str());
}

}  // namespace cmlm::cli
