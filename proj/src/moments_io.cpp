#include "cmlm/moments_io.hpp"

#include <fstream>
#include <map>
#include <set>

#include "cmlm/csv.hpp"
#include "cmlm/dates.hpp"
#include "cmlm/errors.hpp"

namespace cmlm {

using csv::format_decimal;
using csv::parse_decimal;
using dates::is_month;

namespace {

constexpr const char* kMagic = "cmlm1";

struct LineSource {
  std::ifstream in;
  std::size_t line_no = 0;

  explicit LineSource(const std::string& path) : in(path) {
    if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  }

  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
};

[[noreturn]] void bad_line(const LineSource& src, const std::string& what) {
  fail(errc::bad_row, what + " at line " + std::to_string(src.line_no));
}

std::vector<std::string> expect_fields(LineSource& src, const std::string& line,
                                       const std::string& tag, std::size_t n_values) {
  std::vector<std::string> fields = csv::split(line);
  if (fields.empty() || fields[0] != tag) {
    bad_line(src, "expected '" + tag + "' line, got '" + line + "'");
  }
  if (n_values != 0 && fields.size() != n_values + 1) {
    bad_line(src, "'" + tag + "' line needs " + std::to_string(n_values) + " values, has " +
                      std::to_string(fields.size() - 1));
  }
  if (fields.size() < 2) {
    bad_line(src, "'" + tag + "' line is empty");
  }
  fields.erase(fields.begin());
  return fields;
}

std::string read_line_or_fail(LineSource& src, const std::string& context) {
  std::string line;
  if (!src.next(line)) {
    fail(errc::bad_row, "artifact ends mid-block (" + context + ") at line " +
                            std::to_string(src.line_no));
  }
  return line;
}

}  // namespace

void write_moments(const std::string& path, const std::vector<MomentsSnapshot>& snapshots) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
  out << kMagic << "\n";
  for (const auto& snap : snapshots) {
    const auto p = static_cast<Eigen::Index>(snap.moments.asset_ids.size());
    if (snap.moments.mu.size() != p || snap.moments.sigma.rows() != p ||
        snap.moments.sigma.cols() != p) {
      fail(errc::dimension_mismatch, "snapshot " + snap.month + " has inconsistent dimensions");
    }
    out << "month," << snap.month << "\n";
    out << "rf," << format_decimal(snap.moments.rf) << "\n";
    out << "market";
    for (const auto& id : snap.market_ids) out << "," << id;
    out << "\n";
    out << "assets";
    for (const auto& id : snap.moments.asset_ids) out << "," << id;
    out << "\n";
    out << "mu";
    for (Eigen::Index i = 0; i < p; ++i) out << "," << format_decimal(snap.moments.mu(i));
    out << "\n";
    for (Eigen::Index i = 0; i < p; ++i) {
      out << "sigma";
      for (Eigen::Index j = 0; j < p; ++j) {
        out << "," << format_decimal(snap.moments.sigma(i, j));
      }
      out << "\n";
    }
    out << "end\n";
  }
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

std::vector<MomentsSnapshot> read_moments(const std::string& path) {
  LineSource src(path);
  std::string line;
  if (!src.next(line) || line != kMagic) {
    fail(errc::missing_header,
         "'" + path + "' is not a moments artifact (expected leading '" + std::string(kMagic) +
             "' line)");
  }

  std::vector<MomentsSnapshot> snapshots;
  std::set<std::string> months_seen;
  while (src.next(line)) {
    if (line.empty()) bad_line(src, "blank line");
    MomentsSnapshot snap;

    std::vector<std::string> fields = expect_fields(src, line, "month", 1);
    snap.month = fields[0];
    if (!is_month(snap.month)) bad_line(src, "bad month '" + snap.month + "'");
    if (!months_seen.insert(snap.month).second) {
      fail(errc::duplicate_key, "month " + snap.month + " appears twice in '" + path + "'");
    }

    fields = expect_fields(src, read_line_or_fail(src, snap.month), "rf", 1);
    snap.moments.rf = parse_decimal(fields[0], src.line_no);

    snap.market_ids = expect_fields(src, read_line_or_fail(src, snap.month), "market", 0);
    snap.moments.asset_ids = expect_fields(src, read_line_or_fail(src, snap.month), "assets", 0);
    const std::size_t p = snap.moments.asset_ids.size();

    std::set<std::string> asset_set(snap.moments.asset_ids.begin(),
                                    snap.moments.asset_ids.end());
    if (asset_set.size() != p) bad_line(src, "duplicate asset id in 'assets'");
    for (const auto& id : snap.market_ids) {
      if (asset_set.find(id) == asset_set.end()) {
        bad_line(src, "market id '" + id + "' not among assets");
      }
    }

    fields = expect_fields(src, read_line_or_fail(src, snap.month), "mu", p);
    snap.moments.mu.resize(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
      snap.moments.mu(static_cast<Eigen::Index>(i)) = parse_decimal(fields[i], src.line_no);
    }

    snap.moments.sigma.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
      fields = expect_fields(src, read_line_or_fail(src, snap.month), "sigma", p);
      for (std::size_t j = 0; j < p; ++j) {
        snap.moments.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            parse_decimal(fields[j], src.line_no);
      }
    }

    line = read_line_or_fail(src, snap.month);
    if (line != "end") bad_line(src, "expected 'end', got '" + line + "'");
    snapshots.push_back(std::move(snap));
  }
  return snapshots;
}

MarketMoments subset_moments(const MarketMoments& moments, const std::vector<std::string>& ids) {
  std::map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < moments.asset_ids.size(); ++i) {
    index[moments.asset_ids[i]] = static_cast<Eigen::Index>(i);
  }
  MarketMoments out;
  out.rf = moments.rf;
  out.asset_ids = ids;
  const auto p = static_cast<Eigen::Index>(ids.size());
  out.mu.resize(p);
  out.sigma.resize(p, p);
  std::vector<Eigen::Index> rows(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = index.find(ids[i]);
    if (it == index.end()) {
      fail(errc::invalid_argument, "asset '" + ids[i] + "' not present in moments");
    }
    rows[i] = it->second;
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    out.mu(i) = moments.mu(rows[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < p; ++j) {
      out.sigma(i, j) = moments.sigma(rows[static_cast<std::size_t>(i)],
                                      rows[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace cmlm
