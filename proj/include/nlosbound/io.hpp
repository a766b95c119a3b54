#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlosbound/bounds.hpp"
#include "nlosbound/scenario.hpp"
#include "nlosbound/sim.hpp"

namespace nlosbound {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_sig(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string json_number(double v, int digits = 17) {
  return std::isfinite(v) ? format_sig(v, digits) : "null";
}

inline std::string json_array(const std::vector<double>& v, int digits = 17) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + json_number(v[i], digits);
  return s + "]";
}

inline double json_double(const nlohmann::json& j, const char* what) {
  if (j.is_null()) return kNaN;
  if (!j.is_number()) throw FormatError(std::string(what) + " must be a number");
  return j.get<double>();
}

inline Point json_point(const nlohmann::json& j, std::size_t dim, const char* what) {
  if (!j.is_array() || j.size() != dim)
    throw FormatError(std::string(what) + " must be an array of " + std::to_string(dim) + " numbers");
  Point p(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    p[i] = json_double(j[i], what);
    if (!std::isfinite(p[i])) throw FormatError(std::string(what) + " has a non-finite coordinate");
  }
  return p;
}

}  // namespace detail

// Scenario JSON: {"dim", "anchors", "ranges", "target" | null}, 17 digits.

inline std::string scenario_to_json(const Scenario& s) {
  std::string out = "{\n  \"dim\": " + std::to_string(s.dim()) + ",\n  \"anchors\": [";
  for (std::size_t i = 0; i < s.anchors.size(); ++i)
    out += (i ? ", " : "") + detail::json_array(s.anchors[i].values());
  out += "],\n  \"ranges\": " + detail::json_array(s.ranges) + ",\n  \"target\": ";
  out += s.target ? detail::json_array(s.target->values()) : "null";
  return out + "\n}\n";
}

inline Scenario scenario_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("scenario JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("scenario JSON must be an object");
  for (const char* key : {"dim", "anchors", "ranges"})
    if (!j.contains(key)) throw FormatError(std::string("scenario JSON lacks \"") + key + "\"");
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) throw FormatError("dim must be a positive integer");
  const auto dim = j["dim"].get<std::size_t>();
  const nlohmann::json& anchors = j["anchors"];
  const nlohmann::json& ranges = j["ranges"];
  if (!anchors.is_array() || anchors.empty()) throw FormatError("anchors must be a nonempty array");
  if (!ranges.is_array() || ranges.size() != anchors.size()) throw FormatError("ranges must match anchors in length");
  Scenario s;
  for (const auto& a : anchors) s.anchors.push_back(detail::json_point(a, dim, "anchor"));
  for (const auto& r : ranges) {
    const double d = detail::json_double(r, "range");
    if (!(d >= 0.0) || !std::isfinite(d)) throw FormatError("ranges must be finite and >= 0");
    s.ranges.push_back(d);
  }
  if (j.contains("target") && !j["target"].is_null()) s.target = detail::json_point(j["target"], dim, "target");
  return s;
}

// Bound report JSON.

inline std::string report_to_json(const BoundReport& rep, const std::optional<Point>& estimate) {
  using detail::json_array;
  using detail::json_number;
  std::string out = "{\n  \"estimate\": ";
  out += estimate ? json_array(estimate->values()) : "null";
  out += ",\n  \"bound1\": ";
  if (rep.bound1) {
    out += "{\"upper\": " + json_number(rep.bound1->upper) + ", \"lower\": " + json_number(rep.bound1->lower) +
           ", \"inflated\": " + (rep.bound1->inflated ? "true" : "false") +
           ", \"alpha\": " + json_number(rep.bound1->alpha) + ", \"sdp_value\": " + json_number(rep.bound1->sdp_value) +
           ", \"status\": \"" + to_string(rep.bound1->outcome.status) + "\"}";
  } else {
    out += "null";
  }
  out += ",\n  \"bound2\": " + (rep.bound2 ? json_number(rep.bound2->diameter_bound) : "null");
  if (rep.bound2) {
    out += ",\n  \"bound2_radius\": " + json_number(rep.bound2->radius);
    out += ",\n  \"bound2_center\": " + json_array(rep.bound2->center.values());
    out += ",\n  \"bound2_lambda\": " + json_array(rep.bound2->lambda);
  }
  out += ",\n  \"bound3_socp\": " + (rep.bound3_socp ? json_number(rep.bound3_socp->value) : "null");
  if (rep.bound3_socp) out += ",\n  \"bound3_socp_lengths\": " + json_array(rep.bound3_socp->lengths);
  out += ",\n  \"bound3_lp\": " + (rep.bound3_lp ? json_number(rep.bound3_lp->value) : "null");
  if (rep.bound3_lp) out += ",\n  \"bound3_lp_lengths\": " + json_array(rep.bound3_lp->lengths);
  out += ",\n  \"ell1\": " + (rep.ell1 ? json_number(rep.ell1->value) : "null");
  out += ",\n  \"inflated\": ";
  out += rep.start.inflated ? "true" : "false";
  out += ",\n  \"region_empty\": ";
  out += rep.region_empty() ? "true" : "false";
  return out + "\n}\n";
}

/// The headline numbers of a report; absent entries are NaN.
struct ReportValues {
  double bound1_upper = kNaN;
  double bound1_lower = kNaN;
  bool bound1_inflated = false;
  double bound2 = kNaN;
  double bound3_socp = kNaN;
  double bound3_lp = kNaN;
  double ell1 = kNaN;
};

inline ReportValues report_values(const BoundReport& rep) {
  ReportValues v;
  if (rep.bound1) {
    v.bound1_upper = rep.bound1->upper;
    v.bound1_lower = rep.bound1->lower;
    v.bound1_inflated = rep.bound1->inflated;
  }
  if (rep.bound2) v.bound2 = rep.bound2->diameter_bound;
  if (rep.bound3_socp) v.bound3_socp = rep.bound3_socp->value;
  if (rep.bound3_lp) v.bound3_lp = rep.bound3_lp->value;
  if (rep.ell1) v.ell1 = rep.ell1->value;
  return v;
}

inline ReportValues report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("report JSON must be an object");
  auto num = [&](const char* key) { return j.contains(key) ? detail::json_double(j[key], key) : kNaN; };
  ReportValues v;
  if (j.contains("bound1") && j["bound1"].is_object()) {
    const auto& b = j["bound1"];
    v.bound1_upper = b.contains("upper") ? detail::json_double(b["upper"], "upper") : kNaN;
    v.bound1_lower = b.contains("lower") ? detail::json_double(b["lower"], "lower") : kNaN;
    v.bound1_inflated = b.value("inflated", false);
  }
  v.bound2 = num("bound2");
  v.bound3_socp = num("bound3_socp");
  v.bound3_lp = num("bound3_lp");
  v.ell1 = num("ell1");
  return v;
}

// Trial CSV, 12 significant digits.

inline constexpr const char* kTrialsHeader = "trial,N,n,e,e_max,b1_upper,b1_lower,b2,b3_socp,b3_lp,ell1,status_flags";
inline constexpr const char* kTrialsEmaxHeader = "trial,e_max,b1_upper,b1_lower";
inline constexpr const char* kTimingsHeader = "trial,bound1,bound1_emax,bound2,bound3_socp,bound3_lp,ell1";

inline void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& recs) {
  using detail::format_sig;
  os << kTrialsHeader << '\n';
  for (const TrialRecord& r : recs) {
    os << r.trial << ',' << r.num_anchors << ',' << r.dim;
    for (double v : {r.e, r.e_max, r.b1_upper, r.b1_lower, r.b2, r.b3_socp, r.b3_lp, r.ell1})
      os << ',' << format_sig(v, 12);
    os << ',' << r.status_flags << '\n';
  }
}

/// bound1 at the estimate attaining e_max.
inline void write_trials_emax_csv(std::ostream& os, const std::vector<TrialRecord>& recs) {
  using detail::format_sig;
  os << kTrialsEmaxHeader << '\n';
  for (const TrialRecord& r : recs)
    os << r.trial << ',' << format_sig(r.e_max, 12) << ',' << format_sig(r.b1_upper_at_max, 12) << ','
       << format_sig(r.b1_lower_at_max, 12) << '\n';
}

inline void write_timings_csv(std::ostream& os, const std::vector<TrialRecord>& recs) {
  using detail::format_sig;
  os << kTimingsHeader << '\n';
  for (const TrialRecord& r : recs) {
    os << r.trial;
    for (double v : {r.seconds.bound1, r.seconds_bound1_at_max, r.seconds.bound2, r.seconds.bound3_socp,
                     r.seconds.bound3_lp, r.seconds.ell1})
      os << ',' << format_sig(v, 6);
    os << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double parse_cell(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return parse_double(s, "CSV cell");
}

inline int parse_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw FormatError("bad integer \"" + s + "\"");
  }
  if (used != s.size()) throw FormatError("bad integer \"" + s + "\"");
  return v;
}

}  // namespace detail

/// Reads back the columns of write_trials_csv.
inline std::vector<TrialRecord> read_trials_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTrialsHeader) throw FormatError("trials CSV: unexpected header");
  std::vector<TrialRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = detail::split(line, ',');
    if (c.size() != 12) throw FormatError("trials CSV: expected 12 columns");
    TrialRecord r;
    try {
      r.trial = detail::parse_int(c[0]);
      r.num_anchors = detail::parse_int(c[1]);
      r.dim = detail::parse_int(c[2]);
      double* fields[] = {&r.e, &r.e_max, &r.b1_upper, &r.b1_lower, &r.b2, &r.b3_socp, &r.b3_lp, &r.ell1};
      for (std::size_t k = 0; k < 8; ++k) *fields[k] = detail::parse_cell(c[3 + k]);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("trials CSV: ") + e.what());
    }
    r.status_flags = c[11];
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_cdf_csv(std::ostream& os, const CdfSeries& s) {
  os << "x,p\n";
  for (std::size_t k = 0; k < s.x.size(); ++k)
    os << detail::format_sig(s.x[k], 12) << ',' << detail::format_sig(s.p[k], 12) << '\n';
}

inline CdfSeries read_cdf_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "x,p") throw FormatError("CDF CSV: unexpected header");
  CdfSeries s;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = detail::split(line, ',');
    if (c.size() != 2) throw FormatError("CDF CSV: expected 2 columns");
    s.x.push_back(detail::parse_cell(c[0]));
    s.p.push_back(detail::parse_cell(c[1]));
  }
  return s;
}

/// Batch summary; runtimes only when `with_timing` (they vary run to run).
inline std::string summary_to_json(const SimConfig& cfg, const BatchSummary& s, bool with_timing) {
  using detail::json_number;
  std::string out = "{\n";
  out += "  \"trials\": " + std::to_string(s.trials) + ",\n";
  out += "  \"N\": " + std::to_string(cfg.scenario.num_anchors) + ",\n";
  out += "  \"n\": " + std::to_string(cfg.scenario.dim) + ",\n";
  out += "  \"inits\": " + std::to_string(cfg.pocs_inits) + ",\n";
  out += "  \"seed\": " + std::to_string(cfg.master_seed) + ",\n";
  out += "  \"noise\": \"" + to_string(cfg.scenario.noise) + "\",\n";
  out += "  \"cube\": " + json_number(cfg.scenario.cube_side) + ",\n";
  out += "  \"solves\": " + std::to_string(s.solves) + ",\n";
  out += "  \"certificate_failures\": " + std::to_string(s.certificate_failures) + ",\n";
  out += "  \"inflated\": " + std::to_string(s.inflated) + ",\n";
  out += "  \"pocs_not_converged\": " + std::to_string(s.pocs_not_converged) + ",\n";
  out += "  \"flagged\": " + std::to_string(s.flagged) + ",\n";
  out += "  \"bounds\": {";
  for (std::size_t i = 0; i < s.bounds.size(); ++i) {
    const BoundSummary& b = s.bounds[i];
    out += i ? ",\n" : "\n";
    out += std::string("    \"") + to_string(b.kind) + "\": {\"computed\": " + std::to_string(b.computed) +
           ", \"violations\": " + std::to_string(b.violations) + ", \"q10\": " + json_number(b.q10, 12) +
           ", \"median\": " + json_number(b.median, 12) + ", \"q90\": " + json_number(b.q90, 12) +
           ", \"frac_le_1_5\": " + json_number(b.frac_le_1_5, 12) + ", \"frac_le_2_3\": " + json_number(b.frac_le_2_3, 12);
    if (with_timing) out += ", \"mean_seconds\": " + json_number(b.mean_seconds, 6);
    out += "}";
  }
  out += "\n  }";
  if (with_timing) out += ",\n  \"mean_seconds_ell1\": " + json_number(s.mean_seconds_ell1, 6);
  return out + "\n}\n";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.flush();
  if (!out) throw std::ios_base::failure("cannot write " + path);
}

}  // namespace nlosbound
