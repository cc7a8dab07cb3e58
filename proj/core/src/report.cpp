#include "plad/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace plad {
namespace {

using nlohmann::json;

// NaN has no JSON spelling; it travels as null.
json number(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json to_json(const MethodOutcome& m) {
  return {{"ran", m.ran},           {"ok", m.ok},
          {"error", m.error},       {"status", m.status},
          {"sq_error", number(m.sq_error)}, {"l2_error", number(m.l2_error)},
          {"type_i", m.type_i},     {"type_ii", m.type_ii},
          {"support_size", m.support_size}, {"kkt_gap", number(m.kkt_gap)},
          {"seconds", number(m.seconds)}};
}

MethodOutcome method_from_json(const json& j) {
  MethodOutcome m;
  m.ran = j.at("ran").get<bool>();
  m.ok = j.at("ok").get<bool>();
  m.error = j.at("error").get<std::string>();
  m.status = j.at("status").get<std::string>();
  m.sq_error = number(j.at("sq_error"));
  m.l2_error = number(j.at("l2_error"));
  m.type_i = j.at("type_i").get<Index>();
  m.type_ii = j.at("type_ii").get<Index>();
  m.support_size = j.at("support_size").get<Index>();
  m.kkt_gap = number(j.at("kkt_gap"));
  m.seconds = number(j.at("seconds"));
  return m;
}

json to_json(const TheoremCheck& t) {
  return {{"measured", t.measured},     {"a", number(t.a)},
          {"eta_l", number(t.eta_l)},   {"lambda_u", number(t.lambda_u)},
          {"error_bound", number(t.error_bound)}, {"condition_i", t.condition_i},
          {"within_bound", t.within_bound}};
}

TheoremCheck theorem_from_json(const json& j) {
  TheoremCheck t;
  t.measured = j.at("measured").get<bool>();
  t.a = number(j.at("a"));
  t.eta_l = number(j.at("eta_l"));
  t.lambda_u = number(j.at("lambda_u"));
  t.error_bound = number(j.at("error_bound"));
  t.condition_i = j.at("condition_i").get<bool>();
  t.within_bound = j.at("within_bound").get<bool>();
  return t;
}

json to_json(const ExperimentReport& report) {
  json cells = json::array();
  for (const CellReport& c : report.cells) {
    json metrics = json::array();
    for (const auto& [name, value] : c.metrics) metrics.push_back({{"name", name}, {"value", number(value)}});
    json reps = json::array();
    for (const ReplicationRecord& r : c.replications) {
      reps.push_back({{"rep", r.rep},
                      {"seed", r.seed},
                      {"plad", to_json(r.plad)},
                      {"refit", to_json(r.refit)},
                      {"lasso", to_json(r.lasso)},
                      {"theorem", to_json(r.theorem)}});
    }
    cells.push_back({{"id", c.id},
                     {"row_label", c.row_label},
                     {"column_label", c.column_label},
                     {"noise_family", c.noise_family},
                     {"noise_scale", number(c.noise_scale)},
                     {"lambda", number(c.lambda)},
                     {"lasso_lambda", number(c.lasso_lambda)},
                     {"failures", c.failures},
                     {"metrics", metrics},
                     {"replications", reps}});
  }
  const ConfigEcho& cfg = report.config;
  return {{"format_version", report.format_version},
          {"config",
           {{"table", cfg.table},
            {"preset", cfg.preset},
            {"n", cfg.n},
            {"p", cfg.p},
            {"k", cfg.k},
            {"reps", cfg.reps},
            {"seed", cfg.seed},
            {"fixed_design", cfg.fixed_design},
            {"theorem_check", cfg.theorem_check},
            {"beta_true", cfg.beta_true}}},
          {"seconds", number(report.seconds)},
          {"cells", cells}};
}

std::string fixed3(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string metric_text(const CellReport& c, const std::string& name) {
  const auto v = c.metric(name);
  return v ? fixed3(*v) : "n/a";
}

std::string with_median(const CellReport& c, const std::string& main, const std::string& paren) {
  return metric_text(c, main) + " (" + metric_text(c, paren) + ")";
}

void markdown_row(std::ostringstream& out, const std::vector<std::string>& fields) {
  out << '|';
  for (const std::string& f : fields) out << ' ' << f << " |";
  out << '\n';
}

void markdown_header(std::ostringstream& out, const std::vector<std::string>& fields) {
  markdown_row(out, fields);
  out << '|';
  for (std::size_t i = 0; i < fields.size(); ++i) out << "---|";
  out << '\n';
}

template <typename T>
void push_unique(std::vector<T>& v, const T& value) {
  if (std::find(v.begin(), v.end(), value) == v.end()) v.push_back(value);
}

// Rows = row labels, columns = column labels, entries from `entry`.
template <typename Entry>
std::string pivot(const ExperimentReport& report, const Entry& entry) {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  for (const CellReport& c : report.cells) {
    push_unique(rows, c.row_label);
    push_unique(cols, c.column_label);
  }
  std::ostringstream out;
  std::vector<std::string> header{""};
  header.insert(header.end(), cols.begin(), cols.end());
  markdown_header(out, header);
  for (const std::string& row : rows) {
    std::vector<std::string> fields{row};
    for (const std::string& col : cols) {
      const auto it = std::find_if(report.cells.begin(), report.cells.end(), [&](const CellReport& c) {
        return c.row_label == row && c.column_label == col;
      });
      fields.push_back(it == report.cells.end() ? "" : entry(*it));
    }
    markdown_row(out, fields);
  }
  return out.str();
}

// Metric rows x cell columns.
std::string metric_rows(const ExperimentReport& report,
                        const std::vector<std::pair<std::string, std::function<std::string(const CellReport&)>>>& rows) {
  std::ostringstream out;
  std::vector<std::string> header{""};
  for (const CellReport& c : report.cells) header.push_back(c.column_label);
  markdown_header(out, header);
  for (const auto& [label, entry] : rows) {
    std::vector<std::string> fields{label};
    for (const CellReport& c : report.cells) fields.push_back(entry(c));
    markdown_row(out, fields);
  }
  return out.str();
}

std::string render_markdown(const ExperimentReport& report) {
  auto metric = [](std::string name) {
    return [name](const CellReport& c) { return metric_text(c, name); };
  };
  switch (report.config.table) {
    case 1:
      return "Mean ||b - beta||_2^2 (median after LAD refit on the selected support)\n\n" +
             pivot(report, [](const CellReport& c) {
               return with_median(c, "plad.mean_sq_error", "refit.median_sq_error");
             });
    case 2:
      return "Mean ||b - beta||_2^2 (mean ||b - beta||_2) and selection errors\n\n" +
             metric_rows(report,
                         {{"L1 PLAD: error", [](const CellReport& c) {
                             return with_median(c, "plad.mean_sq_error", "plad.mean_l2_error");
                           }},
                          {"L1 PLAD: type I", metric("plad.mean_type_i")},
                          {"L1 PLAD: type II", metric("plad.mean_type_ii")},
                          {"Lasso: error", [](const CellReport& c) {
                             return with_median(c, "lasso.mean_sq_error", "lasso.mean_l2_error");
                           }},
                          {"Lasso: type I", metric("lasso.mean_type_i")},
                          {"Lasso: type II", metric("lasso.mean_type_ii")}});
    case 3:
      return "Mean ||b - beta||_2^2 (median after LAD refit) and selection errors\n\n" +
             metric_rows(report,
                         {{"Error", [](const CellReport& c) {
                             return with_median(c, "plad.mean_sq_error", "refit.median_sq_error");
                           }},
                          {"Type I", metric("plad.mean_type_i")},
                          {"Type II", metric("plad.mean_type_ii")}});
    default: {
      std::vector<std::string> names;
      for (const CellReport& c : report.cells) {
        for (const auto& m : c.metrics) push_unique(names, m.first);
      }
      std::ostringstream out;
      std::vector<std::string> header{"cell"};
      header.insert(header.end(), names.begin(), names.end());
      markdown_header(out, header);
      for (const CellReport& c : report.cells) {
        std::vector<std::string> fields{c.id};
        for (const std::string& name : names) fields.push_back(metric_text(c, name));
        markdown_row(out, fields);
      }
      return out.str();
    }
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string render_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "cell,row_label,column_label,noise_family,noise_scale,lambda,metric,value\n";
  for (const CellReport& c : report.cells) {
    for (const auto& [name, value] : c.metrics) {
      out << csv_field(c.id) << ',' << csv_field(c.row_label) << ',' << csv_field(c.column_label)
          << ',' << c.noise_family << ',' << c.noise_scale << ',' << c.lambda << ',' << name << ','
          << value << '\n';
    }
  }
  return out.str();
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  throw DomainError("unknown format '" + name + "' (expected json, csv or markdown)");
}

std::string render_report(const ExperimentReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return to_json(report).dump(2) + '\n';
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Markdown: return render_markdown(report);
  }
  return {};
}

ExperimentReport report_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    ExperimentReport report;
    report.format_version = doc.at("format_version").get<int>();
    const json& cfg = doc.at("config");
    report.config.table = cfg.at("table").get<int>();
    report.config.preset = cfg.at("preset").get<std::string>();
    report.config.n = cfg.at("n").get<Index>();
    report.config.p = cfg.at("p").get<Index>();
    report.config.k = cfg.at("k").get<Index>();
    report.config.reps = cfg.at("reps").get<int>();
    report.config.seed = cfg.at("seed").get<std::uint64_t>();
    report.config.fixed_design = cfg.at("fixed_design").get<bool>();
    report.config.theorem_check = cfg.at("theorem_check").get<bool>();
    report.config.beta_true = cfg.at("beta_true").get<std::vector<double>>();
    report.seconds = number(doc.at("seconds"));
    for (const json& c : doc.at("cells")) {
      CellReport cell;
      cell.id = c.at("id").get<std::string>();
      cell.row_label = c.at("row_label").get<std::string>();
      cell.column_label = c.at("column_label").get<std::string>();
      cell.noise_family = c.at("noise_family").get<std::string>();
      cell.noise_scale = number(c.at("noise_scale"));
      cell.lambda = number(c.at("lambda"));
      cell.lasso_lambda = number(c.at("lasso_lambda"));
      cell.failures = c.at("failures").get<int>();
      for (const json& m : c.at("metrics")) {
        cell.metrics.emplace_back(m.at("name").get<std::string>(), number(m.at("value")));
      }
      for (const json& r : c.at("replications")) {
        ReplicationRecord rec;
        rec.rep = r.at("rep").get<int>();
        rec.seed = r.at("seed").get<std::uint64_t>();
        rec.plad = method_from_json(r.at("plad"));
        rec.refit = method_from_json(r.at("refit"));
        rec.lasso = method_from_json(r.at("lasso"));
        rec.theorem = theorem_from_json(r.at("theorem"));
        cell.replications.push_back(std::move(rec));
      }
      report.cells.push_back(std::move(cell));
    }
    return report;
  } catch (const json::exception& e) {
    throw DomainError(std::string("report_from_json: ") + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace plad
