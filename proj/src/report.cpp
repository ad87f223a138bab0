#include "mlrank/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace mlrank {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& text, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ReportError("line " + std::to_string(line) + ": bad number `" + text + "`");
  return v;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

} // namespace

std::vector<ResultRecord> test_records(const std::string& dataset, const std::vector<CvResult>& results) {
  std::vector<ResultRecord> out;
  for (const auto& r : results)
    for (const auto& t : r.test)
      out.push_back({dataset, std::string(to_string(r.algo.id)), t.fold, t.lambda, t.ranking_loss,
                     t.partial_ranking_loss, t.seconds});
  return out;
}

std::vector<ResultRecord> validation_records(const std::string& dataset, const std::vector<CvResult>& results) {
  std::vector<ResultRecord> out;
  for (const auto& r : results)
    for (const auto& v : r.validation)
      out.push_back({dataset, std::string(to_string(r.algo.id)), v.fold, v.lambda, v.ranking_loss,
                     v.partial_ranking_loss, v.seconds});
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records, bool header) {
  if (header) out << kResultHeader << '\n';
  for (const auto& r : records)
    out << r.dataset << ',' << r.algo << ',' << r.fold << ',' << fmt("%.17g", r.lambda) << ','
        << fmt("%.17g", r.ranking_loss) << ',' << fmt("%.17g", r.partial_ranking_loss) << ','
        << fmt("%.6f", r.seconds) << '\n';
}

std::vector<ResultRecord> read_results_csv(std::istream& in) {
  std::vector<ResultRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = strip_cr(line);
    if (line.empty() || line == kResultHeader) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 7) throw ReportError("line " + std::to_string(number) + ": expected 7 columns");
    ResultRecord r;
    r.dataset = cells[0];
    r.algo = cells[1];
    r.fold = static_cast<int>(to_double(cells[2], number));
    r.lambda = to_double(cells[3], number);
    r.ranking_loss = to_double(cells[4], number);
    r.partial_ranking_loss = to_double(cells[5], number);
    r.seconds = to_double(cells[6], number);
    out.push_back(std::move(r));
  }
  return out;
}

SummaryTable summarize(const std::vector<ResultRecord>& records) {
  SummaryTable t;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> groups;
  auto index_of = [](std::vector<std::string>& names, const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
    names.push_back(name);
    return names.size() - 1;
  };
  for (const auto& r : records) {
    const std::size_t d = index_of(t.datasets, r.dataset);
    const std::size_t a = index_of(t.algorithms, r.algo);
    groups[{d, a}].push_back(r.ranking_loss);
  }
  t.cells.assign(t.datasets.size(), std::vector<std::optional<SummaryCell>>(t.algorithms.size()));
  for (const auto& [key, values] : groups) {
    const auto [mean, sd] = mean_and_std(values);
    t.cells[key.first][key.second] = SummaryCell{mean, sd};
  }
  return t;
}

std::vector<std::size_t> leading_columns(const std::vector<std::optional<SummaryCell>>& row, std::size_t count) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < row.size(); ++i)
    if (row[i]) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return row[a]->mean < row[b]->mean; });
  if (idx.size() > count) idx.resize(count);
  return idx;
}

void write_summary_markdown(std::ostream& out, const SummaryTable& table, int decimals) {
  char pattern[32];
  std::snprintf(pattern, sizeof(pattern), "%%.%df", decimals);
  out << "| Dataset |";
  for (const auto& a : table.algorithms) out << ' ' << a << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < table.algorithms.size(); ++i) out << "---|";
  out << '\n';
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    const auto& row = table.cells[d];
    const auto lead = leading_columns(row, 2);
    out << "| " << table.datasets[d] << " |";
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (!row[a]) {
        out << " - |";
        continue;
      }
      std::string cell = fmt(pattern, row[a]->mean) + " ± " + fmt(pattern, row[a]->std);
      if (!lead.empty() && lead.front() == a) cell += "†";
      if (std::find(lead.begin(), lead.end(), a) != lead.end()) cell = "**" + cell + "**";
      out << ' ' << cell << " |";
    }
    out << '\n';
  }
}

std::vector<RuntimeRecord> runtime_records(const std::string& dataset, const std::vector<CvResult>& results) {
  std::vector<RuntimeRecord> out;
  for (const auto& r : results) {
    double epoch_sum = 0.0;
    for (const auto& t : r.test) epoch_sum += t.epoch_seconds;
    out.push_back({dataset, std::string(to_string(r.algo.id)), r.wall_seconds,
                   r.test.empty() ? 0.0 : epoch_sum / static_cast<double>(r.test.size())});
  }
  return out;
}

void write_runtime_csv(std::ostream& out, const std::vector<RuntimeRecord>& records) {
  out << "dataset,algo,wall_seconds,mean_epoch_seconds\n";
  for (const auto& r : records)
    out << r.dataset << ',' << r.algo << ',' << fmt("%.6f", r.wall_seconds) << ','
        << fmt("%.6g", r.mean_epoch_seconds) << '\n';
}

std::vector<RuntimeRecord> read_runtime_csv(std::istream& in) {
  std::vector<RuntimeRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = strip_cr(line);
    if (line.empty() || line.rfind("dataset,", 0) == 0) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw ReportError("line " + std::to_string(number) + ": expected 4 columns");
    out.push_back({cells[0], cells[1], to_double(cells[2], number), to_double(cells[3], number)});
  }
  return out;
}

void write_runtime_svg(std::ostream& out, const std::vector<RuntimeRecord>& records) {
  std::vector<std::string> datasets, algos;
  for (const auto& r : records) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
    if (std::find(algos.begin(), algos.end(), r.algo) == algos.end()) algos.push_back(r.algo);
  }
  double lo = 1e300, hi = 0.0;
  for (const auto& r : records)
    if (r.wall_seconds > 0.0) {
      lo = std::min(lo, r.wall_seconds);
      hi = std::max(hi, r.wall_seconds);
    }
  if (hi == 0.0) lo = hi = 1.0;
  const int low_decade = static_cast<int>(std::floor(std::log10(lo)));
  const int high_decade = std::max(low_decade + 1, static_cast<int>(std::ceil(std::log10(hi))));

  constexpr double left = 70, top = 30, plot_h = 300, bar_w = 18, gap = 30, bottom = 90;
  const double group_w = bar_w * static_cast<double>(algos.size()) + gap;
  const double plot_w = std::max(group_w * static_cast<double>(datasets.size()), 200.0);
  const double width = left + plot_w + 20, height = top + plot_h + bottom;
  static const char* palette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3"};
  auto y_of = [&](double seconds) {
    const double t = (std::log10(seconds) - low_decade) / static_cast<double>(high_decade - low_decade);
    return top + plot_h * (1.0 - std::clamp(t, 0.0, 1.0));
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int d = low_decade; d <= high_decade; ++d) {
    const double y = y_of(std::pow(10.0, d));
    out << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\"" << y << "\" y2=\"" << y
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  out << "<text x=\"14\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 14 " << top + plot_h / 2
      << ")\" text-anchor=\"middle\">CPU seconds (log scale)</text>\n";
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const double x0 = left + gap / 2 + group_w * static_cast<double>(d);
    for (std::size_t a = 0; a < algos.size(); ++a) {
      const auto it = std::find_if(records.begin(), records.end(),
                                   [&](const RuntimeRecord& r) { return r.dataset == datasets[d] && r.algo == algos[a]; });
      if (it == records.end() || !(it->wall_seconds > 0.0)) continue;
      const double y = y_of(it->wall_seconds);
      out << "<rect x=\"" << x0 + bar_w * static_cast<double>(a) << "\" y=\"" << y << "\" width=\"" << bar_w - 2
          << "\" height=\"" << top + plot_h - y << "\" fill=\"" << palette[a % 7] << "\"><title>" << algos[a] << ": "
          << fmt("%.4g", it->wall_seconds) << " s</title></rect>\n";
    }
    out << "<text x=\"" << x0 + (group_w - gap) / 2 << "\" y=\"" << top + plot_h + 16
        << "\" text-anchor=\"middle\">" << datasets[d] << "</text>\n";
  }
  out << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\"" << top + plot_h << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  for (std::size_t a = 0; a < algos.size(); ++a) {
    const double x = left + 80.0 * static_cast<double>(a);
    const double y = top + plot_h + 50;
    out << "<rect x=\"" << x << "\" y=\"" << y - 10 << "\" width=\"12\" height=\"12\" fill=\"" << palette[a % 7]
        << "\"/>\n<text x=\"" << x + 16 << "\" y=\"" << y << "\">" << algos[a] << "</text>\n";
  }
  out << "</svg>\n";
}

} // namespace mlrank
