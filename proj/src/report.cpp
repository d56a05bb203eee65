#include "plver/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "plver/errors.hpp"

namespace plver {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("report: cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

std::string fmt(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Fixed series colors: plver, abr, cort, extras.
const char* series_color(std::size_t i) {
  static const char* colors[] = {"#2b6cb0", "#dd6b20", "#38a169",
                                 "#805ad5", "#d53f8c", "#718096"};
  return colors[i % 6];
}

class SvgCanvas {
 public:
  SvgCanvas(int width, int height) : width_(width), height_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
          << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
          << height << "\">\n";
    body_ << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
          << "\" fill=\"white\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
          << fmt(w) << "\" height=\"" << fmt(h) << "\" fill=\"" << fill
          << "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0) {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\""
          << fmt(x2) << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << fmt(width) << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& points,
                const std::string& stroke) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : points) body_ << fmt(x) << "," << fmt(y) << " ";
    body_ << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 12,
            const std::string& anchor = "start") {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\""
          << size << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor
          << "\">" << s << "</text>\n";
  }

  std::string finish() {
    body_ << "</svg>\n";
    return body_.str();
  }

 private:
  int width_;
  int height_;
  std::ostringstream body_;
};

// Ratio axis with gridlines at 0, 0.25, ..., 1.
void draw_ratio_axis(SvgCanvas& svg, double x0, double y0, double x1, double y1) {
  for (int i = 0; i <= 4; ++i) {
    const double r = 0.25 * i;
    const double y = y1 - (y1 - y0) * r;
    svg.line(x0, y, x1, y, i == 0 ? "#333333" : "#dddddd");
    svg.text(x0 - 6, y + 4, fmt(r), 10, "end");
  }
}

std::string heat_color(double ratio) {
  // 0.3 -> red, 0.9 -> green, clamped; linear blend through yellow.
  const double t = std::clamp((ratio - 0.3) / 0.6, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(220 - 160 * t));
  const int g = static_cast<int>(std::lround(60 + 140 * t));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x3c", r, g);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("report: cannot write " + path);
  out << content;
}

std::vector<std::string> known_strategies(const std::set<std::string>& present) {
  std::vector<std::string> order = {"plver", "abr", "cort"};
  std::vector<std::string> out;
  for (const std::string& s : order) {
    if (present.count(s)) {
      out.push_back(s);
    } else {
      std::cerr << "report: no rows for strategy " << s << ", series omitted\n";
    }
  }
  for (const std::string& s : present) {
    if (std::find(order.begin(), order.end(), s) == order.end()) out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw DataError("report: empty metrics file " + path);
  std::vector<MetricsRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() < 12) {
      throw DataError("report: malformed metrics row " + std::to_string(i + 1));
    }
    MetricsRow r;
    r.window_start = std::stoll(f[0]);
    r.strategy = f[1];
    r.alpha = std::stod(f[2]);
    r.fluctuation = std::stod(f[3]);
    r.offloading = std::stod(f[4]);
    for (int t = 0; t < 4; ++t) {
      if (!f[5 + t].empty()) r.satisfaction[t] = std::stod(f[5 + t]);
    }
    r.edge_kb = std::stoll(f[9]);
    r.origin_kb = std::stoll(f[10]);
    r.degenerate = f[11] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ClusterRow> read_per_cluster_csv(const std::string& path) {
  const auto rows = read_csv(path);
  std::vector<ClusterRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() < 5) {
      throw DataError("report: malformed per-cluster row " + std::to_string(i + 1));
    }
    out.push_back(ClusterRow{f[0], std::stod(f[1]), std::stod(f[2]), f[3],
                             std::stod(f[4])});
  }
  return out;
}

std::vector<std::string> write_report(const std::string& metrics_dir,
                                      const std::string& out_dir) {
  const fs::path metrics_path = fs::path(metrics_dir) / "metrics.csv";
  if (!fs::exists(metrics_path)) {
    throw DataError("report: no metrics.csv under " + metrics_dir);
  }
  const std::vector<MetricsRow> rows = read_metrics_csv(metrics_path.string());
  if (rows.empty()) throw DataError("report: metrics.csv has no data rows");

  fs::create_directories(out_dir);
  std::vector<std::string> written;

  std::set<std::string> present;
  double base_fluct = rows.front().fluctuation;
  for (const MetricsRow& r : rows) {
    present.insert(r.strategy);
    base_fluct = std::min(base_fluct, r.fluctuation);
  }
  const std::vector<std::string> strategies = known_strategies(present);

  std::set<double> alpha_set;
  for (const MetricsRow& r : rows) {
    if (r.fluctuation == base_fluct) alpha_set.insert(r.alpha);
  }
  const std::vector<double> alphas(alpha_set.begin(), alpha_set.end());

  auto mean_for = [&](const std::string& strategy, double alpha) -> std::optional<double> {
    double sum = 0.0;
    int n = 0;
    for (const MetricsRow& r : rows) {
      if (r.strategy == strategy && r.alpha == alpha && r.fluctuation == base_fluct) {
        sum += r.offloading;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
  };

  // Mean offloading vs alpha, grouped bars.
  {
    const int width = 640, height = 360;
    const double x0 = 60, y0 = 40, x1 = width - 20, y1 = height - 50;
    SvgCanvas svg(width, height);
    svg.text(width / 2.0, 22, "Mean traffic offloading ratio vs alpha", 14, "middle");
    draw_ratio_axis(svg, x0, y0, x1, y1);
    const double slot = (x1 - x0) / std::max<std::size_t>(alphas.size(), 1);
    const double bar = slot / (strategies.size() + 1);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      svg.text(x0 + slot * a + slot / 2, y1 + 18, fmt(alphas[a]), 11, "middle");
      for (std::size_t s = 0; s < strategies.size(); ++s) {
        const auto m = mean_for(strategies[s], alphas[a]);
        if (!m) continue;
        const double h = (y1 - y0) * *m;
        svg.rect(x0 + slot * a + bar * (s + 0.5), y1 - h, bar * 0.9, h,
                 series_color(s));
      }
    }
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      svg.rect(x0 + 110.0 * s, height - 16, 10, 10, series_color(s));
      svg.text(x0 + 110.0 * s + 14, height - 7, strategies[s], 11);
    }
    const std::string path = (fs::path(out_dir) / "offloading_vs_alpha.svg").string();
    write_file(path, svg.finish());
    written.push_back(path);
  }

  // Per-window offloading lines at the largest alpha.
  {
    const double alpha = alphas.empty() ? 1.0 : alphas.back();
    std::set<Seconds> starts;
    for (const MetricsRow& r : rows) {
      if (r.alpha == alpha && r.fluctuation == base_fluct) starts.insert(r.window_start);
    }
    const std::vector<Seconds> xs(starts.begin(), starts.end());
    const int width = 640, height = 320;
    const double x0 = 60, y0 = 40, x1 = width - 20, y1 = height - 50;
    SvgCanvas svg(width, height);
    svg.text(width / 2.0, 22, "Offloading ratio per window (alpha " + fmt(alpha) + ")",
             14, "middle");
    draw_ratio_axis(svg, x0, y0, x1, y1);
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      std::vector<std::pair<double, double>> points;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        for (const MetricsRow& r : rows) {
          if (r.strategy == strategies[s] && r.alpha == alpha &&
              r.fluctuation == base_fluct && r.window_start == xs[i]) {
            const double px =
                xs.size() == 1 ? (x0 + x1) / 2
                               : x0 + (x1 - x0) * (static_cast<double>(i) /
                                                   (xs.size() - 1));
            points.push_back({px, y1 - (y1 - y0) * r.offloading});
            break;
          }
        }
      }
      if (!points.empty()) svg.polyline(points, series_color(s));
      svg.rect(x0 + 110.0 * s, height - 16, 10, 10, series_color(s));
      svg.text(x0 + 110.0 * s + 14, height - 7, strategies[s], 11);
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double px = xs.size() == 1
                            ? (x0 + x1) / 2
                            : x0 + (x1 - x0) * (static_cast<double>(i) / (xs.size() - 1));
      svg.text(px, y1 + 18, std::to_string(xs[i]), 9, "middle");
    }
    const std::string path = (fs::path(out_dir) / "hourly.svg").string();
    write_file(path, svg.finish());
    written.push_back(path);
  }

  // Per-cluster heatmap grid, one band per strategy.
  {
    const fs::path cluster_path = fs::path(metrics_dir) / "per_cluster.csv";
    std::vector<ClusterRow> cluster_rows;
    if (fs::exists(cluster_path)) {
      cluster_rows = read_per_cluster_csv(cluster_path.string());
    }
    std::set<std::string> clusters;
    std::set<double> cluster_alphas;
    for (const ClusterRow& r : cluster_rows) {
      clusters.insert(r.cluster);
      cluster_alphas.insert(r.alpha);
    }
    // Paper-style working point: mid alpha.
    double alpha = 0.0;
    if (!cluster_alphas.empty()) {
      std::vector<double> v(cluster_alphas.begin(), cluster_alphas.end());
      alpha = v[(v.size() - 1) / 2];
    }
    const std::vector<std::string> cluster_ids(clusters.begin(), clusters.end());
    const int cols = std::max<int>(1, static_cast<int>(
                                          std::ceil(std::sqrt(cluster_ids.size()))));
    const int cell = 22;
    const int grid_w = cols * cell;
    const int rows_n =
        cluster_ids.empty()
            ? 1
            : static_cast<int>((cluster_ids.size() + cols - 1) / cols);
    const int band_w = grid_w + 60;
    const int width = std::max<int>(360, static_cast<int>(strategies.size()) * band_w + 40);
    const int height = rows_n * cell + 110;
    SvgCanvas svg(width, height);
    svg.text(width / 2.0, 22, "Per-cluster offloading (alpha " + fmt(alpha) + ")", 14,
             "middle");
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      const double ox = 20 + band_w * s;
      svg.text(ox + grid_w / 2.0, 46, strategies[s], 12, "middle");
      for (std::size_t c = 0; c < cluster_ids.size(); ++c) {
        double ratio = -1.0;
        for (const ClusterRow& r : cluster_rows) {
          if (r.strategy == strategies[s] && r.cluster == cluster_ids[c] &&
              r.alpha == alpha) {
            ratio = r.offloading;
            break;
          }
        }
        const double cx = ox + (c % cols) * cell;
        const double cy = 56 + (c / cols) * cell;
        svg.rect(cx, cy, cell - 2, cell - 2,
                 ratio < 0 ? std::string("#eeeeee") : heat_color(ratio));
      }
    }
    // Color legend 30%..90%.
    for (int i = 0; i <= 6; ++i) {
      const double r = 0.3 + 0.1 * i;
      svg.rect(20 + i * 46, height - 34, 44, 12, heat_color(r));
      svg.text(20 + i * 46 + 22, height - 40, fmt(r, 1), 9, "middle");
    }
    const std::string path = (fs::path(out_dir) / "per_cluster_heatmap.svg").string();
    write_file(path, svg.finish());
    written.push_back(path);
  }

  // Satisfaction per quality tier at the largest alpha.
  {
    const double alpha = alphas.empty() ? 1.0 : alphas.back();
    const int width = 640, height = 320;
    const double x0 = 60, y0 = 40, x1 = width - 20, y1 = height - 50;
    SvgCanvas svg(width, height);
    svg.text(width / 2.0, 22,
             "Request satisfaction by quality tier (alpha " + fmt(alpha) + ")", 14,
             "middle");
    draw_ratio_axis(svg, x0, y0, x1, y1);
    const char* tier_names[4] = {"240p", "360p", "480p", "720p"};
    const double slot = (x1 - x0) / 4.0;
    const double bar = slot / (strategies.size() + 1);
    for (int t = 0; t < 4; ++t) {
      svg.text(x0 + slot * t + slot / 2, y1 + 18, tier_names[t], 11, "middle");
      for (std::size_t s = 0; s < strategies.size(); ++s) {
        double sum = 0.0;
        int n = 0;
        for (const MetricsRow& r : rows) {
          if (r.strategy == strategies[s] && r.alpha == alpha &&
              r.fluctuation == base_fluct && r.satisfaction[t]) {
            sum += *r.satisfaction[t];
            ++n;
          }
        }
        if (n == 0) continue;
        const double h = (y1 - y0) * (sum / n);
        svg.rect(x0 + slot * t + bar * (s + 0.5), y1 - h, bar * 0.9, h,
                 series_color(s));
      }
    }
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      svg.rect(x0 + 110.0 * s, height - 16, 10, 10, series_color(s));
      svg.text(x0 + 110.0 * s + 14, height - 7, strategies[s], 11);
    }
    const std::string path = (fs::path(out_dir) / "satisfaction_by_tier.svg").string();
    write_file(path, svg.finish());
    written.push_back(path);
  }

  return written;
}

}  // namespace plver
