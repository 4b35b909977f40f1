#include "uwsn/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "uwsn/error.hpp"

namespace uwsn {

std::string format_number(double v) { return fmt::format("{}", v); }

void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [key, value] : meta) fmt::print(out, "# {}={}\n", key, value);
}

void write_trajectory_csv(std::ostream& out, const Trajectory<double>& traj, const Metadata& meta) {
  write_metadata(out, meta);
  out << "t,s,i,r,s_sleep,i_sleep,r_sleep\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const State<double>& x = traj.states[k];
    fmt::print(out, "{},{},{},{},{},{},{}\n", traj.times[k], x(kS), x(kI), x(kR), x(kSSleep), x(kISleep),
               x(kRSleep));
  }
}

void write_census_csv(std::ostream& out, const CensusSeries& series, const Metadata& meta) {
  write_metadata(out, meta);
  out << "step,S,I,R,Dead\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Census& c = series[k];
    fmt::print(out, "{},{},{},{},{}\n", k, c.susceptible, c.informed, c.recovered, c.dead);
  }
}

void write_mc_csv(std::ostream& out, const McSummary& summary, const Metadata& meta) {
  write_metadata(out, meta);
  out << "run,l,m,c,b,R0,extinct,final_I,min_I_step\n";
  for (const McRun& r : summary.per_run) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", r.run, r.l, r.m, r.c, r.b, r.r0, r.extinct ? 1 : 0,
               r.final_informed, r.min_informed_step);
  }
}

void write_trace_csv(std::ostream& out, const MoveTrace& trace, const Metadata& meta) {
  write_metadata(out, meta);
  out << "step,node,rule,state_before,state_after,compartment_before,compartment_after\n";
  for (const MoveRecord& m : trace) {
    fmt::print(out, "{},{},{},{},{},{},{}\n", m.step, value(m.node), to_string(m.rule), to_string(m.state_before),
               to_string(m.state_after), to_string(m.compartment_before), to_string(m.compartment_after));
  }
}

// ---------------------------------------------------------------------------------------------

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

constexpr std::array kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

}  // namespace

void write_svg_plot(std::ostream& out, std::string_view title, std::string_view x_label,
                    std::string_view y_label, const std::vector<PlotSeries>& series) {
  constexpr double W = 800, H = 600;
  constexpr double left = 80, right = 170, top = 50, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const PlotSeries& s : series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1;
  if (!(ymin <= ymax)) ymin = 0, ymax = 1;
  ymin = std::min(ymin, 0.0);
  if (xmax - xmin <= 0) xmax = xmin + 1;
  if (ymax - ymin <= 0) ymax = ymin + 1;

  auto sx = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double v) { return top + ph - (v - ymin) / (ymax - ymin) * ph; };

  fmt::print(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
  fmt::print(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\">\n", W,
             H, W, H);
  fmt::print(out, "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
  fmt::print(out, "<text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-size=\"18\">{}</text>\n", left + pw / 2,
             xml_escape(title));

  // axes and ticks
  fmt::print(out, "<g stroke=\"black\" stroke-width=\"1\">\n");
  fmt::print(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", left, top + ph, left + pw, top + ph);
  fmt::print(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", left, top, left, top + ph);
  fmt::print(out, "</g>\n<g font-size=\"12\">\n");
  constexpr int kTicks = 5;
  for (int k = 0; k <= kTicks; ++k) {
    const double xv = xmin + (xmax - xmin) * k / kTicks;
    const double yv = ymin + (ymax - ymin) * k / kTicks;
    fmt::print(out, "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>\n", sx(xv), top + ph,
               top + ph + 5);
    fmt::print(out, "<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.4g}</text>\n", sx(xv), top + ph + 20, xv);
    fmt::print(out, "<line x1=\"{1}\" y1=\"{0:.2f}\" x2=\"{2}\" y2=\"{0:.2f}\" stroke=\"black\"/>\n", sy(yv), left - 5,
               left);
    fmt::print(out, "<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n", left - 8, sy(yv) + 4, yv);
  }
  fmt::print(out, "</g>\n");
  fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", left + pw / 2,
             H - 15, xml_escape(x_label));
  fmt::print(out,
             "<text x=\"20\" y=\"{0}\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 {0})\">{1}</text>\n",
             top + ph / 2, xml_escape(y_label));

  for (std::size_t k = 0; k < series.size(); ++k) {
    const PlotSeries& s = series[k];
    const char* color = kColors[k % kColors.size()];
    std::string points;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t j = 0; j < n; ++j) {
      if (j) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", sx(s.x[j]), sy(s.y[j]));
    }
    fmt::print(out, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, points);

    const double ly = top + 10 + 22.0 * static_cast<double>(k);
    fmt::print(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n", left + pw + 15,
               ly, left + pw + 40, ly, color);
    fmt::print(out, "<text x=\"{}\" y=\"{}\" font-size=\"13\">{}</text>\n", left + pw + 46, ly + 4,
               xml_escape(s.name));
  }
  fmt::print(out, "</svg>\n");
}

// ---------------------------------------------------------------------------------------------

namespace {

std::vector<std::pair<std::string_view, std::size_t>> tokens(std::string_view line) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r' || line[k] == ',')) ++k;
    const std::size_t start = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r' && line[k] != ',') ++k;
    if (k > start) out.emplace_back(line.substr(start, k - start), start + 1);
  }
  return out;
}

NodeId parse_id(std::string_view tok, std::size_t line, std::size_t column) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ConfigError("expected a node id, got '" + std::string(tok) + "'", line, column);
  }
  return NodeId{v};
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto toks = tokens(view);
    if (!toks.empty()) fn(toks, line_no);
  }
}

}  // namespace

ProtocolGraph parse_edge_list(std::istream& in) {
  ProtocolGraph g;
  for_each_line(in, [&](const auto& toks, std::size_t line) {
    if (toks.size() > 2) throw ConfigError("expected 'u v'", line, toks[2].second);
    const NodeId u = parse_id(toks[0].first, line, toks[0].second);
    if (toks.size() == 1) {
      if (!g.find(u)) g.add_node(u);
      return;
    }
    const NodeId v = parse_id(toks[1].first, line, toks[1].second);
    if (u == v) throw ConfigError("self-loop on node " + std::string(toks[0].first), line, toks[0].second);
    g.add_edge(u, v);
  });
  return g;
}

void apply_state_file(std::istream& in, ProtocolGraph& g) {
  for_each_line(in, [&](const auto& toks, std::size_t line) {
    if (toks.size() != 3) throw ConfigError("expected 'id state compartment'", line, toks[0].second);
    const NodeId id = parse_id(toks[0].first, line, toks[0].second);
    const auto index = g.find(id);
    if (!index) throw ConfigError("unknown node " + std::string(toks[0].first), line, toks[0].second);
    try {
      g.node(*index).state = parse_node_state(toks[1].first);
    } catch (const std::exception& e) {
      throw ConfigError(e.what(), line, toks[1].second);
    }
    try {
      g.node(*index).compartment = parse_compartment(toks[2].first);
    } catch (const std::exception& e) {
      throw ConfigError(e.what(), line, toks[2].second);
    }
  });
}

}  // namespace uwsn
