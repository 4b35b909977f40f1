#pragma once

// CSV and SVG writers, edge-list and state-file readers.

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uwsn/netsim.hpp"
#include "uwsn/ode.hpp"
#include "uwsn/protocol.hpp"

namespace uwsn {

/// Written as `# key=value` lines ahead of the CSV header.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trippable decimal form.
std::string format_number(double v);

void write_metadata(std::ostream& out, const Metadata& meta);

/// t,s,i,r,s_sleep,i_sleep,r_sleep
void write_trajectory_csv(std::ostream& out, const Trajectory<double>& traj, const Metadata& meta = {});
/// step,S,I,R,Dead
void write_census_csv(std::ostream& out, const CensusSeries& series, const Metadata& meta = {});
/// run,l,m,c,b,R0,extinct,final_I,min_I_step
void write_mc_csv(std::ostream& out, const McSummary& summary, const Metadata& meta = {});
/// step,node,rule,state_before,state_after,compartment_before,compartment_after
void write_trace_csv(std::ostream& out, const MoveTrace& trace, const Metadata& meta = {});

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line plot with axes and a legend; 800x600 viewBox.
void write_svg_plot(std::ostream& out, std::string_view title, std::string_view x_label,
                    std::string_view y_label, const std::vector<PlotSeries>& series);

/// One `u v` pair per line; blank lines and # comments allowed. Isolated nodes may be listed
/// alone on a line. ConfigError carries the line number.
ProtocolGraph parse_edge_list(std::istream& in);
/// `id state compartment` per line, e.g. `3 working I`. Unknown ids are an error.
void apply_state_file(std::istream& in, ProtocolGraph& g);

}  // namespace uwsn
