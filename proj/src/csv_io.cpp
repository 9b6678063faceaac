#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "yule/cli_io.hpp"

namespace yule::cli {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_paths_csv(std::ostream& out, const PathPair& pair,
                     const std::string& provenance) {
  out << provenance << '\n' << "t,x1,x2\n";
  for (std::size_t k = 0; k < pair.grid.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out << format_real(pair.grid.time(k)) << ',' << format_real(pair.x1[i])
        << ',' << format_real(pair.x2[i]) << '\n';
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size() || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": not a finite number: '" + cell + "'");
  }
  return v;
}

}  // namespace

PathPair read_paths_csv(std::istream& in) {
  std::vector<double> t, x1, x2;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto cells = split_row(body);
    if (!header_seen) {
      header_seen = true;
      if (cells == std::vector<std::string>{"t", "x1", "x2"}) continue;
      if (!cells.empty() && !cells[0].empty() &&
          std::isalpha(static_cast<unsigned char>(cells[0][0]))) {
        throw ParseError("expected header 't,x1,x2'");
      }
    }
    if (cells.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 3 columns");
    }
    t.push_back(parse_cell(cells[0], line_no));
    x1.push_back(parse_cell(cells[1], line_no));
    x2.push_back(parse_cell(cells[2], line_no));
  }
  if (t.size() < 3) throw ParseError("need at least 3 samples (n >= 2)");

  const std::size_t n = t.size() - 1;
  const double delta = (t.back() - t.front()) / static_cast<double>(n);
  if (!(delta > 0.0)) throw NonuniformGrid("time column must increase");
  for (std::size_t k = 0; k <= n; ++k) {
    const double expected = t.front() + static_cast<double>(k) * delta;
    if (std::abs(t[k] - expected) > 1e-9 * delta) {
      throw NonuniformGrid("sample " + std::to_string(k) +
                           " deviates from the uniform grid");
    }
  }

  PathPair pair{SampleGrid(n, delta), {}, {}, Scheme::External, 0, std::nullopt};
  pair.x1 = Eigen::Map<const Eigen::VectorXd>(x1.data(),
                                              static_cast<Eigen::Index>(x1.size()));
  pair.x2 = Eigen::Map<const Eigen::VectorXd>(x2.data(),
                                              static_cast<Eigen::Index>(x2.size()));
  return pair;
}

void write_samples_csv(std::ostream& out, const mc::McResult& result,
                       const std::string& provenance) {
  out << provenance << '\n' << "replication,value\n";
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    out << result.replications[i] << ',' << format_real(result.values[i])
        << '\n';
  }
}

void write_ecdf_csv(std::ostream& out, const mc::Ecdf& f,
                    const std::string& provenance) {
  out << provenance << '\n' << "x,F\n";
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    out << format_real(f.points[i]) << ',' << format_real(f.probability[i])
        << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const mc::Histogram& h,
                         const std::string& provenance) {
  out << provenance << '\n' << "bin_left,bin_right,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const auto i = static_cast<Eigen::Index>(b);
    out << format_real(h.edges[i]) << ',' << format_real(h.edges[i + 1]) << ','
        << h.counts[b] << '\n';
  }
}

void write_table_csv(std::ostream& out, std::span<const TableRow> rows,
                     const std::string& provenance) {
  out << provenance << '\n' << "theta,n,T_n,mean,median,stddev\n";
  for (const auto& row : rows) {
    out << format_real(row.theta) << ',' << row.n << ','
        << format_real(row.horizon) << ',' << format_real(row.summary.mean)
        << ',' << format_real(row.summary.median) << ','
        << format_real(row.summary.stddev) << '\n';
  }
}

}  // namespace yule::cli
