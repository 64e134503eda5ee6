#include "pevp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "pevp/error.hpp"

namespace pevp {

std::string format_double(double x) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::InvalidArgument,
                "cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_report_csv(const ErrorReport& report) {
  const bool rq = !report.rayleigh_error.empty();
  std::string out = "mu,pair_index,abs_err_lambda,vec_deviation";
  out += rq ? ",rayleigh_err\n" : "\n";
  for (std::size_t g = 0; g < report.grid.size(); ++g) {
    for (std::size_t s = 0; s < report.pair_index.size(); ++s) {
      out += format_double(report.grid[g]) + ',' + std::to_string(report.pair_index[s]) + ',' +
             format_double(report.eig_error[g][s]) + ',' + format_double(report.vec_deviation[g][s]);
      if (rq) out += ',' + format_double(report.rayleigh_error[g][s]);
      out += '\n';
    }
  }
  return out;
}

std::string histogram_csv(const std::vector<HistogramRow>& rows, const std::string& name_a,
                          const std::string& name_b) {
  std::string out = "bin_lo,bin_hi,count_" + name_a + ",count_" + name_b + "\n";
  for (const auto& r : rows) {
    out += format_double(r.lo) + ',' + format_double(r.hi) + ',' + std::to_string(r.count_a) +
           ',' + std::to_string(r.count_b) + '\n';
  }
  return out;
}

std::string timing_csv(const std::vector<TimingRow>& rows) {
  std::string out = "n,p,seconds,ratio\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + std::to_string(r.p) + ',' + format_double(r.seconds) + ',' +
           format_double(r.ratio) + '\n';
  }
  return out;
}

std::string samples_csv(const SampleSet& set) {
  std::string out = "sample,mu,rank,re_lambda,im_lambda\n";
  for (std::size_t i = 0; i < set.mu.size(); ++i) {
    for (std::size_t r = 0; r < set.ranks.size(); ++r) {
      out += std::to_string(i) + ',' + format_double(set.mu[i]) + ',' +
             std::to_string(set.ranks[r]) + ',' + format_double(set.values[i][r].real()) + ',' +
             format_double(set.values[i][r].imag()) + '\n';
    }
  }
  return out;
}

}  // namespace pevp
