#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pevp/analysis.hpp"
#include "pevp/sampling.hpp"

namespace pevp {

/// Shortest round-trip form is not used: every value gets 17 significant
/// digits so files diff cleanly across runs.
std::string format_double(double x);

/// Write to a sibling temporary file, then rename over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// mu,pair_index,abs_err_lambda,vec_deviation[,rayleigh_err]
std::string error_report_csv(const ErrorReport& report);

/// bin_lo,bin_hi,count_<a>,count_<b>
std::string histogram_csv(const std::vector<HistogramRow>& rows, const std::string& name_a,
                          const std::string& name_b);

/// n,p,seconds,ratio
std::string timing_csv(const std::vector<TimingRow>& rows);

/// sample,mu,rank,re_lambda,im_lambda
std::string samples_csv(const SampleSet& set);

}  // namespace pevp
