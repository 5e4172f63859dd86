#ifndef FAIRBAND_CSVIO_HPP
#define FAIRBAND_CSVIO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "fairband/model.hpp"

namespace fairband::csv {

/// Fixed numeric formatting (9 significant digits) so golden files are stable.
std::string format_number(double value);

std::vector<std::string> split_line(const std::string& line);

/// Matrix files: header `agent,arm_1..arm_K`, then one row per agent whose
/// first field is the agent label. Policy files: a single row of K
/// probabilities, no header.
RewardMatrix read_matrix_csv(std::istream& in);
RewardMatrix read_matrix_file(const std::string& path);
void write_matrix_csv(std::ostream& out, const RewardMatrix& matrix);

Policy read_policy_csv(std::istream& in);
Policy read_policy_file(const std::string& path);
void write_policy_csv(std::ostream& out, const Policy& policy);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

} // namespace fairband::csv

#endif
