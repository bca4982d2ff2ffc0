#ifndef ODOMFUSE_IO_HPP_
#define ODOMFUSE_IO_HPP_

#include "odomfuse/core.hpp"
#include "odomfuse/eval.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace odomfuse
{

// Malformed input file or config document.
struct ParseError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Filesystem failure (unwritable directory, missing file, ...).
struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Shortest decimal form that round-trips back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Trajectory CSV, header "t,x,y,yaw". Values round-trip exactly.
std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& text);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

// Measurement stream as JSON Lines; one object per line with fields
// t, kind, value, noise_diag. Only diagonal noise crosses the wire; the
// in-memory API accepts full matrices.
std::string measurements_to_jsonl(const std::vector<Measurement>& measurements);
std::vector<Measurement> measurements_from_jsonl(const std::string& text);
void write_measurements_jsonl(const std::filesystem::path& path, const std::vector<Measurement>& measurements);
std::vector<Measurement> read_measurements_jsonl(const std::filesystem::path& path);

// Error-series CSV, header "t,ex,ey,eyaw".
std::string error_series_to_csv(const ErrorSeries& series);
void write_error_series_csv(const std::filesystem::path& path, const ErrorSeries& series);

}  // namespace odomfuse

#endif  // ODOMFUSE_IO_HPP_
