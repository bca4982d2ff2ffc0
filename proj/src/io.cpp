#include "odomfuse/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace odomfuse
{

namespace
{

double parse_double_field(std::string_view field, std::size_t line_no)
{
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split_csv_line(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::string format_double(double v)
{
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

std::string trajectory_to_csv(const Trajectory& traj)
{
  std::string out = "t,x,y,yaw\n";
  for (const auto& s : traj.samples) {
    out += format_double(s.stamp);
    out += ',';
    out += format_double(s.pose.x);
    out += ',';
    out += format_double(s.pose.y);
    out += ',';
    out += format_double(s.pose.yaw);
    out += '\n';
  }
  return out;
}

Trajectory trajectory_from_csv(const std::string& text)
{
  Trajectory traj;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "t,x,y,yaw") {
        throw ParseError("line 1: expected header 't,x,y,yaw', got '" + line + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 4 columns, got " +
                       std::to_string(fields.size()));
    }
    TimedPose tp;
    tp.stamp = parse_double_field(fields[0], line_no);
    tp.pose.x = parse_double_field(fields[1], line_no);
    tp.pose.y = parse_double_field(fields[2], line_no);
    tp.pose.yaw = parse_double_field(fields[3], line_no);
    traj.samples.push_back(tp);
  }
  return traj;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj)
{
  write_text_file(path, trajectory_to_csv(traj));
}

Trajectory read_trajectory_csv(const std::filesystem::path& path)
{
  try {
    return trajectory_from_csv(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string measurements_to_jsonl(const std::vector<Measurement>& measurements)
{
  std::string out;
  for (const auto& m : measurements) {
    nlohmann::json j;
    j["t"] = m.stamp();
    j["kind"] = sensor_kind_name(m.kind());
    j["value"] = std::vector<double>(m.value().data(), m.value().data() + m.value().size());
    std::vector<double> noise_diag(static_cast<std::size_t>(m.noise().rows()));
    for (Eigen::Index i = 0; i < m.noise().rows(); ++i) {
      noise_diag[static_cast<std::size_t>(i)] = m.noise()(i, i);
    }
    j["noise_diag"] = noise_diag;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Measurement> measurements_from_jsonl(const std::string& text)
{
  std::vector<Measurement> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto kind = sensor_kind_from_name(j.at("kind").get<std::string>());
      const auto value = j.at("value").get<std::vector<double>>();
      const auto noise_diag = j.at("noise_diag").get<std::vector<double>>();
      if (noise_diag.size() != value.size()) {
        throw std::invalid_argument("noise_diag length does not match value length");
      }
      Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(value.data(), static_cast<Eigen::Index>(value.size()));
      Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(noise_diag.size()),
                                                    static_cast<Eigen::Index>(noise_diag.size()));
      for (std::size_t i = 0; i < noise_diag.size(); ++i) {
        noise(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = noise_diag[i];
      }
      out.emplace_back(j.at("t").get<double>(), kind, std::move(z), std::move(noise));
    } catch (const std::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_measurements_jsonl(const std::filesystem::path& path, const std::vector<Measurement>& measurements)
{
  write_text_file(path, measurements_to_jsonl(measurements));
}

std::vector<Measurement> read_measurements_jsonl(const std::filesystem::path& path)
{
  try {
    return measurements_from_jsonl(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string error_series_to_csv(const ErrorSeries& series)
{
  std::string out = "t,ex,ey,eyaw\n";
  for (const auto& s : series.samples) {
    out += format_double(s.stamp);
    out += ',';
    out += format_double(s.ex);
    out += ',';
    out += format_double(s.ey);
    out += ',';
    out += format_double(s.eyaw);
    out += '\n';
  }
  return out;
}

void write_error_series_csv(const std::filesystem::path& path, const ErrorSeries& series)
{
  write_text_file(path, error_series_to_csv(series));
}

}  // namespace odomfuse
