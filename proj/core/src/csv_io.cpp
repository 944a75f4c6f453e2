#include "snm/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace snm {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& context) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw invalid_input(context + ": cannot parse number '" + field + "'");
  }
  return value;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open " + path.string());
  return in;
}

std::string row_context(const std::filesystem::path& path, std::size_t row) {
  return path.filename().string() + " row " + std::to_string(row);
}

}  // namespace

void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds) {
  auto out = open_out(path);
  out << "t";
  for (Eigen::Index k = 0; k < ds.p(); ++k) out << ",y" << k + 1;
  out << "\n";
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    out << format_double(ds.times[i]);
    for (Eigen::Index k = 0; k < ds.p(); ++k) {
      out << "," << format_double(ds.y(i, k));
    }
    out << "\n";
  }
}

void write_truth_csv(const std::filesystem::path& path,
                     const Eigen::VectorXd& times,
                     const Eigen::MatrixXd& truth) {
  auto out = open_out(path);
  out << "t";
  for (Eigen::Index k = 0; k < truth.cols(); ++k) out << ",x" << k + 1;
  out << "\n";
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    out << format_double(times[i]);
    for (Eigen::Index k = 0; k < truth.cols(); ++k) {
      out << "," << format_double(truth(i, k));
    }
    out << "\n";
  }
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw invalid_input(path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "t") {
    throw invalid_input(path.string() + ": header must start with 't'");
  }
  std::vector<int> y_cols, x_cols;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& name = header[c];
    const std::string idx = name.size() > 1 ? name.substr(1) : "";
    const bool numbered =
        !idx.empty() && idx.find_first_not_of("0123456789") == std::string::npos;
    if (name.size() > 1 && name[0] == 'y' && numbered) {
      y_cols.push_back(static_cast<int>(c));
    } else if (name.size() > 1 && name[0] == 'x' && numbered) {
      x_cols.push_back(static_cast<int>(c));
    } else {
      throw invalid_input(path.string() + ": unexpected column '" + name + "'");
    }
  }
  const bool truth_only = y_cols.empty();
  if (truth_only) y_cols = x_cols;
  if (y_cols.empty()) {
    throw invalid_input(path.string() + ": no observation columns");
  }
  const bool has_truth = !truth_only && !x_cols.empty();
  if (has_truth && x_cols.size() != y_cols.size()) {
    throw invalid_input(path.string() + ": y and x column counts differ");
  }

  std::vector<double> times;
  std::vector<std::vector<double>> y(y_cols.size());
  std::vector<std::vector<double>> x(has_truth ? x_cols.size() : 0);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw invalid_input(row_context(path, row) + ": expected " +
                          std::to_string(header.size()) + " fields, got " +
                          std::to_string(fields.size()));
    }
    times.push_back(parse_double(fields[0], row_context(path, row)));
    for (std::size_t k = 0; k < y_cols.size(); ++k) {
      y[k].push_back(parse_double(fields[y_cols[k]], row_context(path, row)));
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k].push_back(parse_double(fields[x_cols[k]], row_context(path, row)));
    }
  }
  const auto n = static_cast<Eigen::Index>(times.size());
  if (n < 3) throw invalid_input(path.string() + ": need at least 3 rows");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) {
      throw invalid_input(row_context(path, i + 2) +
                          ": times not strictly increasing");
    }
  }

  Dataset ds;
  ds.times = Eigen::Map<Eigen::VectorXd>(times.data(), n);
  ds.y.resize(n, static_cast<Eigen::Index>(y.size()));
  for (std::size_t k = 0; k < y.size(); ++k) {
    ds.y.col(k) = Eigen::Map<Eigen::VectorXd>(y[k].data(), n);
  }
  if (has_truth) {
    Eigen::MatrixXd truth(n, static_cast<Eigen::Index>(x.size()));
    for (std::size_t k = 0; k < x.size(); ++k) {
      truth.col(k) = Eigen::Map<Eigen::VectorXd>(x[k].data(), n);
    }
    ds.truth = truth;
  } else if (truth_only) {
    ds.truth = ds.y;
  }
  ds.validate();
  return ds;
}

void write_chains_csv(const std::filesystem::path& path, const Chains& chains) {
  auto out = open_out(path);
  out << "iter,param,value\n";
  const auto names = chain_param_names(chains);
  for (std::size_t r = 0; r < chains.size(); ++r) {
    const Eigen::VectorXd vals = chain_param_values(chains, chains.states[r]);
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
      out << chains.iterations[r] << "," << names[i] << ","
          << format_double(vals[i]) << "\n";
    }
  }
}

LongChains read_chains_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw invalid_input(path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "iter,param,value") {
    throw invalid_input(path.string() + ": expected header iter,param,value");
  }
  LongChains chains;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw invalid_input(row_context(path, row) + ": expected 3 fields");
    }
    const int iter = static_cast<int>(
        parse_double(fields[0], row_context(path, row)));
    const std::string& param = fields[1];
    if (chains.values.find(param) == chains.values.end()) {
      chains.params.push_back(param);
    }
    chains.iters[param].push_back(iter);
    chains.values[param].push_back(
        parse_double(fields[2], row_context(path, row)));
  }
  if (chains.params.empty()) {
    throw invalid_input(path.string() + ": no chain rows");
  }
  return chains;
}

PosteriorSummary summarize_long(const LongChains& chains, int burn_in) {
  PosteriorSummary out;
  out.reserve(chains.params.size());
  for (const auto& param : chains.params) {
    const auto& iters = chains.iters.at(param);
    const auto& values = chains.values.at(param);
    std::vector<double> kept;
    kept.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (iters[i] > burn_in) kept.push_back(values[i]);
    }
    if (kept.empty()) {
      throw invalid_input("parameter " + param +
                          ": no iterations beyond the burn-in");
    }
    out.push_back(summary_stats(param, kept));
  }
  return out;
}

void write_summary_csv(const std::filesystem::path& path,
                       const PosteriorSummary& summary) {
  auto out = open_out(path);
  out << "param,mean,sd,q025,q975\n";
  for (const auto& row : summary) {
    out << row.name << "," << format_double(row.mean) << ","
        << format_double(row.sd) << "," << format_double(row.q025) << ","
        << format_double(row.q975) << "\n";
  }
}

void write_curves_csv(const std::filesystem::path& path,
                      const Eigen::VectorXd& times,
                      const Eigen::VectorXd* truth,
                      const PosteriorCurves& curves) {
  auto out = open_out(path);
  out << (truth ? "t,truth,smoothed,reconstructed\n"
                : "t,smoothed,reconstructed\n");
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    out << format_double(times[i]);
    if (truth) out << "," << format_double((*truth)[i]);
    out << "," << format_double(curves.smoothed[i]) << ","
        << format_double(curves.reconstructed[i]) << "\n";
  }
}

void write_scenario_csv(const std::filesystem::path& path,
                        const ScenarioSummary& summary) {
  auto out = open_out(path);
  out << "param,avg_post_mean,mse\n";
  for (std::size_t i = 0; i < summary.params.size(); ++i) {
    out << summary.params[i] << ","
        << format_double(summary.avg_post_mean[i]) << ","
        << format_double(summary.mse[i]) << "\n";
  }
  out << "sigma2," << format_double(summary.avg_sigma2_target) << ",\n";
  out << "mse_x1,," << format_double(summary.avg_mse_x) << "\n";
  out << "mse_g1,," << format_double(summary.avg_mse_g) << "\n";
  out << "replicates_used," << summary.replicates_used << ",\n";
  out << "replicates_failed," << summary.failed << ",\n";
}

void write_meta_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& rows) {
  auto out = open_out(path);
  out << "key,value\n";
  for (const auto& [key, value] : rows) out << key << "," << value << "\n";
}

}  // namespace snm
