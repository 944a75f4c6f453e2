#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "snm/experiments.hpp"
#include "snm/ode_systems.hpp"
#include "snm/snm_engine.hpp"

namespace snm {

// Shortest decimal representation that parses back to the same double;
// keeps emitted files byte-reproducible.
std::string format_double(double value);
double parse_double(const std::string& field, const std::string& context);

// data.csv / truth.csv. Observation columns are y1..yp; truth columns are
// x1..xp. A file carrying only x columns is read as noise-free observations.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds);
void write_truth_csv(const std::filesystem::path& path,
                     const Eigen::VectorXd& times,
                     const Eigen::MatrixXd& truth);
Dataset read_dataset_csv(const std::filesystem::path& path);

// chains.csv, long format: iter,param,value.
void write_chains_csv(const std::filesystem::path& path, const Chains& chains);

struct LongChains {
  std::vector<std::string> params;               // first-appearance order
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, std::vector<int>> iters;
};
LongChains read_chains_csv(const std::filesystem::path& path);
PosteriorSummary summarize_long(const LongChains& chains, int burn_in);

// summary.csv: param,mean,sd,q025,q975.
void write_summary_csv(const std::filesystem::path& path,
                       const PosteriorSummary& summary);

// curves.csv: t[,truth],smoothed,reconstructed.
void write_curves_csv(const std::filesystem::path& path,
                      const Eigen::VectorXd& times,
                      const Eigen::VectorXd* truth,
                      const PosteriorCurves& curves);

// scenario_summary.csv: param,avg_post_mean,mse plus bookkeeping rows
// (sigma2, curve MSEs, replicate counts) with the unused cell left empty.
void write_scenario_csv(const std::filesystem::path& path,
                        const ScenarioSummary& summary);

// meta.csv: key,value rows describing a simulation run.
void write_meta_csv(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& rows);

}  // namespace snm
