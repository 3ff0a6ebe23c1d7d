#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sepc/config.hpp"

namespace sepc::cli {

/// col=value predicates applied while loading a CSV (stratum selection).
struct Filter {
  std::string column;
  double value = 0.0;
};

struct CommonArgs {
  Config config;
  std::string label_column = "label";
  bool has_header = true;
  std::vector<Filter> filters;
};

struct TrainArgs : CommonArgs {
  std::string csv_path;
  std::string model_out;
};

struct PredictArgs : CommonArgs {
  std::string model_path;
  std::string csv_path;
  std::string out_path;       // empty = stdout
  bool csv_has_label = false; // skip the label column when present
};

struct EvalArgs : CommonArgs {
  std::string csv_path;
};

struct OvrArgs : CommonArgs {
  std::string csv_path;
  int class_a = 0;
  int class_b = 1;
};

struct SynthArgs {
  std::string kind;  // xor | circles | moons | gaussians
  int n = 200;
  double noise = 0.05;
  double separation = 4.0;
  std::uint64_t seed = 0;
  std::string out_path;
};

struct PlotArgs : CommonArgs {
  std::string model_path;
  std::string csv_path;
  std::string out_path;
};

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_predict(const PredictArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_ovr(const OvrArgs& args, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotArgs& args, std::ostream& out, std::ostream& err);

/// Full argv entry point used by the sepc binary.
int run(int argc, char** argv);

}  // namespace sepc::cli
