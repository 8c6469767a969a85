#pragma once

#include "lagcarma/carma.hpp"
#include "lagcarma/mixing.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>

namespace lagcarma {

/// Contents of a key=value model file (schema in docs/model_file.md).
struct ModelFile {
  CarmaSpec spec;
  MixingLaw law;
  Eigen::VectorXd x0;
  double spot = 1.0;
  double rate = 0.0;
  double t0 = 0.0;
};

/// Throws DataError with the offending line for malformed input.
ModelFile parse_model(const std::string& text);
ModelFile load_model(const std::filesystem::path& path);
std::string format_model(const ModelFile& model);

}  // namespace lagcarma
