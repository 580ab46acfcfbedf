#pragma once

#include <span>
#include <vector>

#include "mcporo/microstructure.hpp"

namespace mcporo {

/// Lame parameters, permeability and storage of one continuum.
struct ContinuumMaterial {
  double lambda = 1.0;
  double mu = 1.0;
  double kappa = 1.0;
};

/// Element-wise constant Biot coefficients.
struct MaterialField {
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> kappa;
  std::vector<double> alpha;
  std::vector<double> storage;  // S = 1 / M

  [[nodiscard]] int size() const { return static_cast<int>(lambda.size()); }

  /// Throws InvalidArgument unless lambda, mu, kappa, S > 0 and alpha in [0, 1].
  void validate() const;

  [[nodiscard]] MaterialField restrict(std::span<const int> elements) const;

  static MaterialField uniform(int n_elements, const ContinuumMaterial& m, double alpha, double storage);
  static MaterialField from_continua(const ContinuumMap& cont, std::span<const ContinuumMaterial> per_continuum,
                                     double alpha, double storage);
};

}  // namespace mcporo
