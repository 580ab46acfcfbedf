#include "mcporo/material.hpp"

#include <string>

#include "mcporo/error.hpp"

namespace mcporo {

void MaterialField::validate() const {
  const auto n = lambda.size();
  if (mu.size() != n || kappa.size() != n || alpha.size() != n || storage.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "material arrays differ in length");
  }
  for (std::size_t e = 0; e < n; ++e) {
    if (!(lambda[e] >= 0.0) || !(mu[e] > 0.0) || !(kappa[e] > 0.0) || !(storage[e] > 0.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  "need lambda >= 0 and positive mu, kappa, S (element " + std::to_string(e) + ")");
    }
    if (!(alpha[e] >= 0.0 && alpha[e] <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "Biot coefficient outside [0, 1]");
    }
  }
}

MaterialField MaterialField::restrict(std::span<const int> elements) const {
  MaterialField out;
  const auto n = elements.size();
  out.lambda.reserve(n);
  out.mu.reserve(n);
  out.kappa.reserve(n);
  out.alpha.reserve(n);
  out.storage.reserve(n);
  for (int e : elements) {
    const auto k = static_cast<std::size_t>(e);
    out.lambda.push_back(lambda[k]);
    out.mu.push_back(mu[k]);
    out.kappa.push_back(kappa[k]);
    out.alpha.push_back(alpha[k]);
    out.storage.push_back(storage[k]);
  }
  return out;
}

MaterialField MaterialField::uniform(int n_elements, const ContinuumMaterial& m, double alpha, double storage) {
  const auto n = static_cast<std::size_t>(n_elements);
  MaterialField out{std::vector<double>(n, m.lambda), std::vector<double>(n, m.mu), std::vector<double>(n, m.kappa),
                    std::vector<double>(n, alpha), std::vector<double>(n, storage)};
  out.validate();
  return out;
}

MaterialField MaterialField::from_continua(const ContinuumMap& cont, std::span<const ContinuumMaterial> per_continuum,
                                           double alpha, double storage) {
  if (static_cast<int>(per_continuum.size()) < cont.n_continua()) {
    throw Error(ErrorKind::InvalidArgument, "material values missing for some continua");
  }
  MaterialField out;
  const auto n = static_cast<std::size_t>(cont.size());
  out.lambda.resize(n);
  out.mu.resize(n);
  out.kappa.resize(n);
  out.alpha.assign(n, alpha);
  out.storage.assign(n, storage);
  for (std::size_t e = 0; e < n; ++e) {
    const auto& m = per_continuum[static_cast<std::size_t>(cont[static_cast<int>(e)])];
    out.lambda[e] = m.lambda;
    out.mu[e] = m.mu;
    out.kappa[e] = m.kappa;
  }
  out.validate();
  return out;
}

}  // namespace mcporo
