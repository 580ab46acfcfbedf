#include "mcporo/error.hpp"

namespace mcporo {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonConforming: return "NonConforming";
    case ErrorKind::ContinuumStarvation: return "ContinuumStarvation";
    case ErrorKind::UnknownBoundaryTag: return "UnknownBoundaryTag";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::SaddleSingular: return "SaddleSingular";
    case ErrorKind::MissingTensor: return "MissingTensor";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace mcporo
