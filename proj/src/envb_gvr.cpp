#include "skillforge/envb/gvr.hpp"

namespace skillforge::envb {

std::string to_string(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::files: return "files";
    case ArtifactKind::setup: return "setup";
    case ArtifactKind::verifier: return "verifier";
  }
  return "files";
}

std::string to_string(GvrStatus status) {
  return status == GvrStatus::accepted ? "accepted" : "discarded";
}

}  // namespace skillforge::envb
