#include "gmeas/verdict.hpp"

namespace gmeas {

const char* to_string(Decision d) {
  switch (d) {
    case Decision::yes: return "yes";
    case Decision::no: return "no";
    case Decision::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::vector<HermitianOperator> Perturbation::plus() const {
  std::vector<HermitianOperator> out;
  out.reserve(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) out.push_back(center[i] + epsilon * direction[i]);
  return out;
}

std::vector<HermitianOperator> Perturbation::minus() const {
  std::vector<HermitianOperator> out;
  out.reserve(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) out.push_back(center[i] - epsilon * direction[i]);
  return out;
}

}  // namespace gmeas
