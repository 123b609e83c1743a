#include "hypersim/xkerr.hpp"

#include <stdexcept>

namespace hypersim::qnd {

namespace {

std::vector<Branch> parity_qnd(const PureState& state, const SubRef& x, const SubRef& y,
                               const std::string& key) {
  Matrix even = Matrix::Zero(4, 4), odd = Matrix::Zero(4, 4);
  even(0, 0) = even(3, 3) = 1;
  odd(1, 1) = odd(2, 2) = 1;
  const SubRef targets[] = {x, y};
  return measure_projective(state, targets, {{"shifted", even}, {"unshifted", odd}}, key);
}

}  // namespace

std::vector<Branch> xkerr_parity_pol(const PureState& state, const std::string& photon_x,
                                     const std::string& photon_y) {
  return parity_qnd(state, pol(photon_x), pol(photon_y),
                    "xkerr-pol[" + photon_x + photon_y + "]");
}

std::vector<Branch> xkerr_parity_spatial(const PureState& state, const std::string& photon_x,
                                         const std::string& photon_y) {
  int ix = state.layout.index_of(spat(photon_x));
  int iy = state.layout.index_of(spat(photon_y));
  if (state.layout.label(ix).dim != 2 || state.layout.label(iy).dim != 2) {
    throw std::invalid_argument("xkerr_parity_spatial: spatial registers must be two-port");
  }
  return parity_qnd(state, spat(photon_x), spat(photon_y),
                    "xkerr-spat[" + photon_x + photon_y + "]");
}

std::vector<Branch> xkerr_spatial_analyzer(const PureState& state,
                                           const std::string& photon_x,
                                           const std::string& photon_y) {
  int ix = state.layout.index_of(spat(photon_x));
  int iy = state.layout.index_of(spat(photon_y));
  if (state.layout.label(ix).dim != 2 || state.layout.label(iy).dim != 2) {
    throw std::invalid_argument("xkerr_spatial_analyzer: spatial registers must be two-port");
  }
  static const char* classes[] = {"theta1+theta3", "theta1+theta4", "theta2+theta3",
                                  "theta2+theta4"};
  std::vector<Projector> projs;
  for (int m = 0; m < 4; ++m) {  // m = joint mode index (x slow, y fast)
    Matrix p = Matrix::Zero(4, 4);
    p(m, m) = 1;
    int cls = (m == 0) ? 0 : (m == 1) ? 1 : (m == 2) ? 2 : 3;
    projs.push_back({classes[cls], p});
  }
  const SubRef targets[] = {spat(photon_x), spat(photon_y)};
  return measure_projective(state, targets, projs,
                            "xkerr-analyzer[" + photon_x + photon_y + "]");
}

std::string analyzer_modes(const std::string& phase_class) {
  if (phase_class == "theta1+theta3") return "11";
  if (phase_class == "theta2+theta4") return "22";
  if (phase_class == "theta1+theta4") return "12";
  if (phase_class == "theta2+theta3") return "21";
  throw std::invalid_argument("analyzer_modes: unknown phase class " + phase_class);
}

}  // namespace hypersim::qnd
