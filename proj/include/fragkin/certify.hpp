#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fragkin/coag_kernel.hpp"
#include "fragkin/frag_kernel.hpp"
#include "fragkin/grids.hpp"
#include "fragkin/moments.hpp"
#include "fragkin/rates.hpp"

namespace fragkin {

/// Symmetric 2x2 (or 1x1 in the [0] slot) diffusion matrix tabulated at a size node.
using DiffusionMatrix = std::array<double, 4>;

/// Condition number |a| / lambda_min(a) of a symmetric positive definite matrix;
/// +inf when it is not positive definite.
double condition_number(const DiffusionMatrix& a, int dim);

struct CertificateInputs {
  const RateModel* rates = nullptr;
  const FragKernel* frag = nullptr;
  const CoagKernel* coag = nullptr;
  const SizeGrid* sizes = nullptr;
  const SpaceGrid* space = nullptr;  // optional; enables sampling of spatial modulation
  const MomentReport* moments = nullptr;
  int dim = 1;
  double p = 2.0;
  double ell = 1.0;
  double delta = 0.5;
  double conservativity_tol = 1e-6;
  double sigma_inf_tol = 0.05;
  /// Optional matrix-valued diffusion, one entry per size node.
  std::vector<DiffusionMatrix> alpha_matrices;
};

struct Clause {
  enum class Status { Pass, Fail, NotApplicable };

  std::string id;
  std::string statement;
  Status status = Status::Pass;
  std::vector<std::pair<std::string, double>> values;
  std::string detail;

  bool failed() const noexcept { return status == Status::Fail; }
  std::optional<double> value(const std::string& name) const;
};

struct CertificateReport {
  std::vector<Clause> clauses;
  std::vector<std::string> warnings;

  bool pass() const noexcept;
  const Clause* find(const std::string& id) const;
  std::vector<std::string> failed_ids() const;
};

const char* to_string(Clause::Status s) noexcept;

/// Checks every rate/kernel hypothesis needed for local and global
/// well-posedness and echoes the intermediate numbers.  Clause ids:
///   diffusion-elliptic, fragmentation-envelope, kernel-nonnegative,
///   kernel-conservative, fragment-count-finite, mass-spread-vanishes,
///   moment-thresholds, smoothing-balance, coagulation-symmetric,
///   coagulation-dominated, integrability, power-envelope, rate-monotone,
///   global-theta-alpha, global-theta-beta.
CertificateReport check_hypotheses(const CertificateInputs& in);

}  // namespace fragkin
