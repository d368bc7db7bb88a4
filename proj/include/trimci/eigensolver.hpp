#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "trimci/determinant.hpp"
#include "trimci/error.hpp"
#include "trimci/integrals.hpp"

namespace trimci {

struct DavidsonOptions {
  double tol = 1e-8;        // residual norm target
  int max_iter = 200;
  int max_subspace = 24;
  std::size_t dense_cutoff = 512;  // direct dense solve at or below this size
};

struct BuildOptions {
  // Off-diagonal storage budget; past it the matrix is applied on the fly.
  std::size_t max_explicit_bytes = std::size_t{8} << 30;
};

struct EigenResult {
  double energy = 0.0;
  Eigen::VectorXd coefficients;
  int iterations = 0;
  double residual_norm = 0.0;
};

// Hamiltonian restricted to an explicit determinant set. Row structure is
// found by excitation enumeration against a hash set of the members, not by
// an all-pairs scan. Immutable after build; apply() is deterministic.
class ProjectedHamiltonian {
 public:
  std::size_t size() const { return dets_.size(); }
  const std::vector<Determinant>& dets() const { return dets_; }
  const Eigen::VectorXd& diagonal() const { return diag_; }
  bool matrix_free() const { return matrix_free_; }
  std::size_t offdiagonal_nonzeros() const { return vals_.size(); }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::MatrixXd dense() const;

 private:
  friend ProjectedHamiltonian build_projected(std::vector<Determinant>,
                                              const IntegralTable&, const BuildOptions&);
  std::vector<Determinant> dets_;
  Eigen::VectorXd diag_;
  bool matrix_free_ = false;
  std::vector<std::uint64_t> offsets_;  // size n+1 over off-diagonal entries
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  const IntegralTable* ints_ = nullptr;
  std::unordered_map<Determinant, std::uint32_t, DeterminantHash> index_;
};

ProjectedHamiltonian build_projected(std::vector<Determinant> dets,
                                     const IntegralTable& ints,
                                     const BuildOptions& opts = {});

/// Matrix-free symmetric operator; diag is used by the preconditioner.
struct SymmetricOperator {
  std::size_t n = 0;
  const Eigen::VectorXd* diag = nullptr;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply;
};

/// Thrown when the iteration limit is hit; carries the best pair found.
class DavidsonNonConvergence : public SolverError {
 public:
  DavidsonNonConvergence(const std::string& msg, EigenResult best)
      : SolverError(msg), best_(std::move(best)) {}
  const EigenResult& best() const { return best_; }

 private:
  EigenResult best_;
};

EigenResult davidson_lowest(const SymmetricOperator& op, const Eigen::VectorXd* guess,
                            const DavidsonOptions& opts = {});

// Lowest eigenpair of a projected Hamiltonian; dense direct solve below the
// cutoff, Davidson with diagonal preconditioning above it.
EigenResult davidson_lowest(const ProjectedHamiltonian& h, const Eigen::VectorXd* guess,
                            const DavidsonOptions& opts = {});

/// Rayleigh quotient over the projected Hamiltonian; coeffs must be unit norm.
double variational_energy(const std::vector<Determinant>& dets,
                          const Eigen::VectorXd& coeffs, const IntegralTable& ints);

}  // namespace trimci
