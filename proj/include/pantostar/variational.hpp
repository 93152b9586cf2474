#pragma once

// Galerkin minimization of the damping energy over hat functions. The trial
// set is the lifting plus the homogeneous space W (vertex value shared,
// zero at the edge-1 origin, zero from the rest onset l_j onward); the
// bilinear form B(y, w) = sum_j alpha_j int ell_j y ell_j w is assembled
// exactly by Gauss-2 over the kink splitting, so the discrete system is the
// exact minimizer over the affine hat-function set.

#include <Eigen/Dense>
#include <memory>

#include "pantostar/grid_function.hpp"

namespace pantostar {

/// Degree-of-freedom map for the homogeneous admissible space on a mesh.
class SpaceW {
public:
    SpaceW(const ValidatedProblem& problem, std::shared_ptr<const GraphMesh> mesh);

    /// Global index of (edge, node), or -1 when the node is constrained to zero.
    int dof(int edge, int node) const {
        return dofs_[static_cast<size_t>(edge - 1)][static_cast<size_t>(node)];
    }
    int size() const noexcept { return size_; }
    int vertex_dof() const noexcept { return vertex_dof_; }
    const GraphMesh& mesh() const noexcept { return *mesh_; }
    std::shared_ptr<const GraphMesh> mesh_ptr() const noexcept { return mesh_; }

    /// Member of W with the given coefficients (zero at constrained nodes).
    GraphGridFunction function_from(const Eigen::VectorXd& coeffs) const;
    /// lift + member of W: the affine admissible set.
    GraphGridFunction function_from(const Eigen::VectorXd& coeffs,
                                    const GraphGridFunction& lift) const;

private:
    std::shared_ptr<const GraphMesh> mesh_;
    std::vector<std::vector<int>> dofs_;
    int size_ = 0;
    int vertex_dof_ = -1;
};

/// Assembled energy form: A_ik = B(phi_i, phi_k), rhs_k = -B(Phi, phi_k).
struct EnergyForm {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
    std::shared_ptr<const SpaceW> space;
};

EnergyForm assemble(const ValidatedProblem& problem, std::shared_ptr<const GraphMesh> mesh);

struct DampSolution {
    GraphGridFunction y;
    double J = 0.0;
    double vertex_value = 0.0;
    double linear_residual = 0.0;  // ||A x - rhs||_2 of the factorized solve
    int n_dofs = 0;
};

/// Minimizes the energy over the admissible hat functions on the mesh.
/// Throws NotPositiveDefinite if the Cholesky factorization fails (it cannot
/// for valid data in exact arithmetic; a failure indicates an assembly bug
/// or degenerate input).
DampSolution solve_damping(const ValidatedProblem& problem, std::shared_ptr<const GraphMesh> mesh);

/// Exact quadrature of the energy functional sum_j alpha_j int (ell_j y)^2.
double energy(const ValidatedProblem& problem, const GraphGridFunction& y);

/// Exact quadrature of B(y, w); y and w may live on different meshes.
double bilinear_form(const ValidatedProblem& problem, const GraphGridFunction& y,
                     const GraphGridFunction& w);

/// Recovers the controls u_j = ell_j y as exact piecewise-linear segments on
/// the kink grid (one-sided values at kinks). The weighted control energy
/// equals the damping energy to roundoff.
ControlProfile extract_control(const ValidatedProblem& problem, const GraphGridFunction& y);

}  // namespace pantostar
