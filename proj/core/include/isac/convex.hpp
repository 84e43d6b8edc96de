// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_CONVEX_HPP
#define ISAC_CONVEX_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace isac {

/// Real lifting of a complex Hermitian matrix:
///   lift(M) = [[Re M, -Im M], [Im M, Re M]],
/// so that with x = [Re s; Im s] the real form x^T lift(M) x equals s^H M s.
/// Rejects inputs whose Hermitian residual exceeds 1e-10 * max(1, |M|).
Eigen::MatrixXd lift_hermitian(const Eigen::MatrixXcd& m);

/// x = [Re s; Im s] stacking and its inverse.
Eigen::VectorXd embed_complex(const Eigen::VectorXcd& s);
Eigen::VectorXcd extract_complex(const Eigen::VectorXd& x, int n);

/// Coefficient vector g with g^T [Re s; Im s] = Re(a^H s).
Eigen::VectorXd lift_real_inner(const Eigen::VectorXcd& a);

enum class SolveStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

const char* to_string(SolveStatus status);

struct KktResiduals {
    double primal_infeasibility = 0.0; // max over constraints of max(0, f_i(x))
    double dual_residual = 0.0;        // || c + sum_i lambda_i grad f_i ||_inf
    double complementarity = 0.0;      // max_i |lambda_i f_i(x)|
};

struct Solution {
    SolveStatus status = SolveStatus::NumericalFailure;
    Eigen::VectorXd point;
    double objective = 0.0;
    Eigen::VectorXd multipliers; // one per constraint, quadratics first
    double duality_gap = 0.0;    // surrogate gap at exit
    KktResiduals kkt;
    int iterations = 0;
    // Infeasible diagnostics: least achievable worst violation and the
    // constraint attaining it.
    double infeasibility = 0.0;
    int worst_constraint = -1;
    std::string worst_family;
};

/// Linear objective over convex quadratic and linear inequalities:
///   minimize c^T x
///   s.t.     x^T P_i x + 2 q_i^T x + r_i <= 0   (P_i symmetric PSD)
///            a_j^T x <= b_j
/// Quadratics are validated on insertion: eigenvalues in [-1e-9, 0) are
/// clipped to zero with a warning, anything lower is rejected. Programs are
/// immutable while a solve is running; distinct programs may be solved
/// concurrently.
class ConvexProgram {
  public:
    explicit ConvexProgram(int dimension);

    int dimension() const { return dim_; }
    void set_objective(const Eigen::VectorXd& c);
    const Eigen::VectorXd& objective() const { return c_; }

    /// Returns the unified constraint index (quadratics first, then linears
    /// in insertion order). `family` tags the constraint for diagnostics.
    int add_quadratic(const Eigen::MatrixXd& p, const Eigen::VectorXd& q, double r,
                      std::string family = "quad");
    int add_quadratic(const Eigen::SparseMatrix<double>& p, const Eigen::VectorXd& q, double r,
                      std::string family = "quad");
    int add_linear(const Eigen::VectorXd& a, double b, std::string family = "lin");

    int num_quadratic() const { return static_cast<int>(quads_.size()); }
    int num_linear() const { return static_cast<int>(lins_.size()); }
    int num_constraints() const { return num_quadratic() + num_linear(); }

    /// f_i(x) for the unified constraint index.
    double constraint_value(int index, const Eigen::VectorXd& x) const;
    Eigen::VectorXd constraint_gradient(int index, const Eigen::VectorXd& x) const;
    const std::string& family(int index) const;

    /// Coordinate-form text dump for external cross-validation.
    void dump(std::ostream& os) const;

    struct Quad {
        Eigen::SparseMatrix<double> p;
        Eigen::VectorXd q;
        double r = 0.0;
    };
    struct Lin {
        Eigen::VectorXd a;
        double b = 0.0;
    };
    const std::vector<Quad>& quadratics() const { return quads_; }
    const std::vector<Lin>& linears() const { return lins_; }

  private:
    int dim_;
    Eigen::VectorXd c_;
    std::vector<Quad> quads_;
    std::vector<Lin> lins_;
    std::vector<std::string> families_;
};

struct SolveOptions {
    double feas_tol = 1e-8;
    double gap_tol = 1e-8;
    int max_iters = 200;
    /// Optional starting point; phase I is skipped when it is strictly
    /// feasible, otherwise phase I starts from it.
    std::optional<Eigen::VectorXd> warm_start;
};

/// Primal-dual interior-point solve. Quadratics act through their PSD
/// factors, so each one is handled as the second-order-cone constraint
/// |L^T x|^2 <= -(r + 2 q^T x). Never returns a silently wrong answer: the
/// result is Optimal only if a post-solve KKT audit passes at the requested
/// tolerances, and infeasible problems come back with the least achievable
/// violation attached.
Solution solve(const ConvexProgram& program, const SolveOptions& options = {});

/// Residuals of a candidate point (and optionally multipliers) against the
/// program's KKT conditions. With no multipliers only the primal violation is
/// meaningful; dual residual then reports |c|_inf.
KktResiduals kkt_residuals(const ConvexProgram& program, const Eigen::VectorXd& point,
                           const Eigen::VectorXd& multipliers = Eigen::VectorXd());

}  // namespace isac

#endif
