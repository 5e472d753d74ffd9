#include "flowlab/flow.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "flowlab/errors.hpp"

namespace flowlab {

void FluidProps::validate() const {
    if (!(rho1 > 0 && rho2 > 0)) throw InvalidArgument("densities must be positive");
    if (!(mu1 > 0 && mu2 > 0)) throw InvalidArgument("viscosities must be positive");
    if (!(gamma >= 0)) throw InvalidArgument("surface tension must be non-negative");
}

MaterialFn uniform_material(double rho, double mu) {
    return [rho, mu](int, const Vec2&, const Eigen::Vector4d&) { return Material{rho, mu}; };
}

MaterialFn element_phase_material(const Mesh2D& mesh, const FluidProps& props) {
    if (static_cast<int>(mesh.element_phase.size()) != mesh.num_elements())
        throw InvalidArgument("mesh has no per-element phase assignment");
    auto phase = mesh.element_phase;
    return [phase, props](int e, const Vec2&, const Eigen::Vector4d&) {
        return Material{props.rho(phase[e]), props.mu(phase[e])};
    };
}

MaterialFn cell_fraction_material(const Eigen::VectorXd& f1, const FluidProps& props) {
    Eigen::VectorXd F = f1;
    return [F, props](int e, const Vec2&, const Eigen::Vector4d&) {
        const double c = std::clamp(F(e), 0.0, 1.0);
        return Material{c * props.rho1 + (1 - c) * props.rho2, c * props.mu1 + (1 - c) * props.mu2};
    };
}

int PressureDofs::element_dof(const Mesh2D& mesh, int element, int node) const {
    if (mesh.element_phase.empty()) return phase1[node];
    return mesh.element_phase[element] == 2 ? phase2[node] : phase1[node];
}

PressureDofs make_pressure_dofs(const Mesh2D& mesh, bool doubled_pressure) {
    PressureDofs d;
    const int n = mesh.num_nodes();
    d.phase1.resize(n);
    d.phase2.resize(n);
    for (int i = 0; i < n; ++i) d.phase1[i] = d.phase2[i] = i;
    d.count = n;
    if (doubled_pressure) {
        if (static_cast<int>(mesh.element_phase.size()) != mesh.num_elements())
            throw InvalidArgument("doubled pressure needs per-element phases");
        for (int i = 0; i < n; ++i)
            if (mesh.has_tag(i, tag::interface_node)) d.phase2[i] = d.count++;
    }
    return d;
}

Eigen::VectorXd FlowState::nodal_pressure() const {
    Eigen::VectorXd out(pdofs.phase1.size());
    for (size_t i = 0; i < pdofs.phase1.size(); ++i) out(i) = p(pdofs.phase1[i]);
    return out;
}

double FlowState::max_speed() const {
    double m = 0;
    for (const auto& v : u) m = std::max(m, v.norm());
    return m;
}

FlowState zero_state(const Mesh2D& mesh, bool doubled_pressure) {
    FlowState s;
    s.u.assign(mesh.nodes.size(), Vec2::Zero());
    s.pdofs = make_pressure_dofs(mesh, doubled_pressure);
    s.p = Eigen::VectorXd::Zero(s.pdofs.count);
    return s;
}

void FlowBoundary::fix_velocity(int node, const Vec2& value) {
    fixed.push_back({node, 0, value.x()});
    fixed.push_back({node, 1, value.y()});
}

void add_noslip(FlowBoundary& bc, const Mesh2D& mesh, std::initializer_list<int> tags, const Vec2& value) {
    std::set<int> nodes;
    for (const auto& e : mesh.boundary_edges)
        if (std::find(tags.begin(), tags.end(), e.tag) != tags.end()) {
            nodes.insert(e.a);
            nodes.insert(e.b);
        }
    for (int n : nodes) bc.fix_velocity(n, value);
}

void add_axis_slip(FlowBoundary& bc, const Mesh2D& mesh, std::initializer_list<int> tags) {
    std::map<int, int> comp;
    for (const auto& e : mesh.boundary_edges) {
        if (std::find(tags.begin(), tags.end(), e.tag) == tags.end()) continue;
        const Vec2 d = mesh.nodes[e.b] - mesh.nodes[e.a];
        int c;
        if (std::abs(d.y()) < 1e-12 * d.norm())
            c = 1;
        else if (std::abs(d.x()) < 1e-12 * d.norm())
            c = 0;
        else
            throw InvalidArgument("axis slip requested on a non axis-aligned edge");
        comp[e.a] = c;
        comp[e.b] = c;
    }
    for (auto [n, c] : comp) bc.fixed.push_back({n, c, 0.0});
}

namespace {

struct AssemblyInput {
    const Mesh2D& mesh;
    const MaterialFn& material;
    const FlowForces& forces;
    const FlowBoundary& bc;
    const FlowOptions& opt;
    double dt;                           // infinity for steady problems
    const std::vector<Vec2>* u_old;      // may be null
    const std::vector<Vec2>* advecting;  // may be null
};

// Outward normal of a boundary edge, oriented away from its owning element.
std::pair<int, Vec2> edge_owner(const Mesh2D& mesh, const std::vector<std::vector<int>>& adj, int a, int b) {
    for (int e : adj[a]) {
        const auto& el = mesh.elements[e];
        const int npe = mesh.nodes_per_element();
        if (std::find(el.begin(), el.begin() + npe, b) == el.begin() + npe) continue;
        const Vec2 t = mesh.nodes[b] - mesh.nodes[a];
        Vec2 n(t.y(), -t.x());
        n.normalize();
        if (n.dot(0.5 * (mesh.nodes[a] + mesh.nodes[b]) - element_centroid(mesh, e)) < 0) n = -n;
        return {e, n};
    }
    throw InvalidArgument("boundary edge does not belong to any element");
}

LinearSystem assemble(const AssemblyInput& in) {
    const Mesh2D& mesh = in.mesh;
    const int N = mesh.num_nodes();
    const int npe = mesh.nodes_per_element();
    LinearSystem sys;
    sys.num_nodes = N;
    sys.pdofs = make_pressure_dofs(mesh, in.opt.doubled_pressure);
    const int ndof = 2 * N + sys.pdofs.count;
    sys.b = Eigen::VectorXd::Zero(ndof);
    sys.rotation.assign(N, Mat2::Identity());

    const double inv_dt = std::isfinite(in.dt) ? 1.0 / in.dt : 0.0;
    const auto rule = element_rule(mesh, in.opt.quad_degree);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.num_elements()) * 9 * npe * npe);
    if (in.forces.volume && static_cast<int>(in.forces.volume->size()) != N)
        throw InvalidArgument("volume force length mismatch");

    Eigen::MatrixXd Ke(3 * npe, 3 * npe);
    Eigen::VectorXd Fe(3 * npe);
    std::array<int, 12> gdof{};
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.elements[e];
        for (int k = 0; k < npe; ++k) {
            gdof[2 * k] = 2 * el[k];
            gdof[2 * k + 1] = 2 * el[k] + 1;
            gdof[2 * npe + k] = 2 * N + sys.pdofs.element_dof(mesh, e, el[k]);
        }
        Ke.setZero();
        Fe.setZero();
        const double h = element_size(mesh, e);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto s = shape_eval(mesh, e, rule.points[q]);
            const double w = rule.weights[q] * s.detJ;
            const Material m = in.material(e, s.x, s.N);
            Vec2 a = Vec2::Zero(), uo = Vec2::Zero(), fv = Vec2::Zero();
            for (int k = 0; k < npe; ++k) {
                if (in.advecting) a += s.N(k) * (*in.advecting)[el[k]];
                if (in.u_old) uo += s.N(k) * (*in.u_old)[el[k]];
                if (in.forces.volume) fv += s.N(k) * (*in.forces.volume)[el[k]];
            }
            const double nu = m.mu / m.rho;
            const double tau_t =
                in.opt.stab_scale /
                std::sqrt(4 * inv_dt * inv_dt + 4 * a.squaredNorm() / (h * h) + 9 * 16 * nu * nu / (h * h * h * h));
            const double tau_m = tau_t / m.rho;
            const Vec2 load = m.rho * in.forces.body + fv + m.rho * inv_dt * uo;
            for (int i = 0; i < npe; ++i) {
                const Vec2 Gi = s.dN.row(i).transpose();
                const double Ni = s.N(i);
                const double supg_i = in.opt.supg ? tau_t * a.dot(Gi) : 0.0;
                Fe.segment<2>(2 * i) += w * (Ni + supg_i) * load;
                if (in.opt.stabilization) Fe(2 * npe + i) -= w * tau_m * Gi.dot(load);
                for (int j = 0; j < npe; ++j) {
                    const Vec2 Gj = s.dN.row(j).transpose();
                    const double Nj = s.N(j);
                    const double Lj = m.rho * inv_dt * Nj + m.rho * a.dot(Gj);
                    Mat2 blk = ((Ni + supg_i) * Lj + m.mu * Gi.dot(Gj)) * Mat2::Identity() + m.mu * Gj * Gi.transpose();
                    Ke.block<2, 2>(2 * i, 2 * j) += w * blk;
                    // pressure gradient in momentum, divergence in continuity
                    Ke.block<2, 1>(2 * i, 2 * npe + j) += w * (-Gi * Nj + supg_i * Gj);
                    Ke.block<1, 2>(2 * npe + i, 2 * j) += w * (-Ni * Gj.transpose());
                    if (in.opt.stabilization) {
                        Ke.block<1, 2>(2 * npe + i, 2 * j) -= w * tau_m * Lj * Gi.transpose();
                        Ke(2 * npe + i, 2 * npe + j) -= w * tau_m * Gi.dot(Gj);
                    }
                }
            }
        }
        for (int r = 0; r < 3 * npe; ++r) {
            sys.b(gdof[r]) += Fe(r);
            for (int c = 0; c < 3 * npe; ++c)
                if (Ke(r, c) != 0.0) trip.emplace_back(gdof[r], gdof[c], Ke(r, c));
        }
    }

    if (in.opt.wall_pressure_correction && !in.bc.slip_edges.empty()) {
        const auto adj = node_elements(mesh);
        const auto er = edge_rule(3);
        for (const auto& ed : in.bc.slip_edges) {
            const auto [owner, n] = edge_owner(mesh, adj, ed[0], ed[1]);
            const double len = (mesh.nodes[ed[1]] - mesh.nodes[ed[0]]).norm();
            const int pd[2] = {sys.pdofs.element_dof(mesh, owner, ed[0]), sys.pdofs.element_dof(mesh, owner, ed[1])};
            for (size_t q = 0; q < er.points.size(); ++q) {
                const double xi = er.points[q].x();
                const double Nq[2] = {1 - xi, xi};
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        for (int c = 0; c < 2; ++c)
                            trip.emplace_back(2 * ed[i] + c, 2 * N + pd[j], er.weights[q] * len * Nq[i] * Nq[j] * n(c));
            }
        }
    }
    if (in.forces.nodal) {
        if (static_cast<int>(in.forces.nodal->size()) != N) throw InvalidArgument("nodal load length mismatch");
        for (int i = 0; i < N; ++i) sys.b.segment<2>(2 * i) += (*in.forces.nodal)[i];
    }
    sys.A.resize(ndof, ndof);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    return sys;
}

}  // namespace

void constrain_rows(LinearSystem& sys, const std::map<int, double>& rows) {
    if (rows.empty()) return;
    auto& A = sys.A;
    for (auto [r, g] : rows) {
        if (g == 0.0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, r); it; ++it) sys.b(it.row()) -= it.value() * g;
    }
    std::vector<char> mark(A.rows(), 0);
    for (auto [r, g] : rows) mark[r] = 1;
    bool diag_missing = false;
    std::vector<char> has_diag(A.rows(), 0);
    for (int c = 0; c < A.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it) {
            if (mark[it.row()] || mark[c]) it.valueRef() = (it.row() == c) ? 1.0 : 0.0;
            if (it.row() == c) has_diag[c] = 1;
        }
    for (auto [r, g] : rows) {
        if (!has_diag[r]) diag_missing = true;
        sys.b(r) = g;
    }
    if (diag_missing) {
        for (auto [r, g] : rows)
            if (!has_diag[r]) A.coeffRef(r, r) = 1.0;
        A.makeCompressed();
    }
}


LinearSystem assemble_stokes(const Mesh2D& mesh, const MaterialFn& material, const FlowForces& forces,
                             const FlowBoundary& bc, const FlowOptions& options) {
    AssemblyInput in{mesh, material, forces, bc, options, std::numeric_limits<double>::infinity(), nullptr, nullptr};
    return assemble(in);
}

void apply_rotated_slip(LinearSystem& sys, const std::vector<int>& wall_nodes, const std::vector<Mat2>& frames) {
    if (wall_nodes.size() != frames.size()) throw InvalidArgument("one frame per wall node required");
    if (wall_nodes.empty()) return;
    const int n = sys.size();
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<char> rotated(sys.num_nodes, 0);
    for (size_t k = 0; k < wall_nodes.size(); ++k) {
        const Mat2& O = frames[k];
        if ((O.transpose() * O - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-10)
            throw InvalidArgument("non-orthogonal slip frame at node " + std::to_string(wall_nodes[k]));
        const int node = wall_nodes[k];
        if (rotated[node]) throw InvalidArgument("node " + std::to_string(node) + " has two slip frames");
        rotated[node] = 1;
        sys.rotation[node] = O;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) trip.emplace_back(2 * node + i, 2 * node + j, O(i, j));
    }
    for (int r = 0; r < n; ++r)
        if (r >= 2 * sys.num_nodes || !rotated[r / 2]) trip.emplace_back(r, r, 1.0);
    Eigen::SparseMatrix<double> T(n, n);
    T.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseMatrix<double> At = T.transpose() * sys.A * T;
    sys.A = At;
    sys.A.makeCompressed();
    sys.b = T.transpose() * sys.b;
    std::map<int, double> rows;
    for (int node : wall_nodes) rows[2 * node + 1] = 0.0;  // normal is the second frame column
    constrain_rows(sys, rows);
}

void apply_constraints(LinearSystem& sys, const FlowBoundary& bc, const FlowOptions& options) {
    std::map<int, double> rows;
    for (const auto& d : bc.fixed) {
        if (d.node < 0 || d.node >= sys.num_nodes || d.component < 0 || d.component > 1)
            throw InvalidArgument("Dirichlet condition on invalid node/component");
        if (!sys.rotation[d.node].isIdentity(0.0))
            throw InvalidArgument("inconsistent boundary tags: node " + std::to_string(d.node) + " is both slip and Dirichlet");
        const int r = sys.velocity_dof(d.node, d.component);
        auto it = rows.find(r);
        if (it != rows.end() && std::abs(it->second - d.value) > 1e-14)
            throw InvalidArgument("inconsistent boundary tags: conflicting values at node " + std::to_string(d.node));
        rows[r] = d.value;
    }
    for (const auto& [pd, v] : bc.pressure_fixed) {
        if (pd < 0 || pd >= sys.pdofs.count) throw InvalidArgument("pressure condition on invalid dof");
        rows[sys.pressure_row(pd)] = v;
        sys.continuity_rows_constrained.push_back(pd);
    }
    if (!bc.traction_free && bc.pressure_fixed.empty()) {
        const int node = options.pin_node >= 0 ? options.pin_node : 0;
        const int pd = sys.pdofs.phase1[node];
        rows[sys.pressure_row(pd)] = 0.0;
        sys.continuity_rows_constrained.push_back(pd);
        sys.warnings.push_back("pressure null space: pinned pressure at node " + std::to_string(node));
    }
    constrain_rows(sys, rows);
}

struct SparseDirectSolver::Impl {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool factored = false;
    std::vector<int> outer, inner;
    bool analyzed = false;
};

SparseDirectSolver::SparseDirectSolver(int reuse_iterations)
    : impl_(std::make_unique<Impl>()), reuse_iterations_(reuse_iterations) {}
SparseDirectSolver::~SparseDirectSolver() = default;

Eigen::VectorXd SparseDirectSolver::solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                                          double* residual) {
    Eigen::SparseMatrix<double> M = A;
    M.makeCompressed();
    std::vector<int> outer(M.outerIndexPtr(), M.outerIndexPtr() + M.outerSize() + 1);
    std::vector<int> inner(M.innerIndexPtr(), M.innerIndexPtr() + M.nonZeros());
    const bool same_pattern = impl_->analyzed && outer == impl_->outer && inner == impl_->inner;
    const double bn = std::max(b.norm(), 1e-300);
    // stationary iteration preconditioned by the previous factorization; refactor when it stalls
    if (same_pattern && impl_->factored && reuse_iterations_ > 0) {
        Eigen::VectorXd x = impl_->lu.solve(b);
        double prev = INFINITY;
        for (int it = 0; it < reuse_iterations_ && x.allFinite(); ++it) {
            const Eigen::VectorXd r = b - M * x;
            const double rel = r.norm() / bn;
            if (rel < reuse_tolerance) {
                if (residual) *residual = rel;
                last_refactored_ = false;
                return x;
            }
            if (rel > 0.5 * prev) break;
            prev = rel;
            x += impl_->lu.solve(r);
        }
    }
    if (!same_pattern) {
        impl_->lu.analyzePattern(M);
        impl_->outer = std::move(outer);
        impl_->inner = std::move(inner);
        impl_->analyzed = true;
    }
    impl_->lu.factorize(M);
    impl_->factored = impl_->lu.info() == Eigen::Success;
    if (!impl_->factored) throw SolverFailure(INFINITY, "sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
    last_refactored_ = true;
    Eigen::VectorXd x = impl_->lu.solve(b);
    Eigen::VectorXd r = b - M * x;
    x += impl_->lu.solve(r);  // one step of iterative refinement
    r = b - M * x;
    const double rel = r.norm() / bn;
    if (residual) *residual = rel;
    if (!x.allFinite() || rel > 1e-8) throw SolverFailure(rel, "linear solve did not reach tolerance");
    return x;
}

namespace {

double galerkin_divergence(const Mesh2D& mesh, const PressureDofs& pd, const std::vector<Vec2>& u) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(pd.count);
    const auto rule = element_rule(mesh, 2);
    const int npe = mesh.nodes_per_element();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.elements[e];
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto s = shape_eval(mesh, e, rule.points[q]);
            double div = 0;
            for (int k = 0; k < npe; ++k) div += s.dN.row(k).dot(u[el[k]]);
            for (int k = 0; k < npe; ++k) r(pd.element_dof(mesh, e, el[k])) += rule.weights[q] * s.detJ * s.N(k) * div;
        }
    }
    return r.cwiseAbs().maxCoeff();
}

FlowState solve_assembled(LinearSystem& sys, const Mesh2D& mesh, const FlowBoundary& bc, const FlowOptions& opt,
                          SparseDirectSolver& solver, SolveInfo* info) {
    // unconstrained copy for the continuity residual
    const Eigen::SparseMatrix<double> A0 = sys.A;
    const Eigen::VectorXd b0 = sys.b;
    std::vector<int> wall;
    std::vector<Mat2> frames;
    for (const auto& s : bc.slip) {
        const Vec2 n = s.normal.normalized();
        Mat2 O;
        O.col(0) = Vec2(n.y(), -n.x());
        O.col(1) = n;
        wall.push_back(s.node);
        frames.push_back(O);
    }
    apply_rotated_slip(sys, wall, frames);
    apply_constraints(sys, bc, opt);
    double res = 0;
    const Eigen::VectorXd x = solver.solve(sys.A, sys.b, &res);
    FlowState out;
    out.pdofs = sys.pdofs;
    out.u.resize(sys.num_nodes);
    Eigen::VectorXd xc = x;
    for (int i = 0; i < sys.num_nodes; ++i) {
        out.u[i] = sys.rotation[i] * x.segment<2>(2 * i);
        xc.segment<2>(2 * i) = out.u[i];
    }
    out.p = x.tail(sys.pdofs.count);
    if (info) {
        info->residual = res;
        const Eigen::VectorXd r = A0 * xc - b0;
        std::vector<char> skip(sys.pdofs.count, 0);
        for (int pd : sys.continuity_rows_constrained) skip[pd] = 1;
        double m = 0;
        for (int k = 0; k < sys.pdofs.count; ++k)
            if (!skip[k]) m = std::max(m, std::abs(r(2 * sys.num_nodes + k)));
        info->continuity_residual = m;
        info->galerkin_divergence = galerkin_divergence(mesh, sys.pdofs, out.u);
    }
    return out;
}

}  // namespace

FlowState solve_stokes(const Mesh2D& mesh, const MaterialFn& material, const FlowForces& forces, const FlowBoundary& bc,
                       const FlowOptions& options, SolveInfo* info) {
    LinearSystem sys = assemble_stokes(mesh, material, forces, bc, options);
    SparseDirectSolver solver;
    return solve_assembled(sys, mesh, bc, options, solver, info);
}

double NavierStokesSolver::max_cfl(const FlowState& state, double dt) const {
    double m = 0;
    const int npe = mesh_->nodes_per_element();
    for (int e = 0; e < mesh_->num_elements(); ++e) {
        double umax = 0;
        for (int k = 0; k < npe; ++k) umax = std::max(umax, state.u[mesh_->elements[e][k]].norm());
        m = std::max(m, umax * dt / element_size(*mesh_, e));
    }
    return m;
}

FlowState NavierStokesSolver::step(const FlowState& state, const MaterialFn& material, const FlowForces& forces,
                                   const FlowBoundary& bc, double dt, const std::vector<Vec2>* mesh_velocity,
                                   SolveInfo* info) {
    if (!(dt > 0)) throw InvalidArgument("time step must be positive");
    const Mesh2D& mesh = *mesh_;
    if (static_cast<int>(state.u.size()) != mesh.num_nodes()) throw InvalidArgument("state does not match mesh");
    std::vector<Vec2> adv = state.u;
    if (mesh_velocity)
        for (size_t i = 0; i < adv.size(); ++i) adv[i] -= (*mesh_velocity)[i];
    AssemblyInput in{mesh, material, forces, bc, options_, dt, &state.u, &adv};
    LinearSystem sys = assemble(in);
    FlowState out = solve_assembled(sys, mesh, bc, options_, solver_, info);
    out.time = state.time + dt;
    return out;
}

FlowState navier_stokes_step(const FlowState& state, const Mesh2D& mesh, const MaterialFn& material,
                             const FlowForces& forces, const FlowBoundary& bc, double dt, const FlowOptions& options,
                             SolveInfo* info) {
    NavierStokesSolver s(mesh, options);
    return s.step(state, material, forces, bc, dt, nullptr, info);
}

Mat2 velocity_gradient(const Mesh2D& mesh, const std::vector<Vec2>& u, int e) {
    const Vec2 ref = mesh.kind == ElementKind::Triangle ? Vec2(1.0 / 3, 1.0 / 3) : Vec2(0, 0);
    const auto s = shape_eval(mesh, e, ref);
    Mat2 G = Mat2::Zero();  // G(i,j) = du_i/dx_j
    for (int k = 0; k < mesh.nodes_per_element(); ++k) G += u[mesh.elements[e][k]] * s.dN.row(k);
    return G;
}

JumpReport measure_interface_jump(const Mesh2D& mesh, const FlowState& state, const InterfacePolyline& interface,
                                  const FluidProps& props) {
    if (interface.nodes.empty()) throw InvalidArgument("empty interface");
    InterfacePolyline poly = interface;
    if (poly.normals.size() != poly.nodes.size()) compute_frames(mesh, poly);
    const auto adj = node_elements(mesh);
    JumpReport rep;
    for (size_t k = 0; k < poly.nodes.size(); ++k) {
        const int n = poly.nodes[k];
        if (n < 0 || n >= mesh.num_nodes()) throw InvalidArgument("interface node outside mesh");
        rep.dp.push_back(state.p(state.pdofs.phase1[n]) - state.p(state.pdofs.phase2[n]));
        const Vec2 nn = poly.normals[k];
        double side[2] = {0, 0};
        int cnt[2] = {0, 0};
        for (int e : adj[n]) {
            const int ph = mesh.element_phase.empty() ? 1 : mesh.element_phase[e];
            const Mat2 G = velocity_gradient(mesh, state.u, e);
            side[ph - 1] += nn.dot(G * nn);
            cnt[ph - 1]++;
        }
        rep.viscous_inner.push_back(cnt[0] ? 2 * props.mu1 * side[0] / cnt[0] : 0.0);
        rep.viscous_outer.push_back(cnt[1] ? 2 * props.mu2 * side[1] / cnt[1] : 0.0);
    }
    double s = 0;
    for (double d : rep.dp) s += d;
    rep.mean_dp = s / rep.dp.size();
    rep.max_velocity_mismatch = 0.0;  // velocities are shared at conforming interface nodes
    return rep;
}

JumpReport measure_interface_jump(const Mesh2D& mesh, const FlowState& state, const Polyline& interface,
                                  const std::vector<Vec2>& normals, double offset) {
    if (interface.points.empty() || normals.size() != interface.points.size())
        throw InvalidArgument("interface samples and normals must match");
    const Eigen::VectorXd p = state.nodal_pressure();
    Eigen::VectorXd ux(mesh.num_nodes()), uy(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        ux(i) = state.u[i].x();
        uy(i) = state.u[i].y();
    }
    JumpReport rep;
    double s = 0;
    for (size_t k = 0; k < normals.size(); ++k) {
        const Vec2 x = interface.points[k], n = normals[k];
        const auto li = locate(mesh, x - offset * n), lo = locate(mesh, x + offset * n);
        if (!li || !lo) throw InvalidArgument("interface sample outside mesh");
        rep.dp.push_back(interpolate(mesh, p, *li) - interpolate(mesh, p, *lo));
        s += rep.dp.back();
        const Vec2 ui(interpolate(mesh, ux, *li), interpolate(mesh, uy, *li));
        const Vec2 uo(interpolate(mesh, ux, *lo), interpolate(mesh, uy, *lo));
        rep.max_velocity_mismatch = std::max(rep.max_velocity_mismatch, (ui - uo).norm());
        rep.viscous_inner.push_back(n.dot(velocity_gradient(mesh, state.u, li->element) * n));
        rep.viscous_outer.push_back(n.dot(velocity_gradient(mesh, state.u, lo->element) * n));
    }
    rep.mean_dp = s / rep.dp.size();
    return rep;
}

}  // namespace flowlab
