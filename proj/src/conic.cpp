#include "grrm/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace grrm::conic {

std::size_t ConeDims::total() const {
    return nonneg + std::accumulate(soc.begin(), soc.end(), std::size_t{0});
}

void Program::validate() const {
    const auto n = c.size();
    if (A.cols() != n || G.cols() != n) throw std::invalid_argument("conic: A/G column count != variables");
    if (A.rows() != b.size()) throw std::invalid_argument("conic: A rows != b length");
    if (G.rows() != h.size()) throw std::invalid_argument("conic: G rows != h length");
    if (static_cast<std::size_t>(G.rows()) != cones.total()) throw std::invalid_argument("conic: G rows != cone size");
    for (std::size_t q : cones.soc)
        if (q < 1) throw std::invalid_argument("conic: empty second-order cone");
    if (!c.allFinite() || !b.allFinite() || !h.allFinite()) throw std::invalid_argument("conic: non-finite data");
}

const char* status_name(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::PrimalInfeasible: return "infeasible";
        case Status::DualInfeasible: return "unbounded";
        case Status::IterationLimit: return "tolerance-not-met";
        case Status::NumericalError: return "numerical-error";
    }
    return "?";
}

namespace detail {

SocScaling SocScaling::compute(const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
    const Eigen::Index q = s.size();
    const double sres = s(0) * s(0) - s.tail(q - 1).squaredNorm();
    const double zres = z(0) * z(0) - z.tail(q - 1).squaredNorm();
    if (!(sres > 0.0) || !(zres > 0.0)) throw std::domain_error("soc scaling: point not interior");
    const double snorm = std::sqrt(sres);
    const double znorm = std::sqrt(zres);
    const Eigen::VectorXd sb = s / snorm;
    const Eigen::VectorXd zb = z / znorm;
    const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    SocScaling w;
    w.eta = std::sqrt(snorm / znorm);
    w.a = 0.5 * (sb(0) + zb(0)) / gamma;
    w.q = 0.5 * (sb.tail(q - 1) - zb.tail(q - 1)) / gamma;
    return w;
}

// W = η [a  q'; q  I + q q'/(1+a)],  W⁻¹ = η⁻¹ [a  −q'; −q  I + q q'/(1+a)].
Eigen::VectorXd SocScaling::apply(const Eigen::VectorXd& v) const {
    const Eigen::Index q1 = q.size();
    Eigen::VectorXd out(q1 + 1);
    const double zeta = q.dot(v.tail(q1));
    out(0) = eta * (a * v(0) + zeta);
    out.tail(q1) = eta * (v.tail(q1) + (v(0) + zeta / (1.0 + a)) * q);
    return out;
}

Eigen::VectorXd SocScaling::apply_inverse(const Eigen::VectorXd& v) const {
    const Eigen::Index q1 = q.size();
    Eigen::VectorXd out(q1 + 1);
    const double zeta = q.dot(v.tail(q1));
    out(0) = (a * v(0) - zeta) / eta;
    out.tail(q1) = (v.tail(q1) + (-v(0) + zeta / (1.0 + a)) * q) / eta;
    return out;
}

Eigen::MatrixXd SocScaling::inverse_matrix() const {
    const Eigen::Index q1 = q.size();
    Eigen::MatrixXd m(q1 + 1, q1 + 1);
    m(0, 0) = a;
    m.block(0, 1, 1, q1) = -q.transpose();
    m.block(1, 0, q1, 1) = -q;
    m.block(1, 1, q1, q1) = Eigen::MatrixXd::Identity(q1, q1) + q * q.transpose() / (1.0 + a);
    return m / eta;
}

double max_step(const Eigen::VectorXd& u, const Eigen::VectorXd& d, const ConeDims& cones, double cap) {
    double alpha = cap;
    for (std::size_t i = 0; i < cones.nonneg; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        if (d(k) < 0.0) alpha = std::min(alpha, -u(k) / d(k));
    }
    Eigen::Index off = static_cast<Eigen::Index>(cones.nonneg);
    for (std::size_t qs : cones.soc) {
        const auto q = static_cast<Eigen::Index>(qs);
        const double u0 = u(off), d0 = d(off);
        const auto u1 = u.segment(off + 1, q - 1);
        const auto d1 = d.segment(off + 1, q - 1);
        // (u0 + α d0)² − ‖u1 + α d1‖² = A α² + 2B α + C, with C > 0.
        const double A = d0 * d0 - d1.squaredNorm();
        const double B = u0 * d0 - u1.dot(d1);
        const double C = u0 * u0 - u1.squaredNorm();
        double root = std::numeric_limits<double>::infinity();
        if (std::abs(A) <= 1e-300) {
            if (B < 0.0) root = -C / (2.0 * B);
        } else {
            const double disc = B * B - A * C;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                // Numerically stable pair of roots.
                const double t = -(B + std::copysign(sq, B));
                const double r1 = t / A;
                const double r2 = t != 0.0 ? C / t : std::numeric_limits<double>::infinity();
                for (double r : {r1, r2})
                    if (r > 0.0) root = std::min(root, r);
            }
        }
        if (d0 < 0.0) root = std::min(root, -u0 / d0);
        alpha = std::min(alpha, root);
        off += q;
    }
    return std::max(alpha, 0.0);
}

}  // namespace detail

namespace {

using detail::SocScaling;

struct Scaling {
    Eigen::VectorXd w;  // nonnegative block: W = diag(w)
    std::vector<SocScaling> soc;
};

class ConeOps {
public:
    explicit ConeOps(const ConeDims& dims) : dims_(dims) {}

    Eigen::VectorXd unit() const {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dims_.total()));
        e.head(static_cast<Eigen::Index>(dims_.nonneg)).setOnes();
        Eigen::Index off = static_cast<Eigen::Index>(dims_.nonneg);
        for (std::size_t q : dims_.soc) {
            e(off) = 1.0;
            off += static_cast<Eigen::Index>(q);
        }
        return e;
    }

    Eigen::VectorXd jordan(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
        Eigen::VectorXd out(u.size());
        const auto l = static_cast<Eigen::Index>(dims_.nonneg);
        out.head(l) = u.head(l).cwiseProduct(v.head(l));
        Eigen::Index off = l;
        for (std::size_t qs : dims_.soc) {
            const auto q = static_cast<Eigen::Index>(qs);
            out(off) = u.segment(off, q).dot(v.segment(off, q));
            out.segment(off + 1, q - 1) = u(off) * v.segment(off + 1, q - 1) + v(off) * u.segment(off + 1, q - 1);
            off += q;
        }
        return out;
    }

    /// x with lam ∘ x = w.
    Eigen::VectorXd jordan_div(const Eigen::VectorXd& lam, const Eigen::VectorXd& w) const {
        Eigen::VectorXd out(w.size());
        const auto l = static_cast<Eigen::Index>(dims_.nonneg);
        out.head(l) = w.head(l).cwiseQuotient(lam.head(l));
        Eigen::Index off = l;
        for (std::size_t qs : dims_.soc) {
            const auto q = static_cast<Eigen::Index>(qs);
            const double l0 = lam(off);
            const auto l1 = lam.segment(off + 1, q - 1);
            const double det = l0 * l0 - l1.squaredNorm();
            const double x0 = (l0 * w(off) - l1.dot(w.segment(off + 1, q - 1))) / det;
            out(off) = x0;
            out.segment(off + 1, q - 1) = (w.segment(off + 1, q - 1) - x0 * l1) / l0;
            off += q;
        }
        return out;
    }

    /// Smallest α ≥ 0 with r + α e ∈ int K, shifted as in CVXOPT's start.
    Eigen::VectorXd to_interior(Eigen::VectorXd r) const {
        double worst = -std::numeric_limits<double>::infinity();
        const auto l = static_cast<Eigen::Index>(dims_.nonneg);
        for (Eigen::Index i = 0; i < l; ++i) worst = std::max(worst, -r(i));
        Eigen::Index off = l;
        for (std::size_t qs : dims_.soc) {
            const auto q = static_cast<Eigen::Index>(qs);
            worst = std::max(worst, r.segment(off + 1, q - 1).norm() - r(off));
            off += q;
        }
        if (worst >= -1e-8) r += (1.0 + std::max(worst, 0.0)) * unit();
        return r;
    }

    double violation(const Eigen::VectorXd& r) const {
        double worst = 0.0;
        const auto l = static_cast<Eigen::Index>(dims_.nonneg);
        for (Eigen::Index i = 0; i < l; ++i) worst = std::max(worst, -r(i));
        Eigen::Index off = l;
        for (std::size_t qs : dims_.soc) {
            const auto q = static_cast<Eigen::Index>(qs);
            worst = std::max(worst, r.segment(off + 1, q - 1).norm() - r(off));
            off += q;
        }
        return worst;
    }

    Scaling scaling(const Eigen::VectorXd& s, const Eigen::VectorXd& z) const {
        Scaling sc;
        const auto l = static_cast<Eigen::Index>(dims_.nonneg);
        sc.w = (s.head(l).array() / z.head(l).array()).sqrt();
        Eigen::Index off = l;
        for (std::size_t qs : dims_.soc) {
            const auto q = static_cast<Eigen::Index>(qs);
            sc.soc.push_back(SocScaling::compute(s.segment(off, q), z.segment(off, q)));
            off += q;
        }
        return sc;
    }

    Scaling identity_scaling() const {
        Scaling sc;
        sc.w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dims_.nonneg));
        for (std::size_t qs : dims_.soc) {
            SocScaling w;
            w.q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(qs) - 1);
            sc.soc.push_back(std::move(w));
        }
        return sc;
    }

    Eigen::VectorXd scale(const Scaling& sc, const Eigen::VectorXd& v, bool inverse) const {
        Eigen::VectorXd out(v.size());
        const auto l = static_cast<Eigen::Index>(dims_.nonneg);
        if (inverse)
            out.head(l) = v.head(l).cwiseQuotient(sc.w);
        else
            out.head(l) = v.head(l).cwiseProduct(sc.w);
        Eigen::Index off = l;
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            const auto q = static_cast<Eigen::Index>(dims_.soc[k]);
            out.segment(off, q) = inverse ? sc.soc[k].apply_inverse(v.segment(off, q))
                                          : sc.soc[k].apply(v.segment(off, q));
            off += q;
        }
        return out;
    }

    const ConeDims& dims() const { return dims_; }

private:
    ConeDims dims_;
};

/// Reduced KKT solver for
///   [0  A'  G' ] [dx]   [r1]
///   [A  0   0  ] [dy] = [r2]
///   [G  0  −W² ] [dz]   [r3]
class KktSolver {
public:
    KktSolver(const Eigen::SparseMatrix<double, Eigen::RowMajor>& G, const Eigen::SparseMatrix<double>& A,
              const ConeOps& ops)
        : G_(G), Gt_(G.transpose()), A_(A), At_(A.transpose()), ops_(ops) {
        const auto l = static_cast<Eigen::Index>(ops.dims().nonneg);
        Glp_ = G.topRows(l);
        Glpt_ = Glp_.transpose();
    }

    bool factor(const Scaling& sc) {
        sc_ = &sc;
        const auto l = static_cast<Eigen::Index>(ops_.dims().nonneg);
        Eigen::VectorXd d2 = sc.w.array().square().inverse();
        Eigen::SparseMatrix<double> Hs = Glpt_ * d2.asDiagonal() * Glp_;
        // Without second-order blocks H keeps the sparsity of G'G.
        sparse_ = ops_.dims().soc.empty();
        if (sparse_) {
            double scale = 1.0;
            for (Eigen::Index j = 0; j < Hs.cols(); ++j) scale = std::max(scale, std::abs(Hs.coeff(j, j)));
            Eigen::SparseMatrix<double> I(Hs.rows(), Hs.cols());
            I.setIdentity();
            double reg = 1e-13 * scale;
            for (int attempt = 0;; ++attempt) {
                const Eigen::SparseMatrix<double> Hr = Hs + reg * I;
                if (attempt == 0) sllt_h_.analyzePattern(Hr);
                sllt_h_.factorize(Hr);
                if (sllt_h_.info() == Eigen::Success) break;
                reg *= 100.0;
                if (attempt == 7) return false;
            }
        } else {
            Eigen::MatrixXd H = Eigen::MatrixXd(Hs);
            Eigen::Index off = l;
            for (std::size_t k = 0; k < ops_.dims().soc.size(); ++k) {
                const auto q = static_cast<Eigen::Index>(ops_.dims().soc[k]);
                const Eigen::SparseMatrix<double, Eigen::RowMajor> Gb = G_.middleRows(off, q);
                const Eigen::MatrixXd M = sc.soc[k].inverse_matrix() * Gb;
                H.noalias() += M.transpose() * M;
                off += q;
            }
            const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
            double reg = 1e-13 * scale;
            for (int attempt = 0; attempt < 8; ++attempt) {
                Eigen::MatrixXd Hr = H;
                Hr.diagonal().array() += reg;
                llt_h_.compute(Hr);
                if (llt_h_.info() == Eigen::Success) break;
                reg *= 100.0;
                if (attempt == 7) return false;
            }
        }
        if (A_.rows() > 0) {
            const Eigen::MatrixXd Ad = Eigen::MatrixXd(At_);
            HinvAt_ = h_solve(Ad);
            Eigen::MatrixXd S = A_ * HinvAt_;
            const double sscale = std::max(1.0, S.diagonal().cwiseAbs().maxCoeff());
            double sreg = 1e-14 * sscale;
            for (int attempt = 0; attempt < 8; ++attempt) {
                Eigen::MatrixXd Sr = S;
                Sr.diagonal().array() += sreg;
                llt_s_.compute(Sr);
                if (llt_s_.info() == Eigen::Success) break;
                sreg *= 100.0;
                if (attempt == 7) return false;
            }
        }
        return true;
    }

    void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, const Eigen::VectorXd& r3, Eigen::VectorXd& dx,
               Eigen::VectorXd& dy, Eigen::VectorXd& dz) const {
        solve_once(r1, r2, r3, dx, dy, dz);
        for (int it = 0; it < 3; ++it) {
            const Eigen::VectorXd e1 = r1 - (At_ * dy + Gt_ * dz);
            const Eigen::VectorXd e2 = r2 - A_ * dx;
            const Eigen::VectorXd e3 = r3 - (G_ * dx - w2(dz));
            const double err = std::max({e1.lpNorm<Eigen::Infinity>(), e2.size() ? e2.lpNorm<Eigen::Infinity>() : 0.0,
                                         e3.lpNorm<Eigen::Infinity>()});
            if (err < 1e-14) break;
            Eigen::VectorXd cx, cy, cz;
            solve_once(e1, e2, e3, cx, cy, cz);
            dx += cx;
            dy += cy;
            dz += cz;
        }
    }

    Eigen::VectorXd w2(const Eigen::VectorXd& v) const { return ops_.scale(*sc_, ops_.scale(*sc_, v, false), false); }

private:
    void solve_once(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, const Eigen::VectorXd& r3,
                    Eigen::VectorXd& dx, Eigen::VectorXd& dy, Eigen::VectorXd& dz) const {
        const Eigen::VectorXd v = ops_.scale(*sc_, ops_.scale(*sc_, r3, true), true);  // W⁻² r3
        const Eigen::VectorXd f = r1 + Gt_ * v;
        const Eigen::VectorXd hf = h_solve(f);
        if (A_.rows() > 0) {
            dy = llt_s_.solve(A_ * hf - r2);
            dx = hf - HinvAt_ * dy;
        } else {
            dy.resize(0);
            dx = hf;
        }
        dz = ops_.scale(*sc_, ops_.scale(*sc_, G_ * dx - r3, true), true);
    }

    const Eigen::SparseMatrix<double, Eigen::RowMajor>& G_;
    Eigen::SparseMatrix<double> Gt_;
    Eigen::SparseMatrix<double> Glp_;
    Eigen::SparseMatrix<double> Glpt_;
    const Eigen::SparseMatrix<double>& A_;
    Eigen::SparseMatrix<double> At_;
    const ConeOps& ops_;
    const Scaling* sc_ = nullptr;
    template <class Rhs>
    Eigen::MatrixXd h_solve(const Rhs& b) const {
        if (sparse_) return sllt_h_.solve(b);
        return llt_h_.solve(b);
    }

    bool sparse_ = false;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> sllt_h_;
    Eigen::LLT<Eigen::MatrixXd> llt_h_;
    Eigen::LLT<Eigen::MatrixXd> llt_s_;
    Eigen::MatrixXd HinvAt_;
};

struct Presolved {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    std::vector<Eigen::Index> kept;
    bool consistent = true;
};

Presolved drop_redundant_rows(const Program& p) {
    Presolved out;
    const auto m = p.A.rows();
    if (m == 0) {
        out.A = p.A;
        out.b = p.b;
        return out;
    }
    const Eigen::MatrixXd Ad = Eigen::MatrixXd(p.A);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Ad.transpose());
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    for (Eigen::Index i = 0; i < rank; ++i) out.kept.push_back(qr.colsPermutation().indices()(i));
    std::sort(out.kept.begin(), out.kept.end());
    Eigen::MatrixXd Ak(rank, Ad.cols());
    out.b.resize(rank);
    for (Eigen::Index i = 0; i < rank; ++i) {
        Ak.row(i) = Ad.row(out.kept[static_cast<std::size_t>(i)]);
        out.b(i) = p.b(out.kept[static_cast<std::size_t>(i)]);
    }
    if (rank < m) {
        const Eigen::VectorXd x0 = Ak.transpose() * (Ak * Ak.transpose()).ldlt().solve(out.b);
        const double err = (Ad * x0 - p.b).lpNorm<Eigen::Infinity>();
        out.consistent = err <= 1e-9 * std::max(1.0, p.b.lpNorm<Eigen::Infinity>());
    }
    out.A = Ak.sparseView();
    return out;
}

}  // namespace

Certificate certify(const Program& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                    const Settings& settings) {
    const ConeOps ops(p.cones);
    Certificate c;
    c.primal_equality = p.A.rows() ? (p.A * x - p.b).lpNorm<Eigen::Infinity>() : 0.0;
    c.primal_cone = ops.violation(p.h - p.G * x);
    Eigen::VectorXd r = p.G.transpose() * z + p.c;
    if (p.A.rows()) r += p.A.transpose() * y;
    c.dual_residual = r.size() ? r.lpNorm<Eigen::Infinity>() : 0.0;
    c.dual_cone = ops.violation(z);
    c.gap = std::abs(p.c.dot(x) + (p.A.rows() ? p.b.dot(y) : 0.0) + p.h.dot(z));
    c.certified = c.primal_equality <= settings.certify_primal_tol && c.primal_cone <= settings.certify_primal_tol &&
                  c.dual_residual <= settings.certify_dual_tol && c.dual_cone <= settings.certify_dual_tol &&
                  c.gap <= settings.certify_gap_tol;
    return c;
}

Result solve(const Program& program, const Settings& settings) {
    program.validate();
    Result result;
    const Presolved pre = drop_redundant_rows(program);
    if (!pre.consistent) {
        result.status = Status::PrimalInfeasible;
        return result;
    }

    const Eigen::SparseMatrix<double>& A = pre.A;
    const Eigen::VectorXd& b = pre.b;
    const Eigen::SparseMatrix<double, Eigen::RowMajor> G = program.G;
    const Eigen::VectorXd& c = program.c;
    const Eigen::VectorXd& h = program.h;
    const ConeOps ops(program.cones);
    const auto n = c.size();
    const auto m = h.size();
    const auto p = b.size();
    const double nu = static_cast<double>(program.cones.degree());

    KktSolver kkt(G, A, ops);
    Scaling sc = ops.identity_scaling();
    if (!kkt.factor(sc)) return result;

    Eigen::VectorXd x, y, z, s;
    {
        Eigen::VectorXd dx, dy, dz;
        kkt.solve(Eigen::VectorXd::Zero(n), b, h, dx, dy, dz);
        x = dx;
        s = ops.to_interior(-dz);
        kkt.solve(-c, Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(m), dx, dy, dz);
        y = dy;
        z = ops.to_interior(dz);
    }
    double tau = 1.0, kappa = 1.0;

    const double bnorm = b.size() ? b.norm() : 0.0;
    const double hnorm = h.norm();
    const double cnorm = c.norm();
    const Eigen::VectorXd e = ops.unit();

    auto finish = [&](Status st, int iters) {
        result.status = st;
        result.iterations = iters;
        result.x = x / tau;
        result.z = z / tau;
        result.s = s / tau;
        Eigen::VectorXd yfull = Eigen::VectorXd::Zero(program.A.rows());
        for (std::size_t i = 0; i < pre.kept.size(); ++i) yfull(pre.kept[i]) = y(static_cast<Eigen::Index>(i)) / tau;
        result.y = yfull;
        result.primal_objective = c.dot(result.x);
        result.dual_objective = -(program.b.size() ? program.b.dot(result.y) : 0.0) - h.dot(result.z);
        result.certificate = certify(program, result.x, result.y, result.z, settings);
        return result;
    };

    for (int it = 0; it < settings.max_iterations; ++it) {
        Eigen::VectorXd rx = G.transpose() * z + c * tau;
        if (p) rx += A.transpose() * y;
        Eigen::VectorXd ry = b * tau;
        if (p) ry -= A * x;
        const Eigen::VectorXd rz = s + G * x - h * tau;
        const double cx = c.dot(x);
        const double by = p ? b.dot(y) : 0.0;
        const double hz = h.dot(z);
        const double rt = kappa + cx + by + hz;

        const double sz = s.dot(z);
        const double mu = (sz + tau * kappa) / (nu + 1.0);
        const double pcost = cx / tau;
        const double dcost = -(by + hz) / tau;
        const double pres = std::max(p ? ry.norm() / (1.0 + bnorm) : 0.0, rz.norm() / (1.0 + hnorm)) / tau;
        const double dres = rx.norm() / (1.0 + cnorm) / tau;
        const double gap = sz / (tau * tau);
        const double relgap = gap / std::max(1e-12, std::min(std::abs(pcost), std::abs(dcost)));

        if (pres < settings.feasibility_tol && dres < settings.feasibility_tol &&
            (gap < settings.gap_abs_tol || relgap < settings.gap_rel_tol))
            return finish(Status::Optimal, it);

        if (by + hz < 0.0) {
            Eigen::VectorXd r = G.transpose() * z;
            if (p) r += A.transpose() * y;
            const double inf = r.norm() / std::max(1.0, y.norm() + z.norm()) /
                               (-(by + hz) / std::max(1.0, y.norm() + z.norm()));
            if (inf < settings.feasibility_tol && tau < kappa) {
                finish(Status::PrimalInfeasible, it);
                return result;
            }
        }
        if (cx < 0.0) {
            const double ax = p ? (A * x).norm() : 0.0;
            const double gs = (G * x + s).norm();
            const double inf = std::max(ax, gs) / (-cx);
            if (inf < settings.feasibility_tol && tau < kappa) {
                finish(Status::DualInfeasible, it);
                return result;
            }
        }

        try {
            sc = ops.scaling(s, z);
        } catch (const std::domain_error&) {
            return finish(Status::NumericalError, it);
        }
        if (!kkt.factor(sc)) return finish(Status::NumericalError, it);
        const Eigen::VectorXd lambda = ops.scale(sc, z, false);

        Eigen::VectorXd x1, y1, z1;
        kkt.solve(-c, b, h, x1, y1, z1);
        const double denom = c.dot(x1) + (p ? b.dot(y1) : 0.0) + h.dot(z1) - kappa / tau;

        // Returns (dx, dy, dz, ds, dtau, dkappa) for a complementarity target.
        struct Dir {
            Eigen::VectorXd dx, dy, dz, ds;
            double dtau = 0.0, dkappa = 0.0;
        };
        auto direction = [&](double eta, const Eigen::VectorXd& ds_target, double dk_target) {
            Dir d;
            const Eigen::VectorXd ldiv = ops.jordan_div(lambda, ds_target);
            const Eigen::VectorXd wl = ops.scale(sc, ldiv, false);
            Eigen::VectorXd x2, y2, z2;
            kkt.solve(-eta * rx, eta * ry, -eta * rz - wl, x2, y2, z2);
            const double num = -eta * rt - dk_target / tau - c.dot(x2) - (p ? b.dot(y2) : 0.0) - h.dot(z2);
            d.dtau = num / denom;
            d.dx = x2 + d.dtau * x1;
            d.dy = y2 + d.dtau * y1;
            d.dz = z2 + d.dtau * z1;
            d.ds = ops.scale(sc, ldiv - ops.scale(sc, d.dz, false), false);
            d.dkappa = (dk_target - kappa * d.dtau) / tau;
            return d;
        };
        auto step_to_boundary = [&](const Dir& d) {
            double a = detail::max_step(s, d.ds, program.cones, 1.0);
            a = std::min(a, detail::max_step(z, d.dz, program.cones, 1.0));
            if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
            if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
            return a;
        };

        const Eigen::VectorXd ll = ops.jordan(lambda, lambda);
        const Dir aff = direction(1.0, -ll, -tau * kappa);
        const double alpha_aff = step_to_boundary(aff);
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

        const Eigen::VectorXd corr =
            ops.jordan(ops.scale(sc, aff.ds, true), ops.scale(sc, aff.dz, false));
        const Dir comb = direction(1.0 - sigma, -ll - corr + sigma * mu * e,
                                   -tau * kappa - aff.dtau * aff.dkappa + sigma * mu);
        double alpha = std::min(1.0, 0.99 * step_to_boundary(comb));
        if (!(alpha > 1e-12)) {
            Result r = finish(Status::IterationLimit, it);
            if (r.certificate.certified) r.status = Status::Optimal;
            return r;
        }
        x += alpha * comb.dx;
        y += alpha * comb.dy;
        z += alpha * comb.dz;
        s += alpha * comb.ds;
        tau += alpha * comb.dtau;
        kappa += alpha * comb.dkappa;
    }
    Result r = finish(Status::IterationLimit, settings.max_iterations);
    if (r.certificate.certified) r.status = Status::Optimal;
    return r;
}

}  // namespace grrm::conic
