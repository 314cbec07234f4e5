#include "ssnmg/krylov.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssnmg {

double LinearMap::dot(const Vector& a, const Vector& b) const {
    if (inner_product == InnerProduct::discrete) return (weights.array() * a.array() * b.array()).sum();
    return a.dot(b);
}

LinearMap LinearMap::identity(Index n) {
    return {[](const Vector& x) { return x; }, n, true, InnerProduct::euclidean, {}, "identity"};
}

LinearMap LinearMap::from_matrix(const DenseMatrix& a, bool symmetric) {
    if (a.rows() != a.cols()) throw std::invalid_argument("LinearMap::from_matrix: matrix must be square");
    return {[a](const Vector& x) -> Vector { return a * x; }, a.rows(), symmetric, InnerProduct::euclidean, {}, "dense"};
}

namespace {

void check_dims(const LinearMap& a, const Vector& b, const char* who) {
    if (!a.apply) throw std::invalid_argument(std::string(who) + ": operator has no apply");
    if (a.dimension != b.size()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

KrylovResult cg(const LinearMap& a, const Vector& b, const KrylovOptions& options) {
    check_dims(a, b, "cg");
    KrylovResult res;
    res.solution = Vector::Zero(b.size());
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }

    Vector& x = res.solution;
    Vector r = b;
    Vector p = r;
    double rr = a.dot(r, r);
    while (res.iterations < options.max_iterations) {
        const Vector ap = a(p);
        ++res.matvec_count;
        const double pap = a.dot(p, ap);
        if (!(pap > 0.0)) throw SolverError("cg: breakdown, operator is not positive definite (p'Ap = " + std::to_string(pap) + ")");
        const double alpha = rr / pap;
        x += alpha * p;
        r -= alpha * ap;
        ++res.iterations;
        const double rel = r.norm() / bnorm;
        res.residual_history.push_back(rel);
        if (rel <= options.tolerance) {
            res.converged = true;
            break;
        }
        const double rr_new = a.dot(r, r);
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    res.true_relative_residual = (b - a(x)).norm() / bnorm;
    ++res.matvec_count;
    return res;
}

KrylovResult cgs(const LinearMap& a, const LinearMap& prec, const Vector& b, const KrylovOptions& options) {
    check_dims(a, b, "cgs");
    check_dims(prec, b, "cgs preconditioner");
    KrylovResult res;
    res.solution = Vector::Zero(b.size());
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }

    Vector& x = res.solution;
    Vector r = b;                 // unpreconditioned residual
    Vector rt = prec(r);          // preconditioned residual P r
    ++res.preconditioner_count;
    Vector shadow = rt;
    Vector u(b.size()), p(b.size()), q = Vector::Zero(b.size());
    double rho_old = 1.0;
    bool fresh = true;
    const double tiny = std::numeric_limits<double>::epsilon();
    const double rt0 = rt.norm();

    while (res.iterations < options.max_iterations) {
        // An inexact preconditioner lets the recurrence for P r decay while r
        // stalls. Rebuild both from the current iterate once; give up after that.
        if (rt.norm() <= tiny * rt0) {
            if (res.restarts > 0) throw SolverError("cgs: stagnation, preconditioned residual vanished before r converged");
            ++res.restarts;
            r = b - a(x);
            ++res.matvec_count;
            rt = prec(r);
            ++res.preconditioner_count;
            shadow = rt;
            fresh = true;
            continue;
        }
        const double rho = shadow.dot(rt);
        if (std::abs(rho) <= tiny * shadow.norm() * rt.norm()) {
            if (res.restarts > 0) throw SolverError("cgs: repeated rho breakdown");
            ++res.restarts;
            shadow = rt;
            fresh = true;
            continue;
        }
        if (fresh) {
            u = rt;
            p = u;
            fresh = false;
        } else {
            const double beta = rho / rho_old;
            u = rt + beta * q;
            p = u + beta * (q + beta * p);
        }

        const Vector v = prec(a(p));
        ++res.matvec_count;
        ++res.preconditioner_count;
        const double sigma = shadow.dot(v);
        if (sigma == 0.0 || !std::isfinite(sigma)) {
            if (res.restarts > 0) throw SolverError("cgs: breakdown in step length");
            ++res.restarts;
            shadow = rt;
            fresh = true;
            continue;
        }
        const double alpha = rho / sigma;
        q = u - alpha * v;
        const Vector uq = u + q;
        x += alpha * uq;
        const Vector auq = a(uq);
        ++res.matvec_count;
        r -= alpha * auq;
        rt -= alpha * prec(auq);
        ++res.preconditioner_count;
        ++res.iterations;
        rho_old = rho;

        const double rel = r.norm() / bnorm;
        res.residual_history.push_back(rel);
        if (rel <= options.tolerance) {
            res.converged = true;
            break;
        }
    }
    res.true_relative_residual = (b - a(x)).norm() / bnorm;
    ++res.matvec_count;
    return res;
}

}  // namespace ssnmg
