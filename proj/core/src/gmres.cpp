#include <bilu/gmres.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace bilu {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// r = b - A x
void residual(const LinearOperator& a, std::span<const double> b,
              std::span<const double> x, std::span<double> r) {
  a(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

void validate(const SolverConfig& cfg) {
  if (cfg.restart < 1) throw std::invalid_argument("gmres: restart must be >= 1");
  if (cfg.max_iters < 0) throw std::invalid_argument("gmres: max_iters < 0");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw std::invalid_argument("gmres: tolerances must be positive");
  if (cfg.workers < 1) throw std::invalid_argument("gmres: workers must be >= 1");
}

}  // namespace

LinearOperator identity_operator() {
  return [](std::span<const double> x, std::span<double> y) {
    std::copy(x.begin(), x.end(), y.begin());
  };
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::lucky_breakdown: return "lucky_breakdown";
    case Termination::stagnation: return "stagnation";
    case Termination::max_iters: return "max_iters";
  }
  return "unknown";
}

SolveResult gmres(const LinearOperator& a, std::span<const double> b,
                  const LinearOperator& m, const SolverConfig& cfg,
                  std::span<const double> x0) {
  validate(cfg);
  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t n = b.size();
  const int restart = cfg.restart;

  SolveResult out;
  SolveStats& st = out.stats;
  out.x.assign(n, 0.0);
  if (!x0.empty()) {
    if (x0.size() != n) throw DimensionError("gmres: x0 length mismatch");
    std::copy(x0.begin(), x0.end(), out.x.begin());
  }
  Vector& x = out.x;

  const double bnorm = norm2(b);
  auto finish = [&](Termination term, bool converged, double true_rel) {
    st.termination = term;
    st.converged = converged;
    st.final_relative_residual = true_rel;
    st.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return out;
  };
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return finish(Termination::converged, true, 0.0);
  }

  std::vector<Vector> basis(static_cast<std::size_t>(restart) + 1, Vector(n));
  // Hessenberg matrix, column-major with leading dimension restart + 1
  const std::size_t ld = static_cast<std::size_t>(restart) + 1;
  std::vector<double> h(ld * static_cast<std::size_t>(restart), 0.0);
  std::vector<double> cs(static_cast<std::size_t>(restart)),
      sn(static_cast<std::size_t>(restart)), g(ld), y(static_cast<std::size_t>(restart));
  Vector r(n), av(n);

  double reference = -1.0;
  double target = 0.0;

  while (true) {
    residual(a, b, x, r);
    const double true_rel = norm2(r) / bnorm;
    if (true_rel <= cfg.rel_tol) return finish(Termination::converged, true, true_rel);
    if (st.iterations >= cfg.max_iters)
      return finish(Termination::max_iters, false, true_rel);

    Vector& v0 = basis[0];
    m(r, v0);
    ++st.preconditioner_applications;
    const double beta = norm2(v0);
    if (reference < 0.0) {
      reference = beta;
      target = cfg.rel_tol * beta;
    }
    if (!(beta > 0.0) || !std::isfinite(beta))
      return finish(Termination::stagnation, false, true_rel);
    if (beta <= target) {
      // preconditioned residual already small but the true one is not:
      // ask for the missing factor plus some margin
      target = beta * (cfg.rel_tol / true_rel) * 0.5;
    }
    for (auto& v : v0) v /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int steps = 0;
    bool reached = false;
    bool breakdown = false;
    for (int j = 0; j < restart && st.iterations < cfg.max_iters; ++j) {
      a(basis[j], av);
      m(av, basis[j + 1]);
      ++st.iterations;
      ++st.preconditioner_applications;
      Vector& w = basis[j + 1];
      double* hj = h.data() + static_cast<std::size_t>(j) * ld;
      for (int i = 0; i <= j; ++i) {
        hj[i] = dot(w, basis[i]);
        const Vector& vi = basis[i];
        for (std::size_t q = 0; q < n; ++q) w[q] -= hj[i] * vi[q];
      }
      hj[j + 1] = norm2(w);
      const double wnorm = hj[j + 1];

      for (int i = 0; i < j; ++i) {
        const double t0 = cs[i] * hj[i] + sn[i] * hj[i + 1];
        hj[i + 1] = -sn[i] * hj[i] + cs[i] * hj[i + 1];
        hj[i] = t0;
      }
      const double denom = std::hypot(hj[j], hj[j + 1]);
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = hj[j] / denom;
        sn[j] = hj[j + 1] / denom;
      }
      hj[j] = denom;
      hj[j + 1] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      steps = j + 1;
      const double resid = std::abs(g[j + 1]);
      st.residual_history.push_back(resid / reference);
      if (resid <= target) {
        reached = true;
        break;
      }
      if (wnorm < cfg.abs_tol) {
        breakdown = true;
        break;
      }
      for (auto& v : w) v /= wnorm;
    }

    // back substitution on the rotated Hessenberg system
    for (int i = steps - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < steps; ++k)
        s -= h[static_cast<std::size_t>(k) * ld + i] * y[k];
      const double diag = h[static_cast<std::size_t>(i) * ld + i];
      y[i] = diag == 0.0 ? 0.0 : s / diag;
    }
    for (int i = 0; i < steps; ++i) {
      const Vector& vi = basis[i];
      for (std::size_t q = 0; q < n; ++q) x[q] += y[i] * vi[q];
    }
    ++st.restarts;

    if (breakdown && !reached) {
      residual(a, b, x, r);
      const double rel = norm2(r) / bnorm;
      if (rel <= cfg.rel_tol) return finish(Termination::lucky_breakdown, true, rel);
      return finish(Termination::stagnation, false, rel);
    }
  }
}

SolveResult gmres(const CsrMatrix& a, std::span<const double> b,
                  const BlockIlukPreconditioner& m, const SolverConfig& cfg) {
  if (a.num_rows() != a.num_cols() ||
      b.size() != static_cast<std::size_t>(a.num_rows()) ||
      m.size() != a.num_rows())
    throw DimensionError("gmres: matrix, rhs and preconditioner sizes differ");
  const int workers = cfg.workers;
  return gmres(
      [&a, workers](std::span<const double> x, std::span<double> y) {
        spmv(a, x, y, workers);
      },
      b, [&m](std::span<const double> x, std::span<double> y) { m.apply(x, y); },
      cfg);
}

SolveResult gmres(const BcsrMatrix& a, std::span<const double> b,
                  const BlockIlukPreconditioner& m, const SolverConfig& cfg) {
  if (a.num_rows() != a.num_cols() ||
      b.size() != static_cast<std::size_t>(a.num_rows()) ||
      m.size() != a.num_rows())
    throw DimensionError("gmres: matrix, rhs and preconditioner sizes differ");
  const int workers = cfg.workers;
  return gmres(
      [&a, workers](std::span<const double> x, std::span<double> y) {
        spmv(a, x, y, workers);
      },
      b, [&m](std::span<const double> x, std::span<double> y) { m.apply(x, y); },
      cfg);
}

}  // namespace bilu
