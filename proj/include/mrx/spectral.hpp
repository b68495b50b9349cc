#pragma once

// Second-eigenvalue computation for regular graphs and regular digraphs,
// mixing-lemma checks, tensor spectra and interlacing.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mrx/error.hpp"
#include "mrx/graph.hpp"

namespace mrx {

/// Row-major symmetric (or general) dense matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  explicit DenseMatrix(std::size_t size = 0) : n(size), a(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

inline constexpr std::uint64_t kDenseSpectrumLimit = 7'000;
inline constexpr std::uint64_t kIterativeLimit = 1'000'000;
/// Below this the dense path uses cyclic Jacobi, above it Householder + QR.
inline constexpr std::size_t kJacobiLimit = 400;

inline DenseMatrix adjacency_matrix(const RegularGraph& g) {
  if (g.n() > kDenseSpectrumLimit) throw Error(ErrorKind::resource_limit, "dense adjacency limited to n <= 7000");
  DenseMatrix m(g.n());
  for (Vertex u = 0; u < g.n(); ++u)
    for (Vertex v : g.out_neighbors(u)) m(u, v) = 1.0;
  return m;
}

/// M M^t, entry (u, v) = number of common out-neighbours.
inline DenseMatrix gram_out(const RegularGraph& g) {
  if (g.n() > kDenseSpectrumLimit) throw Error(ErrorKind::resource_limit, "dense MM^t limited to n <= 7000");
  const std::size_t n = g.n();
  // Walk counts via in-neighbour lists: for every w, all pairs of its in-neighbours.
  DenseMatrix m(n);
  for (Vertex w = 0; w < n; ++w) {
    const auto in = g.in_neighbors(w);
    for (Vertex u : in)
      for (Vertex v : in) m(u, v) += 1.0;
  }
  return m;
}

/// Cyclic Jacobi rotations until off(A) < 1e-10 * ||A||_F. Returns eigenvalues, descending.
inline std::vector<double> jacobi_eigenvalues(DenseMatrix m, int max_sweeps = 100) {
  const std::size_t n = m.n;
  double frob = 0.0;
  for (double x : m.a) frob += x * x;
  frob = std::sqrt(frob);
  auto off = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
  };
  const double threshold = 1e-10 * std::max(frob, 1e-300);
  int sweep = 0;
  for (; sweep < max_sweeps && off() >= threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = m(p, r);
        if (apr == 0.0) continue;
        const double theta = (m(r, r) - m(p, p)) / (2.0 * apr);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = m(k, p), akr = m(k, r);
          m(k, p) = c * akp - s * akr;
          m(k, r) = s * akp + c * akr;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = m(p, k), ark = m(r, k);
          m(p, k) = c * apk - s * ark;
          m(r, k) = s * apk + c * ark;
        }
      }
  }
  if (off() >= threshold) throw ConvergenceError("Jacobi sweeps exhausted", off() / std::max(frob, 1e-300));
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

enum class DenseSolver { automatic, jacobi, householder_qr };

/// Symmetric eigenvalues, descending.
inline std::vector<double> symmetric_eigenvalues(const DenseMatrix& m, DenseSolver solver = DenseSolver::automatic) {
  if (solver == DenseSolver::jacobi || (solver == DenseSolver::automatic && m.n <= kJacobiLimit))
    return jacobi_eigenvalues(m);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> map(
      m.a.data(), static_cast<Eigen::Index>(m.n), static_cast<Eigen::Index>(m.n));
  // The tridiagonal QR in Eigen 3.4 can stall on very degenerate integer spectra (unit Cayley at q=7).
  // A diagonal shift leaves the eigenvectors alone and gets it moving again.
  for (double shift : {0.0, 0.5, -0.75}) {
    Eigen::MatrixXd full = map;
    full.diagonal().array() += shift;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) continue;
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + m.n);
    for (double& x : ev) x -= shift;
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
  }
  throw ConvergenceError("symmetric eigensolver failed", -1.0);
}

/// Eigenvalues of a general real matrix, sorted by descending modulus.
inline std::vector<std::complex<double>> general_eigenvalues(const DenseMatrix& m) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> map(
      m.a.data(), static_cast<Eigen::Index>(m.n), static_cast<Eigen::Index>(m.n));
  Eigen::MatrixXd full = map;
  Eigen::EigenSolver<Eigen::MatrixXd> es(full, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("general eigensolver failed", -1.0);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + m.n);
  std::sort(ev.begin(), ev.end(), [](auto x, auto y) { return std::abs(x) > std::abs(y); });
  return ev;
}

enum class SpectralMethod { dense_full, iterative_extreme, via_mmt, tensor_composed };

inline const char* to_string(SpectralMethod m) {
  switch (m) {
    case SpectralMethod::dense_full: return "dense-full";
    case SpectralMethod::iterative_extreme: return "iterative-extreme";
    case SpectralMethod::via_mmt: return "via-mmt";
    case SpectralMethod::tensor_composed: return "tensor-composed";
  }
  return "unknown";
}

enum class NormalityStatus { not_applicable, verified, assumed, violated_overridden };

inline const char* to_string(NormalityStatus s) {
  switch (s) {
    case NormalityStatus::not_applicable: return "not-applicable";
    case NormalityStatus::verified: return "verified";
    case NormalityStatus::assumed: return "assumed";
    case NormalityStatus::violated_overridden: return "violated-overridden";
  }
  return "unknown";
}

struct SpectralReport {
  std::string family;
  std::uint32_t q = 0;
  std::uint64_t n = 0;
  std::uint64_t degree = 0;
  /// max |lambda_i| over non-principal eigenvalues (singular values for digraphs).
  double lambda2 = 0.0;
  SpectralMethod method = SpectralMethod::dense_full;
  double tolerance = 0.0;
  std::optional<double> claimed_bound;
  std::optional<double> ratio;
  double runtime_ms = 0.0;
  NormalityStatus normality = NormalityStatus::not_applicable;
  /// Full spectrum, descending; only for dense-full undirected solves and tensor composition.
  std::vector<double> spectrum;

  void set_claimed_bound(double bound) {
    claimed_bound = bound;
    ratio = bound > 0 ? std::optional<double>(lambda2 / bound) : std::nullopt;
  }
};

enum class NormalityPolicy {
  verify,    // check N+(u,v) == N-(u,v); throw normality-required on violation
  assume,    // skip the check, report "assumed"
  override,  // check and report, but proceed on violation
};

struct SpectralOptions {
  enum class Method { automatic, dense, iterative } method = Method::automatic;
  NormalityPolicy normality = NormalityPolicy::verify;
  /// Pairs sampled for the normality check when n is too large for exhaustive checking.
  std::uint64_t normality_samples = 20'000;
  std::uint64_t seed = 0x5eed;
  int iteration_cap = 10'000;
  double residual_target = 1e-8;
  int block = 8;
};

/// A symmetric PSD operator given by its action on vectors.
using Operator = std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct IterativeResult {
  double top = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Largest eigenvalue of a PSD operator restricted to the complement of the all-ones vector.
/// Restarted orthogonal (subspace) iteration with Rayleigh-Ritz.
inline IterativeResult top_deflated_eigenvalue(const Operator& op, std::size_t n, const SpectralOptions& opt) {
  const int k = static_cast<int>(std::min<std::size_t>(opt.block, n > 1 ? n - 1 : 1));
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd V(n, k), W(n, k);
  for (Eigen::Index i = 0; i < V.size(); ++i) V.data()[i] = gauss(rng);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  auto deflate = [&](Eigen::MatrixXd& X) {
    for (int c = 0; c < X.cols(); ++c) {
      const double s = X.col(c).sum() * inv_sqrt_n;
      X.col(c).array() -= s * inv_sqrt_n;
    }
  };
  std::vector<double> x(n), y(n);
  auto apply = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
    for (int c = 0; c < in.cols(); ++c) {
      for (std::size_t i = 0; i < n; ++i) x[i] = in(static_cast<Eigen::Index>(i), c);
      op(x, y);
      for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i), c) = y[i];
    }
  };
  IterativeResult res;
  deflate(V);
  {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    V = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  }
  for (int it = 1; it <= opt.iteration_cap; ++it) {
    apply(V, W);
    deflate(W);
    // Rayleigh-Ritz on span(V).
    Eigen::MatrixXd H = V.transpose() * W;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::Index top = k - 1;  // ascending order
    const double theta = es.eigenvalues()(top);
    const Eigen::VectorXd ritz = V * es.eigenvectors().col(top);
    const Eigen::VectorXd image = W * es.eigenvectors().col(top);
    const double resid = (image - theta * ritz).norm() / std::max(std::abs(theta), 1e-300);
    res = {theta, resid, it};
    if (resid < opt.residual_target || std::abs(theta) < 1e-12) return res;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
    V = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  }
  throw ConvergenceError("orthogonal iteration hit the iteration cap", res.residual);
}

/// Exhaustive (small n) or sampled check of |N+(u,v)| == |N-(u,v)|, plus in-degree == out-degree.
/// Returns violations found.
inline std::uint64_t count_normality_violations(const RegularGraph& g, std::uint64_t samples, std::uint64_t seed,
                                                std::uint64_t* pairs_checked = nullptr) {
  const std::uint64_t n = g.n();
  std::vector<std::vector<Vertex>> outs(n), ins(n);
  const bool cache = n <= 20'000;
  if (cache)
    for (Vertex u = 0; u < n; ++u) {
      outs[u] = g.out_neighbors(u);
      ins[u] = g.in_neighbors(u);
    }
  auto inter = [](const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
    std::uint64_t c = 0;
    for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
      if (a[i] < b[j]) ++i;
      else if (b[j] < a[i]) ++j;
      else ++c, ++i, ++j;
    }
    return c;
  };
  auto check = [&](Vertex u, Vertex v) {
    if (cache) return inter(outs[u], outs[v]) == inter(ins[u], ins[v]);
    return common_neighbors(g, u, v, Direction::out) == common_neighbors(g, u, v, Direction::in);
  };
  std::uint64_t bad = 0, checked = 0;
  // Diagonal of MM^t vs M^tM: out-degree against in-degree.
  for (Vertex u = 0; u < n; ++u) {
    const bool equal = cache ? outs[u].size() == ins[u].size()
                             : g.out_neighbors(u).size() == g.in_neighbors(u).size();
    if (!equal) ++bad;
    if (!cache && u >= samples) break;
  }
  if (n * (n - 1) / 2 <= samples) {
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v, ++checked)
        if (!check(u, v)) ++bad;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
    while (checked < samples) {
      const Vertex u = static_cast<Vertex>(pick(rng)), v = static_cast<Vertex>(pick(rng));
      if (u == v) continue;
      ++checked;
      if (!check(u, v)) ++bad;
    }
  }
  if (pairs_checked) *pairs_checked = checked;
  return bad;
}

/// Drops one copy of the principal eigenvalue d and returns max |lambda| of the rest.
inline double non_principal_max(const std::vector<double>& desc, double d) {
  if (desc.size() < 2) return 0.0;
  std::size_t skip = 0;
  double best = std::abs(desc[0] - d);
  for (std::size_t i = 1; i < desc.size(); ++i)
    if (std::abs(desc[i] - d) < best) best = std::abs(desc[i] - d), skip = i;
  double m = 0.0;
  for (std::size_t i = 0; i < desc.size(); ++i)
    if (i != skip) m = std::max(m, std::abs(desc[i]));
  return m;
}

inline SpectralReport second_eigenvalue(const RegularGraph& g, const SpectralOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  SpectralReport r;
  r.family = g.name();
  r.q = g.spec().q;
  r.n = g.n();
  r.degree = g.audit().max_out;
  const std::uint64_t n = g.n();
  const double d = static_cast<double>(r.degree);
  if (!g.audit().regular())
    throw Error(ErrorKind::domain, "second_eigenvalue needs a regular graph (audit failed)");

  if (g.directed()) {
    if (opt.normality == NormalityPolicy::assume) {
      r.normality = NormalityStatus::assumed;
    } else {
      const std::uint64_t bad = count_normality_violations(g, opt.normality_samples, opt.seed);
      if (bad == 0) r.normality = NormalityStatus::verified;
      else if (opt.normality == NormalityPolicy::override) r.normality = NormalityStatus::violated_overridden;
      else
        throw Error(ErrorKind::normality_required,
                    g.name() + " is not normal (" + std::to_string(bad) + " violating pairs)");
    }
  }

  const bool dense = opt.method == SpectralOptions::Method::dense ||
                     (opt.method == SpectralOptions::Method::automatic && n <= (g.directed() ? 3'000u : kDenseSpectrumLimit));
  if (dense && n > kDenseSpectrumLimit) throw Error(ErrorKind::resource_limit, "dense solve limited to n <= 7000");
  if (!dense && n > kIterativeLimit) throw Error(ErrorKind::resource_limit, "iterative solve limited to n <= 1e6");

  if (dense) {
    if (!g.directed()) {
      r.spectrum = symmetric_eigenvalues(adjacency_matrix(g));
      r.lambda2 = non_principal_max(r.spectrum, d);
      r.method = SpectralMethod::dense_full;
      r.tolerance = 1e-9 * std::max(1.0, d);
    } else {
      const auto s = symmetric_eigenvalues(gram_out(g));
      r.lambda2 = std::sqrt(std::max(0.0, non_principal_max(s, d * d)));
      r.method = SpectralMethod::via_mmt;
      r.tolerance = 1e-9 * std::max(1.0, d);
    }
  } else {
    Operator op;
    if (!g.directed()) {
      op = [&g, n](const std::vector<double>& x, std::vector<double>& y) {
        std::vector<double> t(n, 0.0);
        for (Vertex u = 0; u < n; ++u)
          for (Vertex v : g.out_neighbors(u)) t[u] += x[v];
        y.assign(n, 0.0);
        for (Vertex u = 0; u < n; ++u)
          for (Vertex v : g.out_neighbors(u)) y[u] += t[v];
      };
    } else {
      op = [&g, n](const std::vector<double>& x, std::vector<double>& y) {
        // y = M M^t x: t = M^t x scatters along out-edges, y = M t gathers.
        std::vector<double> t(n, 0.0);
        for (Vertex u = 0; u < n; ++u)
          for (Vertex v : g.out_neighbors(u)) t[v] += x[u];
        y.assign(n, 0.0);
        for (Vertex u = 0; u < n; ++u)
          for (Vertex v : g.out_neighbors(u)) y[u] += t[v];
      };
    }
    const auto it = top_deflated_eigenvalue(op, n, opt);
    r.lambda2 = std::sqrt(std::max(0.0, it.top));
    r.method = g.directed() ? SpectralMethod::via_mmt : SpectralMethod::iterative_extreme;
    r.tolerance = std::max(opt.residual_target, it.residual) * std::max(1.0, r.lambda2);
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Multiset {a_i * b_j}, descending.
inline std::vector<double> tensor_spectrum(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::missing_spectrum, "tensor_spectrum needs full spectra");
  std::vector<double> out;
  out.reserve(a.size() * b.size());
  for (double x : a)
    for (double y : b) out.push_back(x * y);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Report for a product graph derived from its factors' full spectra.
inline SpectralReport tensor_report(const SpectralReport& a, const SpectralReport& b) {
  SpectralReport r;
  r.family = "tensor:" + a.family + "," + b.family;
  r.q = a.q;
  r.n = a.n * b.n;
  r.degree = a.degree * b.degree;
  r.spectrum = tensor_spectrum(a.spectrum, b.spectrum);
  r.lambda2 = non_principal_max(r.spectrum, static_cast<double>(r.degree));
  r.method = SpectralMethod::tensor_composed;
  r.tolerance = a.tolerance * static_cast<double>(b.degree) + b.tolerance * static_cast<double>(a.degree);
  return r;
}

/// Claimed lambda for a family: c * q^e. `explicit_constant` is false where the stated constant is
/// existential and c is a frozen desk-scale value checked at small q.
struct ClaimedLambda {
  double constant = 0, exponent = 0;
  bool explicit_constant = false;
  double bound(std::uint32_t q) const { return constant * std::pow(static_cast<double>(q), exponent); }
};

inline constexpr double kC1 = 3.0;   // G1: lambda <= c1 q^{7/2}
inline constexpr double kC2 = 1.0;   // G2: lambda <= c q^{11/4}
inline constexpr double kC11 = 1.0;  // G11: lambda <= c11 q^{3/2}
inline constexpr double kC31 = 1.0;  // G31: lambda <= c31 q^{3/2}

inline std::optional<ClaimedLambda> claimed_lambda(const GraphSpec& s) {
  switch (s.family) {
    case Family::unit_cayley:
    case Family::det_alpha: return ClaimedLambda{2.0, 1.5, true};
    case Family::gl_diff_m2: return ClaimedLambda{1.0, 2.0, true};
    case Family::sl2_sl2_diff: return ClaimedLambda{2.0, 1.5, true};
    case Family::sp_digraph_m2: return ClaimedLambda{kC1, 3.5, false};
    case Family::sp_digraph_sl2: return ClaimedLambda{kC2, 2.75, false};
    case Family::sl2_invertible_diff: return ClaimedLambda{kC11, 1.5, false};
    case Family::sl2_singular_diff: return ClaimedLambda{kC31, 1.5, false};
    default: return std::nullopt;
  }
}

struct MixingResult {
  std::uint64_t edges = 0;
  double expected = 0.0;
  double deviation = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// e(B, C) counts ordered pairs (u in B, w in C) with u -> w.
inline MixingResult mixing_check(const RegularGraph& g, const std::vector<Vertex>& B, const std::vector<Vertex>& C,
                                 double lambda) {
  std::vector<bool> inC(g.n(), false);
  for (Vertex w : C) inC[w] = true;
  MixingResult m;
  for (Vertex u : B)
    for (Vertex w : g.out_neighbors(u))
      if (inC[w]) ++m.edges;
  const double d = static_cast<double>(g.audit().max_out);
  m.expected = d * static_cast<double>(B.size()) * static_cast<double>(C.size()) / static_cast<double>(g.n());
  m.deviation = std::abs(static_cast<double>(m.edges) - m.expected);
  m.bound = lambda * std::sqrt(static_cast<double>(B.size()) * static_cast<double>(C.size()));
  // Absolute slack covers rounding in lambda and the floating expected value.
  m.holds = m.deviation <= m.bound + 1e-7 * std::max(1.0, m.bound);
  return m;
}

/// lambda_i <= mu_i <= lambda_{i+n-m}, both spectra ascending.
inline bool interlacing_check(const std::vector<double>& host, const std::vector<double>& minor, double tol = 1e-8) {
  const std::size_t n = host.size(), m = minor.size();
  if (m > n) throw Error(ErrorKind::domain, "minor larger than host");
  for (std::size_t i = 0; i < m; ++i)
    if (host[i] > minor[i] + tol || minor[i] > host[i + n - m] + tol) return false;
  return true;
}

}  // namespace mrx
