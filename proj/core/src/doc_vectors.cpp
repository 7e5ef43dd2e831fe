#include "semfield/doc_vectors.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "semfield/error.hpp"
#include "semfield/freq_stats.hpp"

namespace semfield {

ConceptVector concept_vector(const CorpusStratum& stratum, const ConceptMap& map, MapSide side) {
  if (stratum.language_code != map.language(side)) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("stratum {} is '{}' but the concept map's {} side is '{}'", stratum.label(),
                            stratum.language_code, to_string(side), map.language(side)));
  }
  const std::size_t total = stratum.total_word_count();
  if (total == 0) throw Error(ErrorKind::analysis, fmt::format("empty stratum {}", stratum.label()));

  ConceptVector v;
  v.stratum_label = stratum.label();
  std::map<std::string, std::size_t> tokens;
  for (const auto& [id, c] : map.concepts()) tokens[id] = 0;
  for (const auto& [lemma, count] : count_lemmas(stratum)) {
    if (const Concept* owner = map.owner(side, lemma)) tokens[owner->id] += count;
  }
  for (const auto& [id, n] : tokens) {
    v.dims.push_back(id);
    v.values.push_back(1000.0 * static_cast<double>(n) / static_cast<double>(total));
  }
  return v;
}

namespace {

void require_same_dims(const ConceptVector& u, const ConceptVector& v) {
  if (u.dims != v.dims || u.values.size() != v.values.size()) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("vectors '{}' and '{}' have different dimensions", u.stratum_label, v.stratum_label));
  }
}

Eigen::Map<const Eigen::VectorXd> as_eigen(const ConceptVector& v) {
  return {v.values.data(), static_cast<Eigen::Index>(v.values.size())};
}

}  // namespace

double cosine(const ConceptVector& u, const ConceptVector& v) {
  require_same_dims(u, v);
  const auto a = as_eigen(u);
  const auto b = as_eigen(v);
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error(ErrorKind::analysis, "undefined cosine");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double euclidean(const ConceptVector& u, const ConceptVector& v) {
  require_same_dims(u, v);
  return (as_eigen(u) - as_eigen(v)).norm();
}

namespace {

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  std::size_t iterations = 0;
  bool converged = false;
};

void orient(Eigen::VectorXd& w) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < w.size(); ++i) {
    if (std::abs(w[i]) > std::abs(w[best])) best = i;
  }
  if (w[best] < 0) w = -w;
}

/// Dominant eigenpair of a symmetric positive semi-definite matrix,
/// keeping the iterate orthogonal to `exclude` when it is non-empty.
EigenPair power_iteration(const Eigen::MatrixXd& cov, const Eigen::VectorXd& exclude, double scale,
                          const PcaOptions& options) {
  const Eigen::Index d = cov.rows();
  const auto project_out = [&](Eigen::VectorXd& x) {
    if (exclude.size() > 0) x -= exclude.dot(x) * exclude;
  };

  // Start from the heaviest covariance column plus a small fixed tilt, so
  // the start is never exactly orthogonal to the dominant direction.
  Eigen::Index heaviest = 0;
  cov.colwise().squaredNorm().maxCoeff(&heaviest);
  Eigen::VectorXd w = cov.col(heaviest);
  for (Eigen::Index i = 0; i < d; ++i) w[i] += 1e-3 * w.norm() / static_cast<double>(i + 2) + 1e-12;
  project_out(w);
  if (w.norm() == 0.0) w = Eigen::VectorXd::Ones(d);
  w.normalize();

  EigenPair pair;
  double previous = 0.0;
  for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
    Eigen::VectorXd next = cov * w;
    project_out(next);
    const double lambda = w.dot(next);
    const double residual = (next - lambda * w).norm();
    pair.iterations = iter;
    const double norm = next.norm();
    if (norm == 0.0) {
      pair.value = 0.0;
      pair.vector = w;
      pair.converged = true;
      return pair;
    }
    const bool stable = std::abs(lambda - previous) <= options.relative_tolerance * std::abs(lambda);
    if (stable && residual <= options.residual_tolerance * scale) {
      pair.value = lambda;
      pair.vector = w;
      pair.converged = true;
      return pair;
    }
    previous = lambda;
    w = next / norm;
  }
  pair.value = w.dot(cov * w);
  pair.vector = w;
  pair.converged = false;
  return pair;
}

/// Rayleigh-quotient iteration from a power-iteration estimate. The power
/// method stops on eigenvalue change, which leaves the vector error near the
/// square root of the eigenvalue error; a few shifted solves bring it to
/// machine precision. A step is kept only if it lowers the residual.
void polish(const Eigen::MatrixXd& cov, const Eigen::VectorXd& exclude, EigenPair& pair) {
  const Eigen::Index d = cov.rows();
  const auto project_out = [&](Eigen::VectorXd& x) {
    if (exclude.size() > 0) x -= exclude.dot(x) * exclude;
  };
  const auto residual_of = [&](const Eigen::VectorXd& w, double mu) { return (cov * w - mu * w).norm(); };
  Eigen::VectorXd w = pair.vector;
  double mu = pair.value;
  double residual = residual_of(w, mu);
  for (int step = 0; step < 4 && residual > 0.0; ++step) {
    const Eigen::MatrixXd shifted = cov - mu * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd y = shifted.colPivHouseholderQr().solve(w);
    project_out(y);
    if (!y.allFinite() || y.norm() == 0.0) break;
    y.normalize();
    const double next_mu = y.dot(cov * y);
    const double next_residual = residual_of(y, next_mu);
    // Stay on the eigenvalue the power method found.
    if (!(next_residual < residual) || std::abs(next_mu - pair.value) > 1e-6 * std::max(1.0, std::abs(pair.value))) break;
    w = y;
    mu = next_mu;
    residual = next_residual;
  }
  pair.vector = w;
  pair.value = mu;
}

/// Unit vector orthogonal to `w`, built from the coordinate axis where `w`
/// is smallest.
Eigen::VectorXd orthogonal_to(const Eigen::VectorXd& w) {
  Eigen::Index smallest = 0;
  w.cwiseAbs().minCoeff(&smallest);
  Eigen::VectorXd e = Eigen::VectorXd::Unit(w.size(), smallest);
  e -= w.dot(e) * w;
  return e.normalized();
}

}  // namespace

PcaResult pca_2d(std::span<const ConceptVector> vectors, const PcaOptions& options) {
  if (vectors.size() < 2) throw Error(ErrorKind::invalid_argument, "pca_2d needs at least 2 vectors");
  for (const auto& v : vectors) require_same_dims(vectors.front(), v);
  const auto n = static_cast<Eigen::Index>(vectors.size());
  const auto d = static_cast<Eigen::Index>(vectors.front().values.size());
  if (d == 0) throw Error(ErrorKind::invalid_argument, "pca_2d needs at least one dimension");

  const bool identical = std::all_of(vectors.begin(), vectors.end(), [&](const ConceptVector& v) {
    return v.values == vectors.front().values;
  });
  if (identical) throw Error(ErrorKind::analysis, "degenerate covariance");

  Eigen::MatrixXd data(n, d);
  for (Eigen::Index i = 0; i < n; ++i) data.row(i) = as_eigen(vectors[static_cast<std::size_t>(i)]).transpose();
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  const double trace = cov.trace();
  if (!(trace > 0.0)) throw Error(ErrorKind::analysis, "degenerate covariance");

  const double scale = std::max(1.0, trace);
  EigenPair first = power_iteration(cov, Eigen::VectorXd(), scale, options);
  polish(cov, Eigen::VectorXd(), first);
  Eigen::VectorXd axis1 = first.vector;
  orient(axis1);

  Eigen::MatrixXd deflated = cov - first.value * axis1 * axis1.transpose();
  EigenPair second;
  if (d == 1) {
    second.vector = Eigen::VectorXd::Zero(1);
    second.converged = true;
  } else if (deflated.norm() <= 1e-12 * std::max(first.value, 1e-300)) {
    second.vector = orthogonal_to(axis1);
    second.converged = true;
  } else {
    second = power_iteration(deflated, axis1, scale, options);
    polish(deflated, axis1, second);
    second.value = std::max(0.0, second.value);
  }
  Eigen::VectorXd axis2 = second.vector;
  if (d > 1) orient(axis2);

  PcaResult result;
  result.eigenvalue_first = first.value;
  result.eigenvalue_second = second.value;
  result.explained_first = first.value / trace;
  result.explained_second = second.value / trace;
  result.axis_first.assign(axis1.data(), axis1.data() + d);
  result.axis_second.assign(axis2.data(), axis2.data() + d);
  result.iterations = first.iterations + second.iterations;
  result.converged = first.converged && second.converged;
  for (Eigen::Index i = 0; i < n; ++i) {
    result.labels.push_back(vectors[static_cast<std::size_t>(i)].stratum_label);
    result.coords.push_back(Point2{centered.row(i).dot(axis1), centered.row(i).dot(axis2)});
  }
  return result;
}

}  // namespace semfield
