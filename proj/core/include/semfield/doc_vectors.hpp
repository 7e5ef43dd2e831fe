#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "semfield/corpus.hpp"
#include "semfield/lexicon.hpp"

namespace semfield {

/// Concept-space document vector: occurrences of each concept's lemmas per
/// 1,000 words, one dimension per concept id (sorted).
struct ConceptVector {
  std::string stratum_label;
  std::vector<std::string> dims;
  std::vector<double> values;
};

ConceptVector concept_vector(const CorpusStratum& stratum, const ConceptMap& map, MapSide side);

/// Throws on dimension mismatch or an all-zero vector ("undefined cosine").
double cosine(const ConceptVector& u, const ConceptVector& v);
double euclidean(const ConceptVector& u, const ConceptVector& v);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct PcaResult {
  std::vector<std::string> labels;
  std::vector<Point2> coords;
  /// Eigenvalues of the sample covariance, first >= second >= 0.
  double eigenvalue_first = 0.0;
  double eigenvalue_second = 0.0;
  /// Fractions of total variance.
  double explained_first = 0.0;
  double explained_second = 0.0;
  std::vector<double> axis_first;
  std::vector<double> axis_second;
  std::size_t iterations = 0;
  bool converged = true;
};

struct PcaOptions {
  double relative_tolerance = 1e-10;  // eigenvalue change between sweeps
  double residual_tolerance = 1e-8;   // ||Cw - lw|| relative to max(1, trace C)
  std::size_t max_iterations = 10'000;
};

/// Two-component PCA via power iteration with deflation on the sample
/// covariance. Each axis is oriented so its largest-magnitude loading is
/// positive. Throws "degenerate covariance" when all vectors coincide.
PcaResult pca_2d(std::span<const ConceptVector> vectors, const PcaOptions& options = {});

}  // namespace semfield
