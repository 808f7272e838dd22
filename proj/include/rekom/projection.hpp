#pragma once

#include <array>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rekom/embedding.hpp"

namespace rekom {

struct Projection2D {
  std::vector<std::string> ids;
  std::vector<std::array<double, 2>> coords;  // aligned with ids
  std::string method;
  std::array<double, 2> explained_variance{0.0, 0.0};  // share of total variance per axis
};

/// Identifiers accepted by project().
std::vector<std::string> available_projectors();

/**
 * Projects the embedding to 2D.
 *
 * "pca": mean-centre, extract the top two eigenvectors of the covariance by
 * power iteration with deflation (tolerance 1e-9), and project. Each axis is
 * signed so that its largest-magnitude loading is positive.
 *
 * Throws ValidationError for fewer than two rows or columns, or an unknown method.
 */
Projection2D project(const EmbeddingMatrix& embedding, std::string_view method = "pca");

/// Header `id,x,y`.
void write_projection_csv(std::ostream& out, const Projection2D& projection);
Projection2D read_projection_csv(std::istream& in);

}  // namespace rekom
