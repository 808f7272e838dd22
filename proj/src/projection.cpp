#include "rekom/projection.hpp"

#include <cmath>
#include <random>

#include "rekom/csv.hpp"
#include "rekom/error.hpp"
#include "rekom/format.hpp"

namespace rekom {

namespace {

constexpr double kTolerance = 1e-9;
constexpr int kMaxIterations = 100000;

struct Eigenpair {
  Vector vector;
  double value = 0.0;
};

void orthogonalise(Vector& v, const Vector* against) {
  if (against) v -= against->dot(v) * *against;
}

/// Dominant eigenpair of a symmetric PSD matrix, optionally restricted to the
/// complement of `against`.
Eigenpair power_iteration(const Eigen::MatrixXd& cov, const Vector* against) {
  const auto m = cov.rows();
  std::mt19937_64 rng(0x70ca5eedULL);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = dist(rng);
  orthogonalise(v, against);
  v.normalize();

  const double scale = std::max(cov.diagonal().sum(), 1e-300);
  for (int it = 0; it < kMaxIterations; ++it) {
    Vector next = cov * v;
    orthogonalise(next, against);
    const double norm = next.norm();
    if (norm <= 1e-14 * scale) break;  // no variance left in this subspace
    next /= norm;
    const double change = (next - v).norm();
    v = std::move(next);
    if (change < kTolerance) break;
  }
  return {v, std::max(0.0, v.dot(cov * v))};
}

void fix_sign(Vector& v) {
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
  }
  if (v(arg) < 0) v = -v;
}

Projection2D project_pca(const EmbeddingMatrix& embedding) {
  const Matrix& x = embedding.values();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Matrix centred = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(x.rows() - 1);

  Eigenpair first = power_iteration(cov, nullptr);
  fix_sign(first.vector);
  const Eigen::MatrixXd deflated = cov - first.value * first.vector * first.vector.transpose();
  Eigenpair second = power_iteration(deflated, &first.vector);
  orthogonalise(second.vector, &first.vector);
  second.vector.normalize();
  fix_sign(second.vector);
  second.value = std::max(0.0, second.vector.dot(cov * second.vector));

  Projection2D out;
  out.method = "pca";
  const double total = cov.trace();
  if (total > 0) out.explained_variance = {first.value / total, second.value / total};

  Eigen::MatrixXd basis(x.cols(), 2);
  basis.col(0) = first.vector;
  basis.col(1) = second.vector;
  const Eigen::MatrixXd coords = centred * basis;
  out.ids.assign(embedding.ids().begin(), embedding.ids().end());
  out.coords.reserve(out.ids.size());
  for (Eigen::Index r = 0; r < coords.rows(); ++r) out.coords.push_back({coords(r, 0), coords(r, 1)});
  return out;
}

}  // namespace

std::vector<std::string> available_projectors() { return {"pca"}; }

Projection2D project(const EmbeddingMatrix& embedding, std::string_view method) {
  if (embedding.rows() < 2) throw ValidationError("projection needs at least 2 rows");
  if (embedding.dims() < 2) throw ValidationError("projection needs at least 2 embedding dimensions");
  if (method == "pca") return project_pca(embedding);
  std::string known;
  for (const auto& m : available_projectors()) known += (known.empty() ? "" : ", ") + m;
  throw ValidationError("unknown projection method `" + std::string(method) + "` (available: " + known + ")");
}

void write_projection_csv(std::ostream& out, const Projection2D& projection) {
  csv::write_row(out, {"id", "x", "y"});
  for (std::size_t i = 0; i < projection.ids.size(); ++i) {
    csv::write_row(out, {projection.ids[i], format_double(projection.coords[i][0]),
                         format_double(projection.coords[i][1])});
  }
}

Projection2D read_projection_csv(std::istream& in) {
  static constexpr std::string_view kHeader[] = {"id", "x", "y"};
  csv::Reader reader(in);
  csv::expect_header(reader, kHeader, "projection file");
  Projection2D out;
  csv::Record rec;
  while (reader.next(rec)) {
    if (rec.fields.size() != 3) throw DataError("expected 3 fields", rec.line);
    auto x = parse_number<double>(rec.fields[1]);
    auto y = parse_number<double>(rec.fields[2]);
    if (!x || !y) throw DataError("malformed coordinate", rec.line);
    out.ids.push_back(std::move(rec.fields[0]));
    out.coords.push_back({*x, *y});
  }
  return out;
}

}  // namespace rekom
