#pragma once

#include <string>
#include <vector>

#include "authorsum/rng.hpp"

namespace authorsum::viz {

enum class Method { pca, tsne };

struct ProjectionConfig {
  Method method = Method::tsne;
  double perplexity = 5.0;
  int iterations = 1000;
  double learning_rate = 100.0;
  std::uint64_t seed = 0;
};

struct ProjPoint {
  std::string name;
  std::string hospital;
  double x = 0.0;
  double y = 0.0;
};

struct Projection2D {
  std::vector<ProjPoint> points;
  double initial_kl = 0.0;  // t-SNE only
  double final_kl = 0.0;    // t-SNE only
  bool jitter_applied = false;
};

// Centers the rows and projects onto the top-2 principal directions
// (power iteration with deflation; directions orthonormal within 1e-9).
Projection2D pca_2d(const std::vector<std::vector<double>>& rows,
                    const std::vector<std::string>& names,
                    const std::vector<std::string>& hospitals);

// Exact t-SNE: per-point bandwidths found by binary search to match the
// perplexity, symmetrized P, Student-t Q, gradient descent with momentum.
Projection2D tsne_2d(const std::vector<std::vector<double>>& rows,
                     const std::vector<std::string>& names,
                     const std::vector<std::string>& hospitals,
                     const ProjectionConfig& config);

// internals exposed for verification: per-point conditional rows (each a
// distribution whose entropy matches the perplexity) and the symmetrized
// joint matrix
std::vector<std::vector<double>> tsne_conditional_affinities(
    const std::vector<std::vector<double>>& rows, double perplexity);
std::vector<std::vector<double>> tsne_affinities(
    const std::vector<std::vector<double>>& rows, double perplexity);

// mean silhouette of the 2-D points grouped by hospital label; points in
// singleton clusters contribute 0
double hospital_silhouette(const std::vector<ProjPoint>& points);

std::string projection_csv(const Projection2D& proj, std::uint64_t config_hash,
                           std::uint64_t seed);
std::string projection_svg(const Projection2D& proj, const std::string& title,
                           std::uint64_t config_hash, std::uint64_t seed);

}  // namespace authorsum::viz
