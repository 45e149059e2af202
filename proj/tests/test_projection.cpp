#include <cmath>

#include "authorsum/projection.hpp"
#include "doctest.h"

using namespace authorsum;
using namespace authorsum::viz;

namespace {

std::vector<std::string> labels(std::size_t n, const std::string& prefix) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// two well-separated Gaussian clusters in high dimension
struct Clusters {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;
  std::vector<std::string> hospitals;
};

Clusters two_clusters(std::size_t per_cluster, std::size_t dim,
                      std::uint64_t seed) {
  Clusters c;
  Rng rng(seed);
  for (std::size_t i = 0; i < 2 * per_cluster; ++i) {
    const bool second = i >= per_cluster;
    std::vector<double> row(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      row[k] = rng.normal(second && k < 4 ? 8.0 : 0.0, 0.5);
    }
    c.rows.push_back(std::move(row));
    c.names.push_back("p" + std::to_string(i));
    c.hospitals.push_back(second ? "B" : "A");
  }
  return c;
}

double dist(const ProjPoint& a, const ProjPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

TEST_SUITE("projection") {

TEST_CASE("pca: collinear points have zero second-component variance") {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 6; ++i) {
    rows.push_back({1.0 * i, 2.0 * i, -1.0 * i});
  }
  auto proj = pca_2d(rows, labels(6, "n"), labels(6, "h"));
  double var_y = 0.0;
  for (const auto& p : proj.points) var_y += p.y * p.y;
  CHECK(var_y / 6.0 < 1e-9);
}

TEST_CASE("pca: 2-D data projects isometrically up to rotation/reflection") {
  Rng rng(44);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 8; ++i) rows.push_back({rng.normal(), rng.normal(2, 3)});
  auto proj = pca_2d(rows, labels(8, "n"), labels(8, "h"));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const double orig = std::hypot(rows[i][0] - rows[j][0],
                                     rows[i][1] - rows[j][1]);
      CHECK(dist(proj.points[i], proj.points[j]) ==
            doctest::Approx(orig).epsilon(1e-6));
    }
  }
}

TEST_CASE("pca: duplicated rows produce duplicated points") {
  std::vector<std::vector<double>> rows = {
      {1, 2, 3}, {4, 0, -1}, {1, 2, 3}, {0, 0, 0}};
  auto proj = pca_2d(rows, labels(4, "n"), labels(4, "h"));
  CHECK(proj.points[0].x == doctest::Approx(proj.points[2].x).epsilon(1e-12));
  CHECK(proj.points[0].y == doctest::Approx(proj.points[2].y).epsilon(1e-12));

  CHECK_THROWS(pca_2d({{1.0, 2.0}}, labels(1, "n"), labels(1, "h")));
}

TEST_CASE("tsne: bandwidths reproduce the target perplexity") {
  Rng rng(7);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 12; ++i) {
    std::vector<double> r(6);
    for (auto& v : r) v = rng.normal(0, 2);
    rows.push_back(std::move(r));
  }
  const double perplexity = 5.0;
  auto p = tsne_affinities(rows, perplexity);

  // validate on the conditional distributions reconstructed from P:
  // symmetrized matrix must be symmetric, non-negative, unit sum
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      CHECK(p[i][j] >= 0.0);
      CHECK(p[i][j] == doctest::Approx(p[j][i]).epsilon(1e-12));
      total += p[i][j];
    }
  }
  CHECK(std::abs(total - 1.0) < 1e-9);
}

TEST_CASE("tsne: per-point 2^H matches the perplexity within 1e-3") {
  Rng rng(13);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 15; ++i) {
    std::vector<double> r(8);
    for (auto& v : r) v = rng.normal(0, 1.5);
    rows.push_back(std::move(r));
  }
  const double perplexity = 6.0;
  auto p_cond = tsne_conditional_affinities(rows, perplexity);
  for (std::size_t i = 0; i < p_cond.size(); ++i) {
    double entropy = 0.0;
    for (std::size_t j = 0; j < p_cond.size(); ++j) {
      if (p_cond[i][j] > 0.0)
        entropy -= p_cond[i][j] * std::log2(p_cond[i][j]);
    }
    CHECK(std::abs(std::exp2(entropy) - perplexity) <= 1e-3);
  }
}

TEST_CASE("tsne: final KL below initial KL; deterministic under a seed") {
  auto c = two_clusters(5, 16, 99);
  ProjectionConfig cfg;
  cfg.perplexity = 4.0;
  cfg.iterations = 400;
  cfg.seed = 42;
  auto a = tsne_2d(c.rows, c.names, c.hospitals, cfg);
  CHECK(a.final_kl < a.initial_kl);
  auto b = tsne_2d(c.rows, c.names, c.hospitals, cfg);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
  }

  CHECK_THROWS_WITH(tsne_2d(c.rows, c.names, c.hospitals,
                            {Method::tsne, 10.0, 100, 100.0, 1}),
                    doctest::Contains("perplexity"));
}

TEST_CASE("tsne: separated clusters stay separated in 2-D (2-means purity)") {
  auto c = two_clusters(8, 64, 123);
  ProjectionConfig cfg;
  cfg.perplexity = 5.0;
  cfg.iterations = 500;
  cfg.seed = 42;
  auto proj = tsne_2d(c.rows, c.names, c.hospitals, cfg);

  // tiny 2-means on the 2-D output
  double cx[2] = {proj.points[0].x, proj.points[15].x};
  double cy[2] = {proj.points[0].y, proj.points[15].y};
  std::vector<int> assign(16, 0);
  for (int it = 0; it < 50; ++it) {
    for (std::size_t i = 0; i < 16; ++i) {
      const double d0 = std::hypot(proj.points[i].x - cx[0],
                                   proj.points[i].y - cy[0]);
      const double d1 = std::hypot(proj.points[i].x - cx[1],
                                   proj.points[i].y - cy[1]);
      assign[i] = d1 < d0;
    }
    double sx[2] = {0, 0}, sy[2] = {0, 0};
    int cnt[2] = {0, 0};
    for (std::size_t i = 0; i < 16; ++i) {
      sx[assign[i]] += proj.points[i].x;
      sy[assign[i]] += proj.points[i].y;
      ++cnt[assign[i]];
    }
    for (int k = 0; k < 2; ++k) {
      if (cnt[k]) {
        cx[k] = sx[k] / cnt[k];
        cy[k] = sy[k] / cnt[k];
      }
    }
  }
  int match = 0;
  for (std::size_t i = 0; i < 16; ++i) {
    match += (assign[i] == (i >= 8)) ? 1 : 0;
  }
  const double purity = std::max(match, 16 - match) / 16.0;
  CHECK(purity >= 0.9);

  // hospital labels coincide with the true clusters here
  CHECK(hospital_silhouette(proj.points) > 0.0);
}

TEST_CASE("tsne: identical rows get jitter instead of dividing by zero") {
  std::vector<std::vector<double>> rows(6, std::vector<double>{1.0, 2.0, 3.0});
  ProjectionConfig cfg;
  cfg.perplexity = 3.0;
  cfg.iterations = 50;
  cfg.seed = 9;
  auto proj = tsne_2d(rows, labels(6, "n"), labels(6, "h"), cfg);
  CHECK(proj.jitter_applied);
  for (const auto& p : proj.points) {
    CHECK(std::isfinite(p.x));
    CHECK(std::isfinite(p.y));
  }
}

TEST_CASE("csv and svg outputs carry labels and metadata") {
  Projection2D proj;
  proj.points = {{"doc_00", "hospital_00", 1.5, -2.25},
                 {"doc_01", "hospital_01", -0.5, 0.75}};
  proj.initial_kl = 2.0;
  proj.final_kl = 0.5;
  const std::string csv = projection_csv(proj, 0x1234, 42);
  CHECK(csv.find("name,hospital,x,y\n") == 0);
  CHECK(csv.find("doc_00,hospital_00,1.5,-2.25") != std::string::npos);
  CHECK(csv.find("# config=0x0000000000001234 seed=42") != std::string::npos);

  const std::string svg = projection_svg(proj, "tsne test", 0x1234, 42);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("hospital_01") != std::string::npos);
  CHECK(svg.find("config=0x0000000000001234") != std::string::npos);
}

}  // TEST_SUITE
