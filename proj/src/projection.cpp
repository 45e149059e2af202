#include "authorsum/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace authorsum::viz {

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix squared_distances(const Matrix& rows) {
  const std::size_t n = rows.size();
  Matrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < rows[i].size(); ++k) {
        const double dv = rows[i][k] - rows[j][k];
        acc += dv * dv;
      }
      d[i][j] = d[j][i] = acc;
    }
  }
  return d;
}

void validate_inputs(const Matrix& rows, const std::vector<std::string>& names,
                     const std::vector<std::string>& hospitals,
                     std::size_t min_rows) {
  if (rows.size() < min_rows) {
    throw std::invalid_argument("projection needs at least " +
                                std::to_string(min_rows) + " rows");
  }
  if (names.size() != rows.size() || hospitals.size() != rows.size()) {
    throw std::invalid_argument("projection label count mismatch");
  }
  for (const auto& r : rows) {
    if (r.size() != rows[0].size()) {
      throw std::invalid_argument("projection rows must share one dimension");
    }
  }
}

}  // namespace

Projection2D pca_2d(const Matrix& rows, const std::vector<std::string>& names,
                    const std::vector<std::string>& hospitals) {
  validate_inputs(rows, names, hospitals, 2);
  const std::size_t n = rows.size();
  const std::size_t d = rows[0].size();

  // center
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t k = 0; k < d; ++k) mean[k] += r[k];
  for (double& m : mean) m /= static_cast<double>(n);
  Matrix x(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) x[i][k] = rows[i][k] - mean[k];

  // covariance
  Matrix cov(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cov[a][b] += x[i][a] * x[i][b];
  for (auto& row : cov)
    for (double& v : row) v /= static_cast<double>(n);

  // top-2 eigenvectors via power iteration with deflation; the second
  // vector is re-orthogonalized against the first every sweep
  std::vector<std::vector<double>> dirs;
  Rng rng(2718281828ull);
  for (int comp = 0; comp < 2; ++comp) {
    std::vector<double> v(d);
    for (double& vi : v) vi = rng.normal();
    for (int it = 0; it < 2000; ++it) {
      std::vector<double> w(d, 0.0);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) w[a] += cov[a][b] * v[b];
      if (comp == 1) {
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += w[k] * dirs[0][k];
        for (std::size_t k = 0; k < d; ++k) w[k] -= dot * dirs[0][k];
      }
      double norm = 0.0;
      for (double wv : w) norm += wv * wv;
      norm = std::sqrt(norm);
      if (norm < 1e-300) {
        // degenerate direction (rank-deficient data): keep any unit vector
        // orthogonal to the first
        w.assign(d, 0.0);
        w[comp % d] = 1.0;
        if (comp == 1) {
          double dot = 0.0;
          for (std::size_t k = 0; k < d; ++k) dot += w[k] * dirs[0][k];
          for (std::size_t k = 0; k < d; ++k) w[k] -= dot * dirs[0][k];
          double nn = 0.0;
          for (double wv : w) nn += wv * wv;
          nn = std::sqrt(nn);
          if (nn > 1e-300)
            for (double& wv : w) wv /= nn;
          else
            w[(comp + 1) % d] = 1.0;
        }
        v = w;
        break;
      }
      double delta = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double nv = w[k] / norm;
        delta = std::max(delta, std::abs(nv - v[k]));
        v[k] = nv;
      }
      if (delta < 1e-13 && it > 3) break;
    }
    dirs.push_back(v);
  }

  Projection2D out;
  for (std::size_t i = 0; i < n; ++i) {
    ProjPoint p;
    p.name = names[i];
    p.hospital = hospitals[i];
    for (std::size_t k = 0; k < d; ++k) {
      p.x += x[i][k] * dirs[0][k];
      p.y += x[i][k] * dirs[1][k];
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

std::vector<std::vector<double>> tsne_conditional_affinities(
    const Matrix& rows, double perplexity) {
  const std::size_t n = rows.size();
  const Matrix d2 = squared_distances(rows);
  Matrix p_cond(n, std::vector<double>(n, 0.0));
  const double target = std::log2(perplexity);

  for (std::size_t i = 0; i < n; ++i) {
    // binary search the precision beta = 1/(2 sigma^2) until 2^H of the
    // row matches the perplexity within 1e-4
    double beta = 1.0, beta_lo = 0.0, beta_hi = 1e308;
    std::vector<double> row(n, 0.0);
    for (int iter = 0; iter < 256; ++iter) {
      double z = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = (j == i) ? 0.0 : std::exp(-beta * d2[i][j]);
        z += row[j];
      }
      double entropy = 0.0;  // in bits
      for (std::size_t j = 0; j < n; ++j) {
        if (row[j] <= 0.0) continue;
        const double pj = row[j] / z;
        entropy -= pj * std::log2(pj);
      }
      if (std::abs(std::exp2(entropy) - perplexity) < 1e-4) break;
      if (entropy > target) {
        beta_lo = beta;
        beta = (beta_hi >= 1e308) ? beta * 2.0 : 0.5 * (beta + beta_hi);
      } else {
        beta_hi = beta;
        beta = (beta_lo <= 0.0) ? beta / 2.0 : 0.5 * (beta + beta_lo);
      }
    }
    double z = 0.0;
    for (double v : row) z += v;
    for (std::size_t j = 0; j < n; ++j) p_cond[i][j] = row[j] / z;
  }
  return p_cond;
}

std::vector<std::vector<double>> tsne_affinities(const Matrix& rows,
                                                 double perplexity) {
  const std::size_t n = rows.size();
  const Matrix p_cond = tsne_conditional_affinities(rows, perplexity);
  // symmetrize; floor keeps KL finite without disturbing the unit sum
  Matrix p(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      p[i][j] = std::max((p_cond[i][j] + p_cond[j][i]) /
                             (2.0 * static_cast<double>(n)),
                         1e-14);
    }
  }
  return p;
}

namespace {

double kl_divergence(const Matrix& p, const Matrix& y) {
  const std::size_t n = p.size();
  Matrix qnum(n, std::vector<double>(n, 0.0));
  double qz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = y[i][0] - y[j][0];
      const double dy = y[i][1] - y[j][1];
      qnum[i][j] = 1.0 / (1.0 + dx * dx + dy * dy);
      qz += qnum[i][j];
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double q = std::max(qnum[i][j] / qz, 1e-300);
      kl += p[i][j] * std::log(p[i][j] / q);
    }
  }
  return kl;
}

}  // namespace

Projection2D tsne_2d(const Matrix& rows_in,
                     const std::vector<std::string>& names,
                     const std::vector<std::string>& hospitals,
                     const ProjectionConfig& config) {
  validate_inputs(rows_in, names, hospitals, 4);
  const std::size_t n = rows_in.size();
  if (config.perplexity >= static_cast<double>(n)) {
    throw std::invalid_argument("perplexity must be below the point count");
  }
  if (config.iterations < 1) throw std::invalid_argument("iterations must be >= 1");

  Projection2D out;
  Matrix rows = rows_in;
  // identical rows would break the bandwidth search; add seeded jitter
  {
    const Matrix d2 = squared_distances(rows);
    bool degenerate = false;
    for (std::size_t i = 0; i < n && !degenerate; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (d2[i][j] <= 0.0) {
          degenerate = true;
          break;
        }
    if (degenerate) {
      Rng jitter(Rng(config.seed).child("jitter").seed());
      for (auto& r : rows)
        for (double& v : r) v += jitter.normal(0.0, 1e-9);
      out.jitter_applied = true;
    }
  }

  const Matrix p = tsne_affinities(rows, config.perplexity);

  Rng rng = Rng(config.seed).child("tsne.init");
  Matrix y(n, std::vector<double>(2));
  for (auto& r : y)
    for (double& v : r) v = rng.normal(0.0, 1e-4);
  out.initial_kl = kl_divergence(p, y);

  // Momentum descent with a backtracking step scale: an update that would
  // raise the KL is rejected and retried smaller, so the accepted cost is
  // non-increasing regardless of the configured learning rate.
  Matrix velocity(n, std::vector<double>(2, 0.0));
  Matrix gains(n, std::vector<double>(2, 1.0));
  double step_scale = 1.0;
  double cost = out.initial_kl;

  for (int iter = 0; iter < config.iterations; ++iter) {
    const double momentum = iter < 250 ? 0.5 : 0.8;

    // Student-t Q and exact gradient
    Matrix qnum(n, std::vector<double>(n, 0.0));
    double qz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y[i][0] - y[j][0];
        const double dy = y[i][1] - y[j][1];
        const double t = 1.0 / (1.0 + dx * dx + dy * dy);
        qnum[i][j] = qnum[j][i] = t;
        qz += 2.0 * t;
      }
    }
    Matrix grad(n, std::vector<double>(2, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = std::max(qnum[i][j] / qz, 1e-300);
        const double mult = 4.0 * (p[i][j] - q) * qnum[i][j];
        grad[i][0] += mult * (y[i][0] - y[j][0]);
        grad[i][1] += mult * (y[i][1] - y[j][1]);
      }
    }

    Matrix new_velocity = velocity;
    Matrix new_gains = gains;
    Matrix new_y = y;
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) {
        const double g = grad[i][c];
        const bool same_sign = (g > 0) == (velocity[i][c] > 0);
        new_gains[i][c] = same_sign ? std::max(gains[i][c] * 0.8, 0.01)
                                    : gains[i][c] + 0.2;
        new_velocity[i][c] =
            momentum * velocity[i][c] -
            config.learning_rate * step_scale * new_gains[i][c] * g;
        new_y[i][c] += new_velocity[i][c];
      }
    }
    const double new_cost = kl_divergence(p, new_y);
    if (new_cost <= cost) {
      y = std::move(new_y);
      velocity = std::move(new_velocity);
      gains = std::move(new_gains);
      cost = new_cost;
      step_scale = std::min(step_scale * 1.05, 1.0);
    } else {
      step_scale *= 0.5;
      for (auto& r : velocity) r = {0.0, 0.0};
      if (step_scale < 1e-14) break;  // at a local optimum
    }
  }

  out.final_kl = kl_divergence(p, y);
  for (std::size_t i = 0; i < n; ++i) {
    out.points.push_back({names[i], hospitals[i], y[i][0], y[i][1]});
  }
  return out;
}

double hospital_silhouette(const std::vector<ProjPoint>& points) {
  const std::size_t n = points.size();
  if (n < 2) return 0.0;
  std::map<std::string, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i)
    clusters[points[i].hospital].push_back(i);
  if (clusters.size() < 2) return 0.0;

  auto dist = [&](std::size_t i, std::size_t j) {
    const double dx = points[i].x - points[j].x;
    const double dy = points[i].y - points[j].y;
    return std::sqrt(dx * dx + dy * dy);
  };

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& own = clusters.at(points[i].hospital);
    if (own.size() < 2) continue;  // singleton contributes 0
    double a = 0.0;
    for (std::size_t j : own) {
      if (j != i) a += dist(i, j);
    }
    a /= static_cast<double>(own.size() - 1);
    double b = 1e308;
    for (const auto& [label, members] : clusters) {
      if (label == points[i].hospital) continue;
      double m = 0.0;
      for (std::size_t j : members) m += dist(i, j);
      m /= static_cast<double>(members.size());
      b = std::min(b, m);
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

namespace {
std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

std::string projection_csv(const Projection2D& proj, std::uint64_t config_hash,
                           std::uint64_t seed) {
  std::string out = "name,hospital,x,y\n";
  char line[256];
  for (const auto& p : proj.points) {
    std::snprintf(line, sizeof(line), "%s,%s,%.9g,%.9g\n", p.name.c_str(),
                  p.hospital.c_str(), p.x, p.y);
    out += line;
  }
  out += "# config=" + hex64(config_hash) + " seed=" + std::to_string(seed) +
         "\n";
  return out;
}

std::string projection_svg(const Projection2D& proj, const std::string& title,
                           std::uint64_t config_hash, std::uint64_t seed) {
  static const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                   "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
                                   "#9c755f", "#bab0ac"};
  double min_x = 1e308, max_x = -1e308, min_y = 1e308, max_y = -1e308;
  for (const auto& p : proj.points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double span_x = std::max(max_x - min_x, 1e-12);
  const double span_y = std::max(max_y - min_y, 1e-12);
  const int w = 640, h = 480, margin = 48;

  std::map<std::string, std::size_t> color_of;
  for (const auto& p : proj.points) {
    if (!color_of.count(p.hospital)) {
      const std::size_t next = color_of.size();
      color_of[p.hospital] = next % 10;
    }
  }

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(w) + "\" height=\"" + std::to_string(h) + "\">\n";
  svg += "<!-- config=" + hex64(config_hash) +
         " seed=" + std::to_string(seed) +
         " initial_kl=" + std::to_string(proj.initial_kl) +
         " final_kl=" + std::to_string(proj.final_kl) +
         (proj.jitter_applied ? " jitter=1e-9" : "") + " -->\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"16\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" +
         title + "</text>\n";
  char el[256];
  for (const auto& p : proj.points) {
    const double px =
        margin + (p.x - min_x) / span_x * (w - 2.0 * margin);
    const double py =
        h - margin - (p.y - min_y) / span_y * (h - 2.0 * margin);
    std::snprintf(el, sizeof(el),
                  "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"5\" fill=\"%s\"><title>%s"
                  " (%s)</title></circle>\n",
                  px, py, kPalette[color_of[p.hospital]], p.name.c_str(),
                  p.hospital.c_str());
    svg += el;
  }
  int ly = 40;
  for (const auto& [hospital, color] : color_of) {
    std::snprintf(el, sizeof(el),
                  "<circle cx=\"%d\" cy=\"%d\" r=\"5\" fill=\"%s\"/>"
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
                  "font-size=\"11\">%s</text>\n",
                  w - 140, ly, kPalette[color], w - 128, ly + 4,
                  hospital.c_str());
    svg += el;
    ly += 18;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace authorsum::viz
