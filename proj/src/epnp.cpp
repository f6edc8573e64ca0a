// EPnP: each object point is a barycentric combination of a few control
// points; the camera-frame control points lie in the (near) null space of a
// 2n x 3m system and are fixed by preserving inter-control-point distances.

#include "epnp.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <utility>

namespace refcalib::detail {
namespace {

struct ControlSetup {
  int m = 0;                       // control points (4 general, 3 planar)
  std::vector<Point3> ctrl_world;  // m points
  Eigen::MatrixXd alphas;          // n x m barycentric coordinates
  std::vector<Pixel> normalized;   // (u - cx) / fx, (v - cy) / fy
  std::vector<double> weights;
};

ControlSetup make_setup(std::span<const Correspondence> corrs,
                        const CameraIntrinsics& k, bool planar) {
  ControlSetup s;
  s.m = planar ? 3 : 4;
  double wsum = 0.0;
  Point3 c0 = Point3::Zero();
  for (const auto& c : corrs) {
    if (c.weight <= 0.0) continue;
    wsum += c.weight;
    c0 += c.weight * c.p3;
  }
  c0 /= wsum;
  Mat3 scatter = Mat3::Zero();
  for (const auto& c : corrs) {
    if (c.weight <= 0.0) continue;
    const Vec3 d = c.p3 - c0;
    scatter += c.weight * d * d.transpose();
  }
  scatter /= wsum;
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  // Descending principal directions with their standard deviations.
  std::array<Vec3, 3> axes;
  std::array<double, 3> scale;
  for (int i = 0; i < 3; ++i) {
    axes[i] = eig.eigenvectors().col(2 - i);
    scale[i] = std::sqrt(std::max(eig.eigenvalues()[2 - i], 0.0));
  }

  s.ctrl_world.push_back(c0);
  for (int j = 1; j < s.m; ++j) s.ctrl_world.push_back(c0 + scale[j - 1] * axes[j - 1]);

  const auto n = static_cast<Eigen::Index>(corrs.size());
  s.alphas.resize(n, s.m);
  Eigen::Index row = 0;
  for (const auto& c : corrs) {
    if (c.weight <= 0.0) continue;
    const Vec3 d = c.p3 - c0;
    double rest = 1.0;
    for (int j = 1; j < s.m; ++j) {
      const double a = scale[j - 1] > 0.0 ? d.dot(axes[j - 1]) / scale[j - 1] : 0.0;
      s.alphas(row, j) = a;
      rest -= a;
    }
    s.alphas(row, 0) = rest;
    s.normalized.emplace_back((c.p2.x() - k.cx) / k.fx, (c.p2.y() - k.cy) / k.fy);
    s.weights.push_back(c.weight);
    ++row;
  }
  s.alphas.conservativeResize(row, s.m);
  return s;
}

std::vector<std::pair<int, int>> control_pairs(int m) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) pairs.emplace_back(a, b);
  return pairs;
}

// Product terms beta_k * beta_l (k <= l), ordered 11 12 22 13 23 33 14 ...
std::vector<std::pair<int, int>> product_terms(int n_betas) {
  std::vector<std::pair<int, int>> terms;
  for (int l = 0; l < n_betas; ++l)
    for (int k = 0; k <= l; ++k) terms.emplace_back(k, l);
  return terms;
}

int term_index(int k, int l) {
  if (k > l) std::swap(k, l);
  return l * (l + 1) / 2 + k;
}

class BetaProblem {
 public:
  BetaProblem(const ControlSetup& s, const Eigen::MatrixXd& null_vectors)
      : pairs_(control_pairs(s.m)), null_(null_vectors) {
    const int nb = static_cast<int>(null_.cols());
    dv_.resize(nb);
    for (int k = 0; k < nb; ++k) {
      for (const auto& [a, b] : pairs_) {
        dv_[k].push_back(null_.col(k).segment<3>(3 * a) - null_.col(k).segment<3>(3 * b));
      }
    }
    for (const auto& [a, b] : pairs_) {
      rho_.push_back((s.ctrl_world[a] - s.ctrl_world[b]).squaredNorm());
    }
    const auto terms = product_terms(nb);
    l_.resize(static_cast<Eigen::Index>(pairs_.size()), static_cast<Eigen::Index>(terms.size()));
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const auto [k, l] = terms[t];
        const double dot = dv_[k][p].dot(dv_[l][p]);
        l_(p, t) = k == l ? dot : 2.0 * dot;
      }
    }
  }

  int n_betas() const { return static_cast<int>(dv_.size()); }

  Eigen::VectorXd single_beta() const {
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const double len = dv_[0][p].norm();
      num += len * std::sqrt(rho_[p]);
      den += len * len;
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_betas());
    b[0] = den > 0.0 ? num / den : 0.0;
    return b;
  }

  // Linearized solve over a subset of product terms.
  Eigen::VectorXd solve_terms(const std::vector<int>& cols) const {
    Eigen::MatrixXd a(l_.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) a.col(i) = l_.col(cols[i]);
    const Eigen::VectorXd rho = Eigen::Map<const Eigen::VectorXd>(rho_.data(), rho_.size());
    return a.colPivHouseholderQr().solve(rho);
  }

  // Betas from B11, B1k (k >= 1) terms.
  Eigen::VectorXd approx_first_row() const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_betas());
    std::vector<int> cols;
    for (int k = 0; k < n_betas(); ++k) cols.push_back(term_index(0, k));
    const Eigen::VectorXd x = solve_terms(cols);
    const double sign = x[0] < 0.0 ? -1.0 : 1.0;
    b[0] = std::sqrt(std::abs(x[0]));
    if (b[0] == 0.0) return b;
    for (int k = 1; k < n_betas(); ++k) b[k] = sign * x[k] / b[0];
    return b;
  }

  // Betas from B11, B12, B22 (and B13, B23 when `with_third`).
  Eigen::VectorXd approx_two(bool with_third) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_betas());
    std::vector<int> cols{term_index(0, 0), term_index(0, 1), term_index(1, 1)};
    if (with_third) {
      cols.push_back(term_index(0, 2));
      cols.push_back(term_index(1, 2));
    }
    const Eigen::VectorXd x = solve_terms(cols);
    if (x[0] < 0.0) {
      b[0] = std::sqrt(-x[0]);
      b[1] = x[2] < 0.0 ? std::sqrt(-x[2]) : 0.0;
    } else {
      b[0] = std::sqrt(x[0]);
      b[1] = x[2] > 0.0 ? std::sqrt(x[2]) : 0.0;
    }
    if (x[1] < 0.0) b[0] = -b[0];
    if (with_third && b[0] != 0.0) b[2] = x[3] / b[0];
    return b;
  }

  // Gauss-Newton on the distance constraints over the first `active` betas.
  Eigen::VectorXd refine(Eigen::VectorXd b, int active) const {
    const auto np = static_cast<Eigen::Index>(pairs_.size());
    for (int it = 0; it < 10; ++it) {
      Eigen::VectorXd r(np);
      Eigen::MatrixXd j(np, active);
      for (Eigen::Index p = 0; p < np; ++p) {
        Vec3 d = Vec3::Zero();
        for (int k = 0; k < n_betas(); ++k) d += b[k] * dv_[k][p];
        r[p] = d.squaredNorm() - rho_[p];
        for (int k = 0; k < active; ++k) j(p, k) = 2.0 * d.dot(dv_[k][p]);
      }
      const Eigen::VectorXd step = j.colPivHouseholderQr().solve(-r);
      if (!step.allFinite()) break;
      b.head(active) += step;
      if (step.norm() <= 1e-15 * (1.0 + b.norm())) break;
    }
    return b;
  }

  Eigen::VectorXd control_points_camera(const Eigen::VectorXd& b) const {
    return null_ * b;
  }

 private:
  std::vector<std::pair<int, int>> pairs_;
  Eigen::MatrixXd null_;
  std::vector<std::vector<Vec3>> dv_;
  std::vector<double> rho_;
  Eigen::MatrixXd l_;
};

std::optional<Pose> pose_from_betas(const ControlSetup& s, const BetaProblem& problem,
                                    const Eigen::VectorXd& betas) {
  if (!betas.allFinite() || betas.norm() == 0.0) return std::nullopt;
  const Eigen::VectorXd ccs = problem.control_points_camera(betas);
  const auto n = s.alphas.rows();
  std::vector<Point3> cam(n), world(n);
  double sign_votes = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Point3 pc = Point3::Zero(), pw = Point3::Zero();
    for (int j = 0; j < s.m; ++j) {
      pc += s.alphas(i, j) * ccs.segment<3>(3 * j);
      pw += s.alphas(i, j) * s.ctrl_world[j];
    }
    cam[i] = pc;
    world[i] = pw;
    sign_votes += s.weights[i] * (pc.z() > 0.0 ? 1.0 : -1.0);
  }
  if (sign_votes < 0.0) {
    for (auto& p : cam) p = -p;
  }
  try {
    return fit_rigid(world, cam, s.weights);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

Pose fit_rigid(std::span<const Point3> src, std::span<const Point3> dst,
               std::span<const double> weights) {
  double wsum = 0.0;
  Vec3 cs = Vec3::Zero(), cd = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    wsum += weights[i];
    cs += weights[i] * src[i];
    cd += weights[i] * dst[i];
  }
  if (!(wsum > 0.0)) throw NumericalFailure("absolute orientation with zero total weight");
  cs /= wsum;
  cd /= wsum;
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    h += weights[i] * (src[i] - cs) * (dst[i] - cd).transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();
  if (!r.allFinite()) throw NumericalFailure("absolute orientation produced non-finite rotation");
  return Pose(r, cd - r * cs);
}

std::vector<Pose> epnp_candidates(std::span<const Correspondence> corrs,
                                  const CameraIntrinsics& k, bool planar) {
  const ControlSetup s = make_setup(corrs, k, planar);
  const int dim = 3 * s.m;
  Eigen::MatrixXd mtm = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < s.alphas.rows(); ++i) {
    const double sw = std::sqrt(s.weights[i]);
    Eigen::RowVectorXd ru = Eigen::RowVectorXd::Zero(dim);
    Eigen::RowVectorXd rv = Eigen::RowVectorXd::Zero(dim);
    for (int j = 0; j < s.m; ++j) {
      const double a = sw * s.alphas(i, j);
      ru[3 * j] = a;
      ru[3 * j + 2] = -a * s.normalized[i].x();
      rv[3 * j + 1] = a;
      rv[3 * j + 2] = -a * s.normalized[i].y();
    }
    mtm.noalias() += ru.transpose() * ru;
    mtm.noalias() += rv.transpose() * rv;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mtm);
  if (eig.info() != Eigen::Success) {
    throw NumericalFailure("EPnP null-space extraction failed");
  }
  // Eigenvalues ascend: the leading columns span the approximate null space.
  const int n_null = planar ? 3 : 4;
  const BetaProblem problem(s, eig.eigenvectors().leftCols(n_null));

  std::vector<Eigen::VectorXd> betas;
  betas.push_back(problem.single_beta());
  if (planar) {
    const Eigen::VectorXd two = problem.approx_two(false);
    betas.push_back(problem.refine(two, 2));
    betas.push_back(problem.refine(two, 3));
  } else {
    betas.push_back(problem.refine(problem.approx_first_row(), 4));
    betas.push_back(problem.refine(problem.approx_two(false), 4));
    betas.push_back(problem.refine(problem.approx_two(true), 4));
  }

  std::vector<Pose> out;
  for (const auto& b : betas) {
    if (auto pose = pose_from_betas(s, problem, b)) out.push_back(*pose);
  }
  return out;
}

}  // namespace refcalib::detail
