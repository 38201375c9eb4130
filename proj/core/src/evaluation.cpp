// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/evaluation.hpp>

#include <synclift/error.hpp>

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cstdio>
#include <map>
#include <sstream>

namespace synclift {
namespace {

void check_shapes(const Pose3D& pred, const Pose3D& gt) {
  if (pred.cols() != gt.cols()) {
    throw ShapeError("prediction has " + std::to_string(pred.cols()) + " joints, ground truth " +
                     std::to_string(gt.cols()));
  }
  if (pred.cols() == 0) throw ShapeError("cannot score an empty pose");
}

struct Accumulator {
  long count = 0;
  double p1 = 0;
  double p2 = 0;
  double z = 0;
  double pck = 0;

  void add(double a, double b, double c, double d) {
    ++count;
    p1 += a;
    p2 += b;
    z += c;
    pck += d;
  }
  EvalMetrics finish() const {
    EvalMetrics m;
    m.count = count;
    if (count == 0) return m;
    const double n = static_cast<double>(count);
    m.mpjpe_p1 = p1 / n;
    m.mpjpe_p2 = p2 / n;
    m.z_error = z / n;
    m.pck = pck / n;
    return m;
  }
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double mpjpe(const Pose3D& pred, const Pose3D& gt) {
  check_shapes(pred, gt);
  return (pred - gt).colwise().norm().mean();
}

Pose3D procrustes_align(const Pose3D& pred, const Pose3D& gt, bool with_scale) {
  check_shapes(pred, gt);
  if (pred.cols() < 3) throw DegenerateInputError("procrustes alignment needs at least three joints");
  const Eigen::Vector3d mu_pred = pred.rowwise().mean();
  const Eigen::Vector3d mu_gt = gt.rowwise().mean();
  const Pose3D p0 = pred.colwise() - mu_pred;
  const Pose3D g0 = gt.colwise() - mu_gt;

  const Eigen::Matrix3d h = p0 * g0.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::JacobiSVD<Eigen::MatrixXd> spread(p0);
  const auto& ps = spread.singularValues();
  if (!(ps(0) > 0) || ps(1) <= 1e-12 * ps(0) || s(1) <= 1e-12 * s(0)) {
    throw DegenerateInputError("procrustes alignment: configuration is collinear or rank-deficient");
  }
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0) d(2, 2) = -1;
  const Eigen::Matrix3d rotation = svd.matrixV() * d * svd.matrixU().transpose();
  double scale = 1.0;
  if (with_scale) scale = (s.asDiagonal() * d).trace() / p0.squaredNorm();
  return ((scale * rotation) * p0).colwise() + mu_gt;
}

double z_only_error(const Pose3D& pred, const Pose3D& gt, ZAlignment alignment, bool with_scale) {
  check_shapes(pred, gt);
  const Pose3D p = alignment == ZAlignment::kProcrustes ? procrustes_align(pred, gt, with_scale) : pred;
  return (p.row(2) - gt.row(2)).cwiseAbs().mean();
}

double pck3d(const Pose3D& pred, const Pose3D& gt, double threshold) {
  check_shapes(pred, gt);
  if (!(threshold > 0)) throw UsageError("PCK threshold must be positive");
  const auto d = (pred - gt).colwise().norm();
  return static_cast<double>((d.array() < threshold).count()) / static_cast<double>(d.size());
}

EvalReport evaluate_predictions(const Matrix& predictions, const PoseArrays& truth, const EvalConfig& config) {
  if (!truth.has_3d()) throw FormatError("evaluation needs 3D ground truth");
  if (predictions.rows() != truth.size() || predictions.cols() != truth.y3d.cols()) {
    throw ShapeError("prediction matrix does not match the ground truth");
  }
  const Index n = truth.y3d.cols() / 3;
  Accumulator overall;
  std::map<std::string, Accumulator> buckets;
  for (Index i = 0; i < truth.size(); ++i) {
    Pose3D pred = unflatten3d(predictions.row(i), n);
    Pose3D gt = unflatten3d(truth.y3d.row(i), n);
    if (config.original_units) {
      const double r = truth.ratio3d[static_cast<std::size_t>(i)];
      pred *= r;
      gt *= r;
    }
    const double p1 = mpjpe(pred, gt);
    const double p2 = mpjpe(procrustes_align(pred, gt, config.procrustes_scale), gt);
    const double z = z_only_error(pred, gt, config.z_alignment, config.procrustes_scale);
    const double pck = pck3d(pred, gt, config.pck_threshold);
    overall.add(p1, p2, z, pck);
    const auto& action = truth.actions[static_cast<std::size_t>(i)];
    buckets[action.empty() ? "all" : action].add(p1, p2, z, pck);
  }
  EvalReport report;
  report.overall = overall.finish();
  for (const auto& [name, acc] : buckets) report.per_action.emplace_back(name, acc.finish());
  return report;
}

EvalReport evaluate(Generator& generator, const PoseArrays& truth, const EvalConfig& config) {
  return evaluate_predictions(lift(generator, truth.x2d), truth, config);
}

nlohmann::json report_to_json(const EvalReport& report) {
  auto metrics = [](const EvalMetrics& m) {
    return nlohmann::json{{"count", m.count},
                          {"mpjpe_p1", m.mpjpe_p1},
                          {"mpjpe_p2", m.mpjpe_p2},
                          {"z_error", m.z_error},
                          {"pck", m.pck}};
  };
  nlohmann::json j;
  j["label"] = report.label;
  j["noise_sigma"] = report.noise_sigma;
  j["overall"] = metrics(report.overall);
  nlohmann::json actions = nlohmann::json::object();
  for (const auto& [name, m] : report.per_action) actions[name] = metrics(m);
  j["per_action"] = std::move(actions);
  return j;
}

std::string reports_to_csv(const std::vector<EvalReport>& reports, bool per_action) {
  std::ostringstream os;
  os << "label,noise_sigma,action,count,mpjpe_p1,mpjpe_p2,z_error,pck\n";
  auto row = [&](const EvalReport& r, const std::string& action, const EvalMetrics& m) {
    os << r.label << ',' << format_double(r.noise_sigma) << ',' << action << ',' << m.count << ','
       << format_double(m.mpjpe_p1) << ',' << format_double(m.mpjpe_p2) << ',' << format_double(m.z_error) << ','
       << format_double(m.pck) << '\n';
  };
  for (const auto& r : reports) {
    row(r, "ALL", r.overall);
    if (!per_action) continue;
    for (const auto& [name, m] : r.per_action) row(r, name, m);
  }
  return os.str();
}

}  // namespace synclift
