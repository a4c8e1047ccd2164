#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace opf {

using NodeId = std::int32_t;

// Samples are stored one per row so that each feature vector is contiguous.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FeatureVector = Eigen::VectorXd;
using DistanceMatrix = Eigen::MatrixXd;

}  // namespace opf
