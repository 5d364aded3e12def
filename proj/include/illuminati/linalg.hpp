#ifndef ILLUMINATI_LINALG_HPP
#define ILLUMINATI_LINALG_HPP

#include <Eigen/Dense>

namespace illuminati {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

} // namespace illuminati

#endif // ILLUMINATI_LINALG_HPP
