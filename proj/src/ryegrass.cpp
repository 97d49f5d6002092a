#include "sandwich/ryegrass.hpp"

namespace sandwich::data {

const Eigen::MatrixXd& ryegrass() {
  static const Eigen::MatrixXd table = [] {
    Eigen::MatrixXd m(24, 2);
    m << 0.00, 6.6911504,  //
        0.00, 7.3035642,   //
        0.00, 7.8557388,   //
        0.00, 8.6463696,   //
        0.00, 7.3215458,   //
        0.00, 8.7037930,   //
        0.94, 8.0615141,   //
        0.94, 6.5237822,   //
        0.94, 8.3897253,   //
        1.88, 6.4821800,   //
        1.88, 6.5541514,   //
        1.88, 6.2377331,   //
        3.75, 2.9969462,   //
        3.75, 3.1090480,   //
        3.75, 2.9038658,   //
        7.50, 1.0507167,   //
        7.50, 1.1558676,   //
        7.50, 1.0084230,   //
        15.0, 0.6647679,   //
        15.0, 0.4469503,   //
        15.0, 0.6099103,   //
        30.0, 0.3823850,   //
        30.0, 0.3035125,   //
        30.0, 0.4491715;
    return m;
  }();
  return table;
}

}  // namespace sandwich::data
