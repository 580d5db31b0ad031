#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gridwaves {

/// Shortest round-trip decimal form with 17 significant digits.
std::string format_double(double value);

/// Binary 8-bit PGM (P5). `rows` is the image top to bottom; all rows must
/// share one length. Values are scaled linearly by `scale_max`, or by the
/// maximum of the data when `scale_max` <= 0 (an all-zero image stays black).
/// Passing one fixed scale keeps a sequence of frames comparable.
void write_pgm(const std::string& path, const std::vector<std::vector<double>>& rows,
               double scale_max = 0.0);

/// Max-pooling reduction of a matrix until both dimensions are at most
/// `limit`.
Eigen::MatrixXd maxpool_to_limit(const Eigen::MatrixXd& image, int limit);

void write_text_file(const std::string& path, const std::string& content);

}
