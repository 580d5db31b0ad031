#include "gridwaves/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gridwaves {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_pgm(const std::string& path, const std::vector<std::vector<double>>& rows,
               double scale_max) {
    if (rows.empty() || rows.front().empty())
        throw std::invalid_argument("write_pgm: image must be nonempty");
    const size_t width = rows.front().size();
    double peak = scale_max;
    for (const auto& row : rows) {
        if (row.size() != width) throw std::invalid_argument("write_pgm: ragged rows");
        if (scale_max <= 0.0)
            for (double v : row) peak = std::max(peak, v);
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
    out << "P5\n" << width << " " << rows.size() << "\n255\n";
    std::vector<unsigned char> line(width);
    for (const auto& row : rows) {
        for (size_t i = 0; i < width; ++i) {
            double scaled = peak > 0.0 ? row[i] / peak : 0.0;
            scaled = std::clamp(scaled, 0.0, 1.0);
            line[i] = static_cast<unsigned char>(scaled * 255.0 + 0.5);
        }
        out.write(reinterpret_cast<const char*>(line.data()), line.size());
    }
    if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

Eigen::MatrixXd maxpool_to_limit(const Eigen::MatrixXd& image, int limit) {
    if (limit < 1) throw std::invalid_argument("maxpool_to_limit: limit must be positive");
    long rows = image.rows();
    long cols = image.cols();
    long pool_r = (rows + limit - 1) / limit;
    long pool_c = (cols + limit - 1) / limit;
    if (pool_r <= 1 && pool_c <= 1) return image;

    long out_r = (rows + pool_r - 1) / pool_r;
    long out_c = (cols + pool_c - 1) / pool_c;
    Eigen::MatrixXd out(out_r, out_c);
    for (long r = 0; r < out_r; ++r) {
        for (long c = 0; c < out_c; ++c) {
            long r1 = std::min(rows, (r + 1) * pool_r);
            long c1 = std::min(cols, (c + 1) * pool_c);
            out(r, c) = image.block(r * pool_r, c * pool_c, r1 - r * pool_r, c1 - c * pool_c)
                            .maxCoeff();
        }
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
    out << content;
    if (!out) throw std::runtime_error("write_text_file: write failed for " + path);
}

}
