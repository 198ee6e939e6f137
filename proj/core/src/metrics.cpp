#include "kinopt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kinopt {

Matrix cosine_matrix(const Matrix& w) {
    const std::size_t n = w.rows(), d = w.cols();
    Matrix normalized(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) norm_sq += w(i, j) * w(i, j);
        if (norm_sq == 0.0) continue;  // leave the row zero
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (std::size_t j = 0; j < d; ++j) normalized(i, j) = w(i, j) * inv;
    }
    Matrix c = matmul(normalized, transpose(normalized));
    for (std::size_t i = 0; i < c.size(); ++i) {
        c.data()[i] = std::clamp(c.data()[i], -1.0, 1.0);
    }
    return c;
}

double weight_correlation(const Matrix& cosine) {
    if (cosine.rows() != cosine.cols()) {
        throw std::invalid_argument("weight_correlation: matrix must be square");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < cosine.rows(); ++i) {
        for (std::size_t j = 0; j < cosine.cols(); ++j) {
            if (i != j) sum += std::abs(cosine(i, j));
        }
    }
    return sum;
}

double neuron_similarity(const Matrix& cosine) {
    if (cosine.rows() != cosine.cols()) {
        throw std::invalid_argument("neuron_similarity: matrix must be square");
    }
    if (cosine.rows() < 2) return 0.0;
    double max_abs = 0.0;
    for (std::size_t i = 0; i < cosine.rows(); ++i) {
        for (std::size_t j = 0; j < cosine.cols(); ++j) {
            if (i != j) max_abs = std::max(max_abs, std::abs(cosine(i, j)));
        }
    }
    return max_abs;
}

const char* const kMetricsCsvHeader =
    "epoch,train_loss,neuron_similarity,weight_correlation,step_time_ms";

void write_metrics_csv(const std::vector<MetricsRecord>& records, std::ostream& out) {
    out << kMetricsCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.epoch << ',' << format_double(r.train_loss) << ','
            << format_double(r.neuron_similarity) << ','
            << format_double(r.weight_correlation) << ','
            << format_double(r.step_time_ms) << '\n';
    }
}

std::vector<MetricsRecord> read_metrics_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("read_metrics_csv: empty stream");
    }
    if (line != kMetricsCsvHeader) {
        throw std::runtime_error("read_metrics_csv: unexpected header: " + line);
    }
    std::vector<MetricsRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5) {
            throw std::runtime_error("read_metrics_csv: bad row: " + line);
        }
        MetricsRecord r;
        r.epoch = static_cast<std::size_t>(std::stoull(cells[0]));
        r.train_loss = parse_double(cells[1]);
        r.neuron_similarity = parse_double(cells[2]);
        r.weight_correlation = parse_double(cells[3]);
        r.step_time_ms = parse_double(cells[4]);
        records.push_back(r);
    }
    return records;
}

}  // namespace kinopt
