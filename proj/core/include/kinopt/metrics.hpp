#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "kinopt/matrix.hpp"

namespace kinopt {

// Pairwise cosine similarity of the rows of w: C[i][j] = w_i.w_j/(|w_i||w_j|),
// clamped to [-1, 1]. Rows with zero norm produce 0 entries, including their
// own diagonal, so dead neurons carry no similarity signal.
Matrix cosine_matrix(const Matrix& w);

// Sum of absolute off-diagonal entries of a cosine matrix. The diagonal is
// excluded: it is constant for live neurons and carries no condensation
// signal.
double weight_correlation(const Matrix& cosine);

// Largest absolute off-diagonal entry of a cosine matrix; 0 when there are
// fewer than two rows.
double neuron_similarity(const Matrix& cosine);

struct MetricsRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_metric = 0.0;
    double neuron_similarity = 0.0;
    double weight_correlation = 0.0;
    double step_time_ms = 0.0;
};

extern const char* const kMetricsCsvHeader;  // epoch,train_loss,...

void write_metrics_csv(const std::vector<MetricsRecord>& records, std::ostream& out);
std::vector<MetricsRecord> read_metrics_csv(std::istream& in);

}  // namespace kinopt
