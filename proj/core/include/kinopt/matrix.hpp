#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace kinopt {

// Dense row-major matrix of 64-bit floats. Values are treated as immutable
// once handed to library operations; all operations allocate their result.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Standard product with fixed row-major accumulation order: for each output
// row the contributions are added in ascending k. Throws std::invalid_argument
// on inner-dimension mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

// CSV serialization: one row per line, '.' decimal separator, 17 significant
// digits so that reading back reproduces every double bit-exactly.
void write_csv(const Matrix& m, std::ostream& out);
void write_csv_file(const Matrix& m, const std::string& path);
Matrix read_csv(std::istream& in);
Matrix read_csv_file(const std::string& path);

std::string format_double(double v);   // %.17g
double parse_double(const std::string& s);

// Caps the worker count used by the row-parallel kernels. Results are
// bit-identical for any thread count: each output row is produced by exactly
// one worker with the same inner summation order as the sequential path.
void set_max_threads(unsigned n);
unsigned max_threads();

namespace detail {
// Runs fn(row_begin, row_end) over [0, n_rows) in contiguous blocks. Falls
// back to a single inline call when the workload is small or threads are
// capped at 1.
void parallel_rows(std::size_t n_rows, std::size_t work_per_row,
                   const std::function<void(std::size_t, std::size_t)>& fn);
}  // namespace detail

}  // namespace kinopt
