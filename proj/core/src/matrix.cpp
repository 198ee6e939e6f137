#include "kinopt/matrix.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace kinopt {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("Matrix: data length does not match rows*cols");
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

std::atomic<unsigned> g_max_threads{0};  // 0 = use hardware_concurrency

unsigned resolved_threads() {
    unsigned n = g_max_threads.load(std::memory_order_relaxed);
    if (n == 0) {
        // hardware_concurrency reads procfs on Linux; query it once
        static const unsigned hw = [] {
            const unsigned h = std::thread::hardware_concurrency();
            return h == 0 ? 1u : std::min(h, 8u);
        }();
        n = hw;
    }
    return n;
}

}  // namespace

void set_max_threads(unsigned n) { g_max_threads.store(n, std::memory_order_relaxed); }
unsigned max_threads() { return resolved_threads(); }

namespace detail {

void parallel_rows(std::size_t n_rows, std::size_t work_per_row,
                   const std::function<void(std::size_t, std::size_t)>& fn) {
    const unsigned n_threads = resolved_threads();
    // Not worth spawning threads below ~1e6 inner operations.
    if (n_threads <= 1 || n_rows < 2 || n_rows * work_per_row < 1000000) {
        fn(0, n_rows);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(n_threads, n_rows));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n_rows + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n_rows, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions do not match");
    }
    const std::size_t n = a.rows(), k_dim = a.cols(), m = b.cols();
    Matrix c(n, m);
    const double* ad = a.data();
    const double* bd = b.data();
    double* cd = c.data();
    detail::parallel_rows(n, k_dim * m, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            double* crow = cd + i * m;
            for (std::size_t k = 0; k < k_dim; ++k) {
                const double aik = ad[i * k_dim + k];
                const double* brow = bd + k * m;
                for (std::size_t j = 0; j < m; ++j) {
                    crow[j] += aik * brow[j];
                }
            }
        }
    });
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = a(i, j);
        }
    }
    return t;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw std::invalid_argument("parse_double: not a number: '" + s + "'");
    }
    return v;
}

void write_csv(const Matrix& m, std::ostream& out) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_csv_file(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv_file: cannot open " + path);
    write_csv(m, out);
    if (!out) throw std::runtime_error("write_csv_file: write failed for " + path);
}

Matrix read_csv(std::istream& in) {
    std::vector<double> data;
    std::size_t rows = 0, cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) break;
        std::stringstream ls(line);
        std::string cell;
        std::size_t this_cols = 0;
        while (std::getline(ls, cell, ',')) {
            data.push_back(parse_double(cell));
            ++this_cols;
        }
        if (rows == 0) {
            cols = this_cols;
        } else if (this_cols != cols) {
            throw std::invalid_argument("read_csv: ragged rows");
        }
        ++rows;
    }
    return Matrix(rows, cols, std::move(data));
}

Matrix read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv_file: cannot open " + path);
    return read_csv(in);
}

}  // namespace kinopt
