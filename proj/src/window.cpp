#include "xtrap/window.hpp"

namespace xtrap {

SequenceWindow::SequenceWindow(Index dim, std::size_t capacity) : dim_(dim), capacity_(capacity) {
    if (dim < 1) throw std::invalid_argument("SequenceWindow: dimension must be >= 1");
    if (capacity < 1) throw std::invalid_argument("SequenceWindow: capacity must be >= 1");
}

void SequenceWindow::push(Vector v) {
    if (v.size() != dim_) throw std::invalid_argument("SequenceWindow::push: wrong dimension");
    entries_.push_back(std::move(v));
    if (entries_.size() > capacity_) {
        entries_.pop_front();
        ++first_index_;
    }
}

void SequenceWindow::replace_last(Vector v) {
    if (entries_.empty()) throw OutOfWindow("SequenceWindow::replace_last: window is empty");
    if (v.size() != dim_) throw std::invalid_argument("SequenceWindow::replace_last: wrong dimension");
    entries_.back() = std::move(v);
}

void SequenceWindow::clear() {
    first_index_ = last_index() + 1;
    entries_.clear();
}

const Vector& SequenceWindow::at(long global_index) const {
    if (global_index < first_index_ || global_index > last_index())
        throw OutOfWindow("SequenceWindow: index " + std::to_string(global_index) + " outside retained range [" +
                          std::to_string(first_index_) + ", " + std::to_string(last_index()) + "]");
    return entries_[static_cast<std::size_t>(global_index - first_index_)];
}

Matrix iterate_slice(const SequenceWindow& w, long start, Index cols) {
    Matrix s(w.dim(), cols);
    for (Index j = 0; j < cols; ++j) s.col(j) = w.at(start + j);
    return s;
}

Matrix delta_matrix(const SequenceWindow& w, long start, Index cols) {
    Matrix d(w.dim(), cols);
    for (Index j = 0; j < cols; ++j) d.col(j) = w.at(start + j + 1) - w.at(start + j);
    return d;
}

Matrix delta2_matrix(const SequenceWindow& w, long start, Index cols) {
    Matrix d(w.dim(), cols);
    for (Index j = 0; j < cols; ++j) {
        // (s_{j+2} - s_{j+1}) - (s_{j+1} - s_j): identical floating ops to
        // applying delta_matrix twice.
        Vector hi = w.at(start + j + 2) - w.at(start + j + 1);
        Vector lo = w.at(start + j + 1) - w.at(start + j);
        d.col(j) = hi - lo;
    }
    return d;
}

Matrix stacked_delta(const SequenceWindow& w, long n, Index k, Index cols) {
    const Index p = w.dim();
    Matrix d(k * p, cols);
    for (Index r = 0; r < k; ++r) d.middleRows(r * p, p) = delta_matrix(w, n + r, cols);
    return d;
}

Matrix stacked_delta2(const SequenceWindow& w, long n, Index k, Index cols) {
    const Index p = w.dim();
    Matrix d(k * p, cols);
    for (Index r = 0; r < k; ++r) d.middleRows(r * p, p) = delta2_matrix(w, n + r, cols);
    return d;
}

Vector stacked_column(const SequenceWindow& w, long start, Index k) {
    const Index p = w.dim();
    Vector v(k * p);
    for (Index r = 0; r < k; ++r) v.segment(r * p, p) = w.at(start + r + 1) - w.at(start + r);
    return v;
}

} // namespace xtrap
