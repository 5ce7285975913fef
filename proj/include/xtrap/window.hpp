#ifndef XTRAP_WINDOW_HPP
#define XTRAP_WINDOW_HPP

#include <deque>

#include "xtrap/types.hpp"

namespace xtrap {

// Rolling history of the last L iterates of a p-dimensional sequence,
// addressed by the global sequence index (not a buffer offset), so drivers
// can write the j - m_j index arithmetic literally. Pushing beyond capacity
// evicts the oldest entry; querying an evicted index throws OutOfWindow.
class SequenceWindow {
public:
    SequenceWindow(Index dim, std::size_t capacity);

    Index dim() const { return dim_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    // Global index of the oldest retained / newest vector.
    long first_index() const { return first_index_; }
    long last_index() const { return first_index_ + static_cast<long>(entries_.size()) - 1; }

    void push(Vector v);
    void replace_last(Vector v); // continuous-updating drivers swap the Picard iterate
    void clear();

    const Vector& at(long global_index) const;

private:
    Index dim_;
    std::size_t capacity_;
    std::deque<Vector> entries_;
    long first_index_ = 0;
};

// Raw iterates side by side: column j = s_{start+j}.
Matrix iterate_slice(const SequenceWindow& w, long start, Index cols);

// First differences: column j = s_{start+j+1} - s_{start+j}; needs cols+1
// stored vectors.
Matrix delta_matrix(const SequenceWindow& w, long start, Index cols);

// Second differences, computed as differences of first differences so they
// match delta-of-delta bit for bit; needs cols+2 stored vectors.
Matrix delta2_matrix(const SequenceWindow& w, long start, Index cols);

// Block-stacked first differences: block row r (of k) equals
// delta_matrix(w, n + r, cols); result is (k p) x cols.
Matrix stacked_delta(const SequenceWindow& w, long n, Index k, Index cols);

// Block-stacked second differences: block row r equals delta2_matrix(w, n + r, cols).
Matrix stacked_delta2(const SequenceWindow& w, long n, Index k, Index cols);

// Stacked single-column form: block r = s_{start+r+1} - s_{start+r}, r = 0..k-1.
Vector stacked_column(const SequenceWindow& w, long start, Index k);

} // namespace xtrap

#endif
